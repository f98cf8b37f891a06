"""Smell-to-file mapping and per-(version, file) dataset construction."""
from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, replace

import numpy as np

from .errors import DatasetError

log = logging.getLogger(__name__)

# feature column order of the dataset
FEATURES = ("UI", "UC", "SD", "FO", "LS", "DF", "CC", "DC", "LO", "SPF", "CO")
CSV_HEADER = ["version", "file"] + [f.lower() for f in FEATURES] + ["issues", "changes"]
LABEL_COLUMNS = ["issue_label", "change_label"]

ENTITY_LEVEL = {"UI", "SD"}


@dataclass(frozen=True)
class DatasetRow:
    version: str
    file: str
    features: tuple
    issue_count: int = 0
    change_count: int = 0
    issue_label: str | None = None
    change_label: str | None = None

    def __post_init__(self):
        if len(self.features) != len(FEATURES):
            raise DatasetError(f"expected {len(FEATURES)} features, got {len(self.features)}")
        if any(f not in (0, 1) for f in self.features):
            raise DatasetError(f"{self.version} {self.file}: features must be 0/1")
        if self.issue_count < 0 or self.change_count < 0:
            raise DatasetError(f"{self.version} {self.file}: negative count")

    def with_labels(self, issue_label=None, change_label=None) -> "DatasetRow":
        return replace(self, issue_label=issue_label, change_label=change_label)


def smell_files(instance, view, entity_file_map) -> set:
    """Files involved in a smell instance: the named entities' files for UI/SD,
    every file of the affected components otherwise."""
    if instance.smell_type in ENTITY_LEVEL:
        entities = instance.entity_ids
    else:
        entities = [e for c in instance.component_ids for e in view.component[c].entity_ids]
    return {entity_file_map[e] for e in entities if e in entity_file_map}


def file_smell_flags(view, report, entity_file_map) -> dict:
    """``{file: set(smell types)}`` for every smelly file of one version."""
    flags = {}
    for inst in report.instances:
        for f in smell_files(inst, view, entity_file_map):
            flags.setdefault(f, set()).add(inst.smell_type)
    return flags


def build_dataset(per_version, issues, commits, diagnostics: dict | None = None) -> list:
    """One unlabeled row per (version, mapped file).

    ``per_version`` is a sequence of ``(view, report, entity_file_map)``;
    ``issues`` should already be restricted to fixed ones.
    """
    diag = {"unknown_versions": 0, "unresolved_commits": 0}
    by_hash = {c.hash: c for c in commits}
    versions = [view.version for view, _, _ in per_version]
    known = set(versions)
    if len(known) != len(versions):
        raise DatasetError("duplicate version in dataset input")

    # version -> issues affecting it, each with its resolved fixing commits
    affecting = {v: [] for v in versions}
    unresolved = set()
    for issue in issues:
        fixing = []
        for h in issue.fixing_commits:
            if h in by_hash:
                fixing.append(by_hash[h])
            else:
                unresolved.add(h)
        for v in issue.affected_versions:
            if v in affecting:
                affecting[v].append(fixing)
            else:
                diag["unknown_versions"] += 1
    diag["unresolved_commits"] = len(unresolved)
    if diag["unknown_versions"]:
        log.warning("skipped %d issue-version reference(s) to unknown versions",
                    diag["unknown_versions"])
    if unresolved:
        log.warning("%d fixing commit hash(es) not found in the commit log", len(unresolved))

    rows = []
    for view, report, efm in per_version:
        flags = file_smell_flags(view, report, efm)
        issue_count = {}
        commit_files = {}
        for fixing in affecting[view.version]:
            touched = set()
            for c in fixing:
                touched.update(c.changed_files)
                commit_files[c.hash] = c.changed_files
            for f in touched:
                issue_count[f] = issue_count.get(f, 0) + 1
        change_count = {}
        for files in commit_files.values():
            for f in set(files):
                change_count[f] = change_count.get(f, 0) + 1
        for f in sorted(set(efm.values())):
            present = flags.get(f, ())
            rows.append(DatasetRow(
                view.version, f, tuple(int(s in present) for s in FEATURES),
                issue_count.get(f, 0), change_count.get(f, 0)))
    if diagnostics is not None:
        diagnostics.update(diag)
    return rows


def feature_matrix(rows) -> np.ndarray:
    return np.array([r.features for r in rows], dtype=np.int8).reshape(len(rows), len(FEATURES))


# --------------------------------------------------------------------- CSV

def write_dataset_csv(rows) -> str:
    labeled = any(r.issue_label is not None or r.change_label is not None for r in rows)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER + (LABEL_COLUMNS if labeled else []))
    for r in rows:
        rec = [r.version, r.file, *r.features, r.issue_count, r.change_count]
        if labeled:
            rec += [r.issue_label or "", r.change_label or ""]
        w.writerow(rec)
    return buf.getvalue()


def read_dataset_csv(text: str, source=None) -> list:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DatasetError(f"{source or 'dataset'}: empty file") from None
    if header[:len(CSV_HEADER)] != CSV_HEADER:
        raise DatasetError(f"{source or 'dataset'}:1: unexpected header {header}")
    labeled = header[len(CSV_HEADER):] == LABEL_COLUMNS
    rows = []
    for lineno, rec in enumerate(reader, start=2):
        if not rec:
            continue
        try:
            feats = tuple(int(x) for x in rec[2:2 + len(FEATURES)])
            iss, chg = int(rec[2 + len(FEATURES)]), int(rec[3 + len(FEATURES)])
            labels = (rec[-2] or None, rec[-1] or None) if labeled else (None, None)
            rows.append(DatasetRow(rec[0], rec[1], feats, iss, chg, *labels))
        except (ValueError, IndexError, DatasetError) as exc:
            raise DatasetError(f"{source or 'dataset'}:{lineno}: {exc}") from None
    return rows
