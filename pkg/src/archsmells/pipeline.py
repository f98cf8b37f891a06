"""End-to-end helpers over a corpus directory laid out as written by
:mod:`archsmells.synth`::

    <root>/<system>/gitlog.txt
    <root>/<system>/issues.json
    <root>/<system>/<version>/{deps.rsf, interfaces.rsf, files.rsf,
                               topics.tsv, dups.rsf, clusters.rsf}
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import ingest
from .coupling import cochange_couplings
from .dataset import build_dataset, feature_matrix
from .mlkit import LabeledDataset, encode_labels, pareto_label, smote
from .recover import apply_cluster_map, attach_concerns, attach_couplings, recover_pkg
from .smells import SmellConfig, detect_all


def _read(path):
    path = Path(path)
    return path.read_text() if path.exists() else ""


def load_view(version_dir, system, version, commits, view_kind="PKG",
              min_support=2, max_commit_files=100):
    """Recover one version's view with concerns and couplings attached.

    Returns ``(view, entity_file_map)``.
    """
    d = Path(version_dir)
    deps = ingest.parse_deps_rsf(_read(d / "deps.rsf"), d / "deps.rsf")
    ifaces = ingest.parse_interfaces(_read(d / "interfaces.rsf"), d / "interfaces.rsf")
    explicit = ingest.parse_entity_file_map(_read(d / "files.rsf"), source=d / "files.rsf")
    entities = set(ifaces) | set(explicit) | {e for pair in deps for e in pair}
    efm = ingest.parse_entity_file_map(_read(d / "files.rsf"), entities, source=d / "files.rsf")
    if view_kind == "PKG":
        view = recover_pkg(deps, entities, ifaces, system=system, version=version,
                           file_map=efm)
        topic_file = d / "topics.tsv"
    else:
        clusters = ingest.parse_cluster_map(_read(d / "clusters.rsf"), d / "clusters.rsf")
        view = apply_cluster_map(deps, clusters, entities, ifaces, system=system,
                                 version=version, view_kind=view_kind, file_map=efm)
        topic_file = d / f"topics.{view_kind.lower()}.tsv"
    topics = ingest.parse_topics_tsv(_read(topic_file), topic_file)
    if topics:
        view = attach_concerns(view, topics)
    couplings = ingest.parse_duplicates(_read(d / "dups.rsf"), d / "dups.rsf")
    couplings += cochange_couplings(commits, efm, min_support, max_commit_files)
    return attach_couplings(view, couplings), efm


def versions_of(system_dir) -> list:
    system_dir = Path(system_dir)
    manifest = system_dir.parent / "manifest.json"
    if manifest.exists():
        for s in json.loads(manifest.read_text())["systems"]:
            if s["name"] == system_dir.name:
                return [v["version"] for v in s["versions"]]
    return sorted(p.name for p in system_dir.iterdir() if p.is_dir())


def analyze_system(system_dir, view_kind="PKG", config: SmellConfig = SmellConfig()):
    """Detect smells in every version and build the unlabeled dataset.

    Returns ``(per_version, rows)`` with ``per_version`` a list of
    ``(view, report, entity_file_map)``.
    """
    system_dir = Path(system_dir)
    commits = ingest.parse_git_log(_read(system_dir / "gitlog.txt"), system_dir / "gitlog.txt")
    issues = ingest.filter_fixed(
        ingest.parse_issues(_read(system_dir / "issues.json") or "[]", system_dir / "issues.json"))
    per_version = []
    for version in versions_of(system_dir):
        view, efm = load_view(system_dir / version, system_dir.name, version, commits, view_kind)
        per_version.append((view, detect_all(view, config), efm))
    return per_version, build_dataset(per_version, issues, commits)


def label_rows(rows) -> list:
    issue_labels = pareto_label([r.issue_count for r in rows])
    change_labels = pareto_label([r.change_count for r in rows])
    return [r.with_labels(i, c) for r, i, c in zip(rows, issue_labels, change_labels)]


def labeled_dataset(rows, kind="issue", system="") -> LabeledDataset:
    labels = [r.issue_label if kind == "issue" else r.change_label for r in rows]
    return LabeledDataset(feature_matrix(rows), encode_labels(labels), kind,
                          {"systems": [system] if system else [], "balanced": False})


def balance(ds: LabeledDataset, seed=0, factors=None, k=5) -> LabeledDataset:
    X, y = smote(ds.X, ds.y, factors, k, seed)
    prov = dict(ds.provenance, balanced=True, seed=seed)
    return LabeledDataset(X, y, ds.label_kind, prov)


def class_sizes(y) -> list:
    return np.bincount(np.asarray(y), minlength=3).tolist()
