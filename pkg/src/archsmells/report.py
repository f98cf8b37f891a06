"""Text tables and rankings."""
from __future__ import annotations

import re
from dataclasses import dataclass

from .dataset import smell_files
from .model import SMELL_TYPES
from .smells import smell_counts


@dataclass(frozen=True)
class SmellyFile:
    file: str
    versions_involved: int
    total_smells: int
    per_version: dict


def long_lived_smelly_files(per_version, top_n: int | None = None) -> list:
    """Rank files by (#versions with any smell, total instance involvements).

    ``per_version`` is a sequence of ``(view, report, entity_file_map)``.
    """
    per_file = {}
    for view, report, efm in per_version:
        for inst in report.instances:
            for f in smell_files(inst, view, efm):
                counts = per_file.setdefault(f, {})
                counts[view.version] = counts.get(view.version, 0) + 1
    ranked = sorted(
        (SmellyFile(f, len(c), sum(c.values()), c) for f, c in per_file.items()),
        key=lambda s: (-s.versions_involved, -s.total_smells, s.file))
    return ranked if top_n is None else ranked[:top_n]


def render_smell_summary(reports) -> str:
    header = ["system", "version", "view"] + list(SMELL_TYPES)
    rows = [[r.system, r.version, r.view_kind] + [str(n) for n in smell_counts(r).values()]
            for r in reports]
    return _align([header] + rows)


def render_long_lived(ranked) -> str:
    rows = [["rank", "file", "versions", "smells"]]
    rows += [[str(i), s.file, str(s.versions_involved), str(s.total_smells)]
             for i, s in enumerate(ranked, start=1)]
    return _align(rows)


def _align(rows) -> str:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return "".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() + "\n"
                   for r in rows)


def _pct(x) -> str:
    return f"{100 * x:.1f}%"


def render_eval_table(results) -> str:
    """``{(system, view): EvalResult}`` -> aligned table with an Average row.

    Systems and views appear in first-seen order; each view gets a
    precision and a recall column.
    """
    systems, views = [], []
    for system, view in results:
        if system not in systems:
            systems.append(system)
        if view not in views:
            views.append(view)
    header = ["System"]
    for v in views:
        header += [f"{v} Precision", f"{v} Recall"]
    rows = [header]
    for s in systems:
        row = [s]
        for v in views:
            r = results.get((s, v))
            row += [_pct(r.macro_precision), _pct(r.macro_recall)] if r else ["-", "-"]
        rows.append(row)
    if systems:
        avg = ["Average"]
        for v in views:
            cells = [results[(s, v)] for s in systems if (s, v) in results]
            avg += [_pct(sum(c.macro_precision for c in cells) / len(cells)),
                    _pct(sum(c.macro_recall for c in cells) / len(cells))]
        rows.append(avg)
    return _align(rows)


def parse_eval_table(text: str) -> dict:
    """Inverse of :func:`render_eval_table`: ``{(system, view): (precision, recall)}``
    as fractions (Average row excluded)."""
    lines = [l for l in text.splitlines() if l.strip()]
    header = re.split(r"\s{2,}", lines[0].strip())
    views = [h[:-len(" Precision")] for h in header[1::2]]
    out = {}
    for line in lines[1:]:
        cells = re.split(r"\s{2,}", line.strip())
        if cells[0] == "Average":
            continue
        for i, v in enumerate(views):
            p, r = cells[1 + 2 * i], cells[2 + 2 * i]
            if p != "-":
                out[(cells[0], v)] = (float(p[:-1]) / 100, float(r[:-1]) / 100)
    return out
