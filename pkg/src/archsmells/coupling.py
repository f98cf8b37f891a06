"""Co-change (logical) coupling extraction from commit history."""
from __future__ import annotations

from collections import Counter
from itertools import combinations

from .model import Coupling


def files_to_entities(entity_file_map) -> dict:
    out = {}
    for entity, path in entity_file_map.items():
        out.setdefault(path, set()).add(entity)
    return out


def cochange_support(commits, entity_file_map, max_commit_files: int = 100) -> Counter:
    """Joint-commit count for every unordered entity pair ``(a, b)``, ``a < b``."""
    if max_commit_files < 2:
        raise ValueError("max_commit_files must be >= 2")
    by_file = files_to_entities(entity_file_map)
    support = Counter()
    for commit in commits:
        mapped = [f for f in commit.changed_files if f in by_file]
        if len(mapped) > max_commit_files:
            continue
        entities = sorted(set().union(*(by_file[f] for f in mapped)))
        support.update(combinations(entities, 2))
    return support


def cochange_couplings(commits, entity_file_map, min_support: int = 2,
                       max_commit_files: int = 100) -> list:
    if min_support < 1:
        raise ValueError("min_support must be >= 1")
    support = cochange_support(commits, entity_file_map, max_commit_files)
    return [Coupling(a, b, "cochange", n)
            for (a, b), n in sorted(support.items()) if n >= min_support]
