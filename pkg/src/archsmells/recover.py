"""Building architecture views from facts."""
from __future__ import annotations

import logging

from .errors import CoverageError, MalformedViewError
from .model import ArchitectureView, Component, Coupling, Entity, Link

log = logging.getLogger(__name__)

DEFAULT_PACKAGE = "(default)"


def _entities(deps, entities, interface_counts, file_map):
    ids = set(entities or ())
    for a, b in deps:
        ids.add(a)
        ids.add(b)
    interface_counts = interface_counts or {}
    file_map = file_map or {}
    return [Entity(e, int(interface_counts.get(e, 0)), file_map.get(e)) for e in sorted(ids)]


def package_of(entity_id: str, depth: int | None = None) -> str:
    if "." not in entity_id:
        return DEFAULT_PACKAGE
    segments = entity_id.split(".")[:-1]
    if depth is not None:
        segments = segments[:depth]
    return ".".join(segments)


def _build(system, version, kind, ents, assignment, deps):
    members = {}
    for e in ents:
        members.setdefault(assignment[e.id], set()).add(e.id)
    comps = tuple(Component(c, frozenset(m)) for c, m in members.items())
    return ArchitectureView(system, version, kind, comps, tuple(ents),
                            tuple(Link(a, b) for a, b in deps))


def recover_pkg(deps, entities=(), interface_counts=None, depth: int | None = None,
                system: str = "", version: str = "", file_map=None) -> ArchitectureView:
    """PKG view: every entity goes to its (optionally truncated) package."""
    if depth is not None and depth < 1:
        raise ValueError("depth must be >= 1")
    ents = _entities(deps, entities, interface_counts, file_map)
    assignment = {e.id: package_of(e.id, depth) for e in ents}
    return _build(system, version, "PKG", ents, assignment, deps)


def apply_cluster_map(deps, cluster_map, entities=(), interface_counts=None,
                      system: str = "", version: str = "", view_kind: str = "ACDC",
                      file_map=None) -> ArchitectureView:
    """View whose components come from an externally recovered cluster map."""
    assignment = {}
    for comp, members in cluster_map.items():
        for e in members:
            if e in assignment and assignment[e] != comp:
                raise MalformedViewError(f"entity {e} in both {assignment[e]} and {comp}")
            assignment[e] = comp
    ents = _entities(deps, set(entities) | set(assignment), interface_counts, file_map)
    missing = [e.id for e in ents if e.id not in assignment]
    if missing:
        raise CoverageError(missing)
    return _build(system, version, view_kind, ents, assignment, deps)


def attach_concerns(view: ArchitectureView, topic_map) -> ArchitectureView:
    unknown = sorted(set(topic_map) - set(view.component))
    if unknown:
        raise MalformedViewError(f"topic map names unknown components: {unknown}")
    comps = tuple(
        Component(c.id, c.entity_ids, topic_map[c.id]) if c.id in topic_map else c
        for c in view.components)
    topics = set(view.topics)
    for dist in topic_map.values():
        topics.update(dist)
    return view.replace(components=comps, topics=frozenset(topics))


def split_couplings(view: ArchitectureView, couplings) -> tuple[list, list]:
    """Partition couplings into those whose endpoints are both in ``view``
    and those that are not."""
    known = view.entity
    kept, dropped = [], []
    for cp in couplings:
        (kept if cp.a in known and cp.b in known else dropped).append(cp)
    return kept, dropped


def attach_couplings(view: ArchitectureView, couplings) -> ArchitectureView:
    kept, dropped = split_couplings(view, couplings)
    if dropped:
        log.warning("dropped %d coupling(s) with endpoints outside %s %s",
                    len(dropped), view.system, view.version)
    merged = {}
    for cp in list(view.couplings) + kept:
        key = (cp.a, cp.b, cp.kind)
        merged[key] = merged.get(key, 0) + cp.strength
    return view.replace(couplings=tuple(Coupling(a, b, k, s)
                                        for (a, b, k), s in sorted(merged.items())))
