"""Architecture model: entities, components, links, couplings and views.

A view is ``A = (C, L, Cp)``: components partition the entities, links are
directed entity-level dependencies and couplings are undirected
(duplicate or co-change) relations between entities.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Mapping, NamedTuple

from .errors import MalformedViewError

VIEW_KINDS = ("PKG", "ACDC", "ARC", "custom")
COUPLING_KINDS = ("duplicate", "cochange")
SMELL_TYPES = ("SPF", "CO", "DC", "LO", "UI", "UC", "SD", "FO", "LS", "DF", "CC")
DIRECTIONS = ("in", "out", "both")

CONCERN_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Entity:
    id: str
    interface_count: int = 0
    file_path: str | None = None

    def __post_init__(self):
        if not self.id:
            raise MalformedViewError("entity id must be nonempty")
        if self.interface_count < 0:
            raise MalformedViewError(
                f"entity {self.id}: negative interface count {self.interface_count}")


@dataclass(frozen=True, eq=False)
class Component:
    id: str
    entity_ids: frozenset
    concerns: Mapping[str, float] | None = None

    def __post_init__(self):
        object.__setattr__(self, "entity_ids", frozenset(self.entity_ids))
        if not self.entity_ids:
            raise MalformedViewError(f"component {self.id} has no entities")
        if self.concerns is not None:
            concerns = {str(k): float(v) for k, v in self.concerns.items()}
            for topic, p in concerns.items():
                if not 0.0 <= p <= 1.0:
                    raise MalformedViewError(
                        f"component {self.id}: P({topic}) = {p} outside [0, 1]")
            total = sum(concerns.values())
            if concerns and abs(total - 1.0) > CONCERN_TOLERANCE:
                raise MalformedViewError(
                    f"component {self.id}: concern probabilities sum to {total}")
            object.__setattr__(self, "concerns", concerns)

    def __eq__(self, other):
        if not isinstance(other, Component):
            return NotImplemented
        return (self.id, self.entity_ids, self.concerns) == (
            other.id, other.entity_ids, other.concerns)

    __hash__ = None


class Link(NamedTuple):
    src: str
    dst: str


class Coupling(NamedTuple):
    a: str
    b: str
    kind: str
    strength: int

    @classmethod
    def make(cls, a, b, kind, strength=1):
        """Build a coupling with its endpoints in canonical (sorted) order."""
        if a == b:
            raise MalformedViewError(f"coupling endpoints must differ: {a}")
        if kind not in COUPLING_KINDS:
            raise MalformedViewError(f"unknown coupling kind {kind!r}")
        if int(strength) < 1:
            raise MalformedViewError(f"coupling {a}-{b}: strength must be >= 1")
        if b < a:
            a, b = b, a
        return cls(a, b, kind, int(strength))


@dataclass(frozen=True, eq=False)
class ArchitectureView:
    system: str
    version: str
    view_kind: str
    components: tuple
    entities: tuple
    links: tuple = ()
    couplings: tuple = ()
    topics: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.view_kind not in VIEW_KINDS:
            raise MalformedViewError(f"unknown view kind {self.view_kind!r}")
        object.__setattr__(self, "components",
                           tuple(sorted(self.components, key=lambda c: c.id)))
        object.__setattr__(self, "entities",
                           tuple(sorted(self.entities, key=lambda e: e.id)))
        # duplicate links carry no extra information and would inflate counts
        object.__setattr__(self, "links",
                           tuple(sorted({Link(*l) for l in self.links})))
        object.__setattr__(self, "couplings", tuple(sorted(
            Coupling.make(*cp) for cp in self.couplings)))
        object.__setattr__(self, "topics", frozenset(str(t) for t in self.topics))
        self._validate()

    def _validate(self):
        ids = [e.id for e in self.entities]
        if len(set(ids)) != len(ids):
            raise MalformedViewError("duplicate entity ids in view")
        comp_ids = [c.id for c in self.components]
        if len(set(comp_ids)) != len(comp_ids):
            raise MalformedViewError("duplicate component ids in view")
        known = set(ids)
        seen = {}
        for comp in self.components:
            for eid in comp.entity_ids:
                if eid not in known:
                    raise MalformedViewError(
                        f"component {comp.id} references unknown entity {eid}")
                if eid in seen:
                    raise MalformedViewError(
                        f"entity {eid} belongs to both {seen[eid]} and {comp.id}")
                seen[eid] = comp.id
        if len(seen) != len(known):
            orphans = sorted(known - set(seen))
            raise MalformedViewError(f"entities without component: {orphans[:10]}")
        for link in self.links:
            for end in link:
                if end not in known:
                    raise MalformedViewError(f"link endpoint {end} is not an entity of the view")
        for cp in self.couplings:
            for end in (cp.a, cp.b):
                if end not in known:
                    raise MalformedViewError(f"coupling endpoint {end} is not an entity of the view")

    def __eq__(self, other):
        if not isinstance(other, ArchitectureView):
            return NotImplemented
        return view_to_dict(self) == view_to_dict(other)

    __hash__ = None

    @cached_property
    def parent(self) -> dict:
        """Entity id -> component id."""
        return {eid: c.id for c in self.components for eid in c.entity_ids}

    @cached_property
    def entity(self) -> dict:
        return {e.id: e for e in self.entities}

    @cached_property
    def component(self) -> dict:
        return {c.id: c for c in self.components}

    @cached_property
    def in_degree(self) -> dict:
        deg = dict.fromkeys(self.entity, 0)
        for l in self.links:
            deg[l.dst] += 1
        return deg

    @cached_property
    def out_degree(self) -> dict:
        deg = dict.fromkeys(self.entity, 0)
        for l in self.links:
            deg[l.src] += 1
        return deg

    @property
    def ref(self) -> tuple:
        return (self.system, self.version, self.view_kind)

    @property
    def has_concerns(self) -> bool:
        return bool(self.topics) and all(c.concerns for c in self.components)

    def replace(self, **changes) -> "ArchitectureView":
        return replace(self, **changes)


@dataclass(frozen=True)
class SmellInstance:
    smell_type: str
    component_ids: tuple
    entity_ids: tuple = ()
    detail: Mapping = field(default_factory=dict, hash=False, compare=True)

    def __post_init__(self):
        if self.smell_type not in SMELL_TYPES:
            raise ValueError(f"unknown smell type {self.smell_type!r}")
        if not self.component_ids:
            raise ValueError("smell instance needs at least one component")
        object.__setattr__(self, "component_ids", tuple(self.component_ids))
        object.__setattr__(self, "entity_ids", tuple(self.entity_ids))
        object.__setattr__(self, "detail", dict(self.detail))

    def sort_key(self):
        return (SMELL_TYPES.index(self.smell_type), self.component_ids,
                self.entity_ids, sorted(self.detail.items()))

    def to_dict(self) -> dict:
        return {"type": self.smell_type, "components": list(self.component_ids),
                "entities": list(self.entity_ids), "detail": dict(self.detail)}

    @classmethod
    def from_dict(cls, d) -> "SmellInstance":
        return cls(d["type"], tuple(d["components"]), tuple(d.get("entities", ())),
                   d.get("detail", {}))


def component_graph(view: ArchitectureView) -> dict:
    """Lift entity links to a component digraph ``{component: set(successors)}``.

    Intra-component links are dropped, so the graph has no self-edges.
    """
    parent = view.parent
    graph = {c.id: set() for c in view.components}
    for l in view.links:
        try:
            a, b = parent[l.src], parent[l.dst]
        except KeyError as exc:
            raise MalformedViewError(f"dangling link endpoint {exc.args[0]}") from None
        if a != b:
            graph[a].add(b)
    return graph


def link_counts(view: ArchitectureView, component_id: str, direction: str = "both") -> int:
    """Number of entity-level links crossing ``component_id``'s boundary."""
    if component_id not in view.component:
        raise KeyError(f"unknown component {component_id!r}")
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}")
    counts = _all_link_counts(view)[component_id]
    return counts[direction]


def _all_link_counts(view):
    cached = view.__dict__.get("_link_counts")
    if cached is not None:
        return cached
    parent = view.parent
    counts = {c.id: {"in": 0, "out": 0, "both": 0} for c in view.components}
    for l in view.links:
        a, b = parent[l.src], parent[l.dst]
        if a == b:
            continue
        counts[a]["out"] += 1
        counts[b]["in"] += 1
    for c in counts.values():
        c["both"] = c["in"] + c["out"]
    view.__dict__["_link_counts"] = counts
    return counts


def all_link_counts(view: ArchitectureView) -> dict:
    """``{component: {"in": n, "out": n, "both": n}}`` over inter-component links."""
    return {k: dict(v) for k, v in _all_link_counts(view).items()}


# ---------------------------------------------------------------- serialization

def view_to_dict(view: ArchitectureView) -> dict:
    return {
        "system": view.system,
        "version": view.version,
        "view": view.view_kind,
        "topics": sorted(view.topics),
        "entities": [
            {"id": e.id, "interfaces": e.interface_count, "file": e.file_path}
            for e in view.entities],
        "components": [
            {"id": c.id, "entities": sorted(c.entity_ids),
             "concerns": None if c.concerns is None else dict(sorted(c.concerns.items()))}
            for c in view.components],
        "links": [list(l) for l in view.links],
        "couplings": [list(cp) for cp in view.couplings],
    }


def view_from_dict(d: Mapping) -> ArchitectureView:
    return ArchitectureView(
        system=d["system"], version=d["version"], view_kind=d["view"],
        components=tuple(Component(c["id"], frozenset(c["entities"]), c.get("concerns"))
                         for c in d["components"]),
        entities=tuple(Entity(e["id"], int(e.get("interfaces", 0)), e.get("file"))
                       for e in d["entities"]),
        links=tuple(Link(*l) for l in d.get("links", ())),
        couplings=tuple(Coupling.make(*cp) for cp in d.get("couplings", ())),
        topics=frozenset(d.get("topics", ())),
    )
