"""Detectors for the eleven architectural smells.

Fence-based detectors compare strictly against inner-fence thresholds
computed over the whole component population of one view, so a constant
population never produces a smell.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import ConcernDataError
from .model import (
    DIRECTIONS, SMELL_TYPES, ArchitectureView, SmellInstance, _all_link_counts,
    component_graph,
)
from .stats import get_high_threshold, get_low_threshold

SD_NOTE = ("SD: distinctness is checked at component level (c1 != c2), "
           "which subsumes the entity-level e1 != e2 check")


@dataclass(frozen=True)
class SmellConfig:
    th_sd: int = 2
    min_cycle_size: int = 3
    # documented constant: every threshold comparison is strict
    strict_comparisons: bool = field(default=True, init=False)

    def __post_init__(self):
        if self.th_sd < 2:
            raise ValueError("th_sd must be >= 2")
        if self.min_cycle_size < 2:
            raise ValueError("min_cycle_size must be >= 2")


@dataclass
class SmellReport:
    system: str
    version: str
    view_kind: str
    instances: list
    thresholds: dict
    skipped: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def view_ref(self):
        return (self.system, self.version, self.view_kind)

    def by_type(self, smell_type) -> list:
        return [i for i in self.instances if i.smell_type == smell_type]

    def to_dict(self) -> dict:
        return {
            "system": self.system,
            "version": self.version,
            "view": self.view_kind,
            "thresholds": self.thresholds,
            "skipped": list(self.skipped),
            "notes": list(self.notes),
            "instances": [i.to_dict() for i in self.instances],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d) -> "SmellReport":
        return cls(d["system"], d["version"], d["view"],
                   [SmellInstance.from_dict(i) for i in d["instances"]],
                   d.get("thresholds", {}), list(d.get("skipped", ())),
                   list(d.get("notes", ())))

    @classmethod
    def from_json(cls, text) -> "SmellReport":
        return cls.from_dict(json.loads(text))


# ------------------------------------------------------------ concern smells

def _concerns(view, comp):
    if not comp.concerns:
        raise ConcernDataError(f"component {comp.id} has no concern distribution")
    return comp.concerns


def _prevalent_concerns(view, thresholds=None):
    """Per component: its ``th_{z_c}`` and the topics whose probability exceeds it."""
    out = {}
    zc = {}
    for comp in view.components:
        dist = _concerns(view, comp)
        th = get_high_threshold(dist.values())
        zc[comp.id] = th
        out[comp.id] = {z for z, p in dist.items() if p > th}
    if thresholds is not None:
        thresholds["th_zc"] = zc
    return out


def detect_spf(view: ArchitectureView, thresholds: dict | None = None) -> dict:
    """Scattered parasitic functionality: ``{topic: set(components)}``."""
    if not view.topics:
        return {}
    prevalent = _prevalent_concerns(view, thresholds)
    concern_counts = dict.fromkeys(view.topics, 0)
    for topics in prevalent.values():
        for z in topics:
            concern_counts[z] = concern_counts.get(z, 0) + 1
    th_spf = get_high_threshold(concern_counts.values())
    if thresholds is not None:
        thresholds["th_spf"] = th_spf
    smells = {}
    for z in sorted(concern_counts):
        if concern_counts[z] > th_spf:
            smells[z] = {c for c, topics in prevalent.items() if z in topics}
    return smells


def detect_co(view: ArchitectureView, thresholds: dict | None = None) -> set:
    """Concern overload: components with an outlying number of prevalent concerns."""
    if not view.topics:
        return set()
    prevalent = _prevalent_concerns(view, thresholds)
    counts = {c: len(t) for c, t in prevalent.items()}
    th_co = get_high_threshold(counts.values())
    if thresholds is not None:
        thresholds["th_co"] = th_co
    return {c for c, n in counts.items() if n > th_co}


# --------------------------------------------------------- dependency smells

def strongly_connected_components(graph: dict) -> list:
    """Tarjan's algorithm, iterative. ``graph`` maps node -> iterable of successors."""
    index = {}
    lowlink = {}
    on_stack = set()
    stack = []
    result = []
    counter = 0
    for root in sorted(graph):
        if root in index:
            continue
        work = [(root, iter(sorted(graph[root])))]
        index[root] = lowlink[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, succ = work[-1]
            advanced = False
            for w in succ:
                if w not in index:
                    index[w] = lowlink[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(sorted(graph.get(w, ())))))
                    advanced = True
                    break
                if w in on_stack:
                    lowlink[v] = min(lowlink[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                lowlink[u] = min(lowlink[u], lowlink[v])
            if lowlink[v] == index[v]:
                scc = set()
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    scc.add(w)
                    if w == v:
                        break
                result.append(scc)
    return result


def detect_dc(view: ArchitectureView, config: SmellConfig = SmellConfig()) -> list:
    """Dependency cycles: SCCs of the component graph with at least
    ``config.min_cycle_size`` members, as sorted tuples ordered by smallest member."""
    sccs = strongly_connected_components(component_graph(view))
    cycles = [tuple(sorted(s)) for s in sccs if len(s) >= config.min_cycle_size]
    return sorted(cycles)


def detect_lo(view: ArchitectureView, thresholds: dict | None = None) -> set:
    """Link overload: ``{(component, direction)}``."""
    counts = _all_link_counts(view)
    th_lo = {}
    smells = set()
    if not counts:
        return smells
    for d in DIRECTIONS:
        th_lo[d] = get_high_threshold(c[d] for c in counts.values())
    for comp, c in counts.items():
        for d in DIRECTIONS:
            if c[d] > th_lo[d]:
                smells.add((comp, d))
    if thresholds is not None:
        thresholds["th_lo"] = th_lo
    return smells


# ---------------------------------------------------------- interface smells

def detect_ui_uc(view: ArchitectureView) -> tuple[set, set]:
    """Unused interfaces ``{(component, entity)}`` and unused components ``{component}``.

    Any incident link, intra-component included, counts as usage.
    """
    ind, outd = view.in_degree, view.out_degree
    ui, uc = set(), set()
    for comp in view.components:
        interfaced = [e for e in comp.entity_ids if view.entity[e].interface_count > 0]
        unused = [e for e in interfaced if ind[e] + outd[e] == 0]
        ui.update((comp.id, e) for e in unused)
        if interfaced and len(unused) == len(interfaced):
            uc.add(comp.id)
    return ui, uc


def detect_sd(view: ArchitectureView, config: SmellConfig = SmellConfig()) -> set:
    """Sloppy delegation: ``{((c1, e1), (c2, e2))}`` for each offending link e1 -> e2."""
    parent = view.parent
    ind, outd = view.in_degree, view.out_degree
    smells = set()
    for l in view.links:
        c1, c2 = parent[l.src], parent[l.dst]
        if c1 != c2 and outd[l.dst] == 0 and ind[l.dst] < config.th_sd:
            smells.add(((c1, l.src), (c2, l.dst)))
    return smells


def interface_totals(view: ArchitectureView) -> dict:
    return {c.id: sum(view.entity[e].interface_count for e in c.entity_ids)
            for c in view.components}


def detect_fo_ls(view: ArchitectureView, thresholds: dict | None = None) -> tuple[set, set]:
    """Functionality overload and Lego syndrome components."""
    totals = interface_totals(view)
    if not totals:
        return set(), set()
    th_fo = get_high_threshold(totals.values())
    th_ls = get_low_threshold(totals.values())
    if thresholds is not None:
        thresholds["th_fo"] = th_fo
        thresholds["th_ls"] = th_ls
    fo, ls = set(), set()
    for comp, n in totals.items():
        if n > th_fo:
            fo.add(comp)
        elif n < th_ls:
            ls.add(comp)
    return fo, ls


# ----------------------------------------------------------- coupling smells

def coupling_totals(view: ArchitectureView) -> tuple[dict, dict]:
    """Per component, summed strength of duplicate / co-change couplings over
    its entities (a coupling inside one component counts for both ends)."""
    per_entity = {"duplicate": dict.fromkeys(view.entity, 0),
                  "cochange": dict.fromkeys(view.entity, 0)}
    for cp in view.couplings:
        table = per_entity[cp.kind]
        table[cp.a] += cp.strength
        table[cp.b] += cp.strength
    num_du, num_co = {}, {}
    for comp in view.components:
        num_du[comp.id] = sum(per_entity["duplicate"][e] for e in comp.entity_ids)
        num_co[comp.id] = sum(per_entity["cochange"][e] for e in comp.entity_ids)
    return num_du, num_co


def detect_df_cc(view: ArchitectureView, thresholds: dict | None = None) -> tuple[set, set]:
    """Duplicate functionality and co-change coupling components."""
    num_du, num_co = coupling_totals(view)
    if not num_du:
        return set(), set()
    th_df = get_high_threshold(num_du.values())
    th_cc = get_high_threshold(num_co.values())
    if thresholds is not None:
        thresholds["th_df"] = th_df
        thresholds["th_cc"] = th_cc
    df = {c for c, n in num_du.items() if n > th_df}
    cc = {c for c, n in num_co.items() if n > th_cc}
    return df, cc


# ------------------------------------------------------------------ all

def detect_all(view: ArchitectureView, config: SmellConfig = SmellConfig()) -> SmellReport:
    thresholds = {}
    instances = []
    skipped = []

    if view.has_concerns:
        for z, comps in detect_spf(view, thresholds).items():
            instances.append(SmellInstance("SPF", tuple(sorted(comps)), (), {"concern": z}))
        for c in detect_co(view, thresholds):
            instances.append(SmellInstance("CO", (c,)))
    else:
        skipped += ["SPF", "CO"]

    for cycle in detect_dc(view, config):
        instances.append(SmellInstance("DC", cycle))
    for c, d in detect_lo(view, thresholds):
        instances.append(SmellInstance("LO", (c,), (), {"direction": d}))

    ui, uc = detect_ui_uc(view)
    for c, e in ui:
        instances.append(SmellInstance("UI", (c,), (e,)))
    for c in uc:
        instances.append(SmellInstance("UC", (c,)))

    for (c1, e1), (c2, e2) in detect_sd(view, config):
        instances.append(SmellInstance("SD", (c1, c2), (e1, e2), {"src": e1, "dst": e2}))

    fo, ls = detect_fo_ls(view, thresholds)
    for c in fo:
        instances.append(SmellInstance("FO", (c,)))
    for c in ls:
        instances.append(SmellInstance("LS", (c,)))

    df, cc = detect_df_cc(view, thresholds)
    for c in df:
        instances.append(SmellInstance("DF", (c,)))
    for c in cc:
        instances.append(SmellInstance("CC", (c,)))

    instances.sort(key=SmellInstance.sort_key)
    return SmellReport(view.system, view.version, view.view_kind, instances,
                       thresholds, skipped, [SD_NOTE])


def smell_counts(report: SmellReport) -> dict:
    counts = dict.fromkeys(SMELL_TYPES, 0)
    for inst in report.instances:
        counts[inst.smell_type] += 1
    return counts
