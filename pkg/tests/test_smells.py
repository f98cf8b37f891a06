import random

import pytest

from archsmells.errors import ConcernDataError
from archsmells.model import ArchitectureView, Component, Coupling, Entity, SMELL_TYPES
from archsmells.smells import (SmellConfig, SmellReport, detect_all, detect_co, detect_dc,
                               detect_df_cc, detect_fo_ls, detect_lo, detect_sd, detect_spf,
                               detect_ui_uc, smell_counts)

from oracles import (co_oracle, df_cc_oracle, fo_ls_oracle, lo_oracle, random_digraph,
                     random_view, scc_oracle, sd_oracle, spf_oracle, ui_uc_oracle,
                     view_from_digraph)

SEEDS = range(120)


def simple_view(groups, links=(), interfaces=None, couplings=(), concerns=None, topics=()):
    """``groups``: {component: [entities]}."""
    interfaces = interfaces or {}
    ents = [Entity(e, interfaces.get(e, 0)) for es in groups.values() for e in es]
    comps = [Component(c, es, (concerns or {}).get(c)) for c, es in groups.items()]
    return ArchitectureView("s", "1", "custom", comps, ents, links, couplings, topics)


# ------------------------------------------------------------------ SPF / CO

def test_spf_without_topics():
    assert detect_spf(simple_view({"C1": ["a"]})) == {}


def test_spf_identical_distributions():
    dist = {"t0": 0.6, "t1": 0.4}
    view = simple_view({f"C{i}": [f"e{i}"] for i in range(4)},
                       concerns={f"C{i}": dist for i in range(4)}, topics={"t0", "t1"})
    assert detect_spf(view) == {}


def test_spf_missing_distribution_names_component():
    view = simple_view({"C1": ["a"], "C2": ["b"]}, concerns={"C1": {"t0": 1.0}}, topics={"t0"})
    with pytest.raises(ConcernDataError, match="C2"):
        detect_spf(view)


def test_co_constant_and_single():
    dist = {"t0": 0.7, "t1": 0.1, "t2": 0.1, "t3": 0.1}
    view = simple_view({f"C{i}": [f"e{i}"] for i in range(5)},
                       concerns={f"C{i}": dist for i in range(5)}, topics=dist)
    assert detect_co(view) == set()
    one = simple_view({"C": ["a"]}, concerns={"C": dist}, topics=dist)
    assert detect_co(one) == set()


@pytest.mark.parametrize("seed", range(40))
def test_spf_six_by_five_oracle(seed):
    rng = random.Random(seed)
    topics = [f"z{i}" for i in range(5)]
    concerns = {}
    for i in range(6):
        w = [rng.random() ** 4 for _ in topics]
        concerns[f"C{i}"] = {t: x / sum(w) for t, x in zip(topics, w)}
    view = simple_view({f"C{i}": [f"e{i}"] for i in range(6)}, concerns=concerns, topics=topics)
    assert detect_spf(view) == spf_oracle(view)


# ----------------------------------------------------------------------- DC

def test_dc_three_cycle():
    view = view_from_digraph(["A", "B", "C"], {("A", "B"), ("B", "C"), ("C", "A")})
    assert detect_dc(view, SmellConfig(min_cycle_size=3)) == [("A", "B", "C")]


def test_dc_dag():
    nodes = [f"N{i}" for i in range(8)]
    edges = {(a, b) for a in nodes for b in nodes if a < b}
    assert detect_dc(view_from_digraph(nodes, edges)) == []


def test_dc_two_cycle_needs_min_size_two():
    view = view_from_digraph(["A", "B"], {("A", "B"), ("B", "A")})
    assert detect_dc(view) == []
    assert detect_dc(view, SmellConfig(min_cycle_size=2)) == [("A", "B")]


@pytest.mark.parametrize("min_size", [2, 3])
def test_dc_matches_reachability_oracle(min_size):
    for seed in range(200):
        nodes, edges = random_digraph(seed)
        got = detect_dc(view_from_digraph(nodes, edges), SmellConfig(min_cycle_size=min_size))
        assert got == scc_oracle(nodes, edges, min_size), seed


def test_dc_deep_chain_no_recursion_limit():
    n = 3000
    nodes = [f"N{i:05d}" for i in range(n)]
    edges = {(nodes[i], nodes[i + 1]) for i in range(n - 1)} | {(nodes[-1], nodes[0])}
    assert detect_dc(view_from_digraph(nodes, edges)) == [tuple(nodes)]


# ----------------------------------------------------------------------- LO

def test_lo_hand_evaluated():
    # both-counts: hub 20, every other component 1 -> fence 1
    groups = {"hub": ["h"]} | {f"c{i:02d}": [f"e{i}"] for i in range(20)}
    links = [(f"e{i}", "h") for i in range(20)]
    view = simple_view(groups, links)
    assert detect_lo(view) == {("hub", "in"), ("hub", "both")}


def test_lo_equal_counts():
    groups = {f"C{i}": [f"e{i}"] for i in range(4)}
    links = [("e0", "e1"), ("e1", "e2"), ("e2", "e3"), ("e3", "e0")]
    assert detect_lo(simple_view(groups, links)) == set()


# -------------------------------------------------------------------- UI/UC

def test_ui_unlinked_interface():
    view = simple_view({"C1": ["a", "b"], "C2": ["c"]}, [("b", "c")], {"a": 3, "b": 1, "c": 1})
    ui, uc = detect_ui_uc(view)
    assert ui == {("C1", "a")}
    assert uc == set()


def test_uc_all_interfaces_unused():
    view = simple_view({"C1": ["a", "b"], "C2": ["c", "d"]}, [("c", "d")],
                       {"a": 2, "b": 1, "c": 1})
    ui, uc = detect_ui_uc(view)
    assert uc == {"C1"}
    assert ui == {("C1", "a"), ("C1", "b")}


def test_uc_requires_an_interfaced_entity():
    view = simple_view({"C1": ["a"], "C2": ["b"]})
    assert detect_ui_uc(view) == (set(), set())


# ----------------------------------------------------------------------- SD

def test_sd_single_instance():
    view = simple_view({"C1": ["e1"], "C2": ["e2"]}, [("e1", "e2")])
    assert detect_sd(view, SmellConfig(th_sd=2)) == {(("C1", "e1"), ("C2", "e2"))}


def test_sd_boundary_is_strict():
    view = simple_view({"C1": ["e1", "e0"], "C2": ["e2"]}, [("e1", "e2"), ("e0", "e2")])
    assert detect_sd(view, SmellConfig(th_sd=2)) == set()


def test_sd_threshold_must_be_at_least_two():
    with pytest.raises(ValueError):
        SmellConfig(th_sd=1)


def test_sd_intra_component_not_reported():
    view = simple_view({"C1": ["e1", "e2"]}, [("e1", "e2")])
    assert detect_sd(view) == set()


# -------------------------------------------------------------------- FO/LS

def _totals_view(totals):
    groups = {f"c{i + 1}": [f"e{i}"] for i in range(len(totals))}
    return simple_view(groups, interfaces={f"e{i}": n for i, n in enumerate(totals)})


def test_fo_hand_evaluated():
    assert detect_fo_ls(_totals_view([10, 10, 10, 10, 100])) == ({"c5"}, set())


def test_ls_hand_evaluated():
    assert detect_fo_ls(_totals_view([1, 10, 10, 10, 10])) == (set(), {"c1"})


def test_fo_ls_equal_totals():
    assert detect_fo_ls(_totals_view([4, 4, 4])) == (set(), set())


# -------------------------------------------------------------------- DF/CC

def test_no_couplings():
    assert detect_df_cc(_totals_view([1, 2, 3])) == (set(), set())


def test_cc_hand_evaluated():
    groups = {f"c{i + 1}": [f"e{i}", f"f{i}"] for i in range(5)}
    view = simple_view(groups, couplings=[Coupling.make("e4", "f4", "cochange", 9)])
    assert detect_df_cc(view) == (set(), {"c5"})


# ------------------------------------------------------------------- oracles

@pytest.mark.parametrize("seed", SEEDS)
def test_detectors_match_oracles(seed):
    view = random_view(seed)
    assert detect_spf(view) == spf_oracle(view)
    assert detect_co(view) == co_oracle(view)
    assert detect_lo(view) == lo_oracle(view)
    assert detect_ui_uc(view) == ui_uc_oracle(view)
    for th in (2, 3, 4):
        assert detect_sd(view, SmellConfig(th_sd=th)) == sd_oracle(view, th)
    assert detect_fo_ls(view) == fo_ls_oracle(view)
    assert detect_df_cc(view) == df_cc_oracle(view)


@pytest.mark.parametrize("seed", range(40))
def test_fo_ls_disjoint(seed):
    fo, ls = detect_fo_ls(random_view(seed))
    assert not fo & ls


@pytest.mark.parametrize("seed", range(40))
def test_adding_links_never_creates_ui(seed):
    view = random_view(seed)
    rng = random.Random(seed)
    ids = [e.id for e in view.entities]
    extra = [(rng.choice(ids), rng.choice(ids)) for _ in range(10)]
    extra = [l for l in extra if l[0] != l[1]]
    more = view.replace(links=view.links + tuple(extra))
    assert detect_ui_uc(more)[0] <= detect_ui_uc(view)[0]


def _rename(view, f):
    comps = [Component(f(c.id), {f(e) for e in c.entity_ids}, c.concerns)
             for c in view.components]
    ents = [Entity(f(e.id), e.interface_count) for e in view.entities]
    links = [(f(l.src), f(l.dst)) for l in view.links]
    cps = [Coupling.make(f(cp.a), f(cp.b), cp.kind, cp.strength) for cp in view.couplings]
    return ArchitectureView(view.system, view.version, view.view_kind, comps, ents, links, cps,
                            view.topics)


@pytest.mark.parametrize("seed", range(20))
def test_renaming_bijection_commutes(seed):
    view = random_view(seed)
    f = lambda s: "zz_" + s[::-1]  # noqa: E731
    renamed = _rename(view, f)
    assert detect_fo_ls(renamed) == tuple({f(c) for c in s} for s in detect_fo_ls(view))
    assert detect_lo(renamed) == {(f(c), d) for c, d in detect_lo(view)}
    assert detect_sd(renamed) == {((f(a), f(b)), (f(c), f(d)))
                                  for (a, b), (c, d) in detect_sd(view)}
    assert sorted(tuple(sorted(f(c) for c in cyc)) for cyc in detect_dc(view)) == \
        detect_dc(renamed)
    assert detect_df_cc(renamed) == tuple({f(c) for c in s} for s in detect_df_cc(view))
    assert detect_co(renamed) == {f(c) for c in detect_co(view)}


# ---------------------------------------------------------------- detectAll

def eleven_smell_view():
    """Hand-built view that triggers every smell type at least once."""
    groups = {k: [f"{k}.e"] for k in ("A", "B", "C", "H", "U", "S", "Y", "F", "L", "O",
                                        "G1", "G2", "G3", "G4")}
    groups["D"] = ["D.e", "D.f"]
    groups["K"] = ["K.e", "K.f"]
    links = [("A.e", "B.e"), ("B.e", "C.e"), ("C.e", "A.e"),    # DC
             ("S.e", "Y.e")]                                   # SD
    links += [(f"{k}.e", "H.e") for k in ("F", "L", "D", "K", "O", "G1", "G2", "G3", "G4")]
    interfaces = {f"{k}.e": 10 for k in groups}
    interfaces.update({"F.e": 100, "L.e": 1})                  # FO, LS; U.e unused -> UI, UC
    couplings = [Coupling.make("D.e", "D.f", "duplicate", 9),  # DF
                 Coupling.make("K.e", "K.f", "cochange", 9)]   # CC
    topics = [f"t{i}" for i in range(16)]

    def peaked(*hot):
        p = 0.3 if len(hot) > 1 else 0.7
        rest = (1 - p * len(hot)) / (16 - len(hot))
        return {t: (p if t in hot else rest) for t in topics}

    concerns = {k: peaked("t0") for k in ("A", "B", "C", "H", "U", "S", "Y", "F")}  # SPF
    concerns.update({"L": peaked("t4"), "D": peaked("t5"), "K": peaked("t6"),
                     "G1": peaked("t7"), "G2": peaked("t8"), "G3": peaked("t9"),
                     "G4": peaked("t10"), "O": peaked("t1", "t2", "t3")})        # CO
    return simple_view(groups, links, interfaces, couplings, concerns, topics)


def test_detect_all_eleven_kinds():
    view = eleven_smell_view()
    report = detect_all(view)
    counts = smell_counts(report)
    assert all(counts[t] >= 1 for t in SMELL_TYPES), counts
    assert report.skipped == []
    # each group agrees with its oracle
    spf = {i.detail["concern"]: set(i.component_ids) for i in report.by_type("SPF")}
    assert spf == spf_oracle(view) == {"t0": {"A", "B", "C", "H", "U", "S", "Y", "F"}}
    assert {i.component_ids[0] for i in report.by_type("CO")} == co_oracle(view) == {"O"}
    assert [i.component_ids for i in report.by_type("DC")] == [("A", "B", "C")]
    assert {(i.component_ids[0], i.detail["direction"]) for i in report.by_type("LO")} \
        == lo_oracle(view)
    ui, uc = ui_uc_oracle(view)
    assert {(i.component_ids[0], i.entity_ids[0]) for i in report.by_type("UI")} == ui
    assert {i.component_ids[0] for i in report.by_type("UC")} == uc == {"U"}
    assert {(i.component_ids, i.entity_ids) for i in report.by_type("SD")} == \
        {((c1, c2), (e1, e2)) for (c1, e1), (c2, e2) in sd_oracle(view)}
    assert ({i.component_ids[0] for i in report.by_type("FO")},
            {i.component_ids[0] for i in report.by_type("LS")}) == fo_ls_oracle(view) \
        == ({"F"}, {"L"})
    assert ({i.component_ids[0] for i in report.by_type("DF")},
            {i.component_ids[0] for i in report.by_type("CC")}) == df_cc_oracle(view) \
        == ({"D"}, {"K"})


def test_detect_all_without_topics_skips_concern_detectors():
    view = eleven_smell_view()
    bare = view.replace(topics=frozenset(),
                        components=tuple(Component(c.id, c.entity_ids) for c in view.components))
    report = detect_all(bare)
    assert set(report.skipped) == {"SPF", "CO"}
    assert not report.by_type("SPF") and not report.by_type("CO")
    assert report.by_type("DC") and report.by_type("FO")


@pytest.mark.parametrize("seed", range(10))
def test_detect_all_deterministic_and_roundtrips(seed):
    view = random_view(seed)
    a, b = detect_all(view).to_json(), detect_all(random_view(seed)).to_json()
    assert a == b
    assert SmellReport.from_json(a).to_json() == a
