import random
from itertools import combinations

import pytest

from archsmells.coupling import cochange_couplings, cochange_support
from archsmells.ingest import Commit
from archsmells.model import Coupling

EFM = {"A": "A.java", "B": "B.java", "C": "C.java"}


def test_two_commits_one_coupling():
    commits = [Commit("1", "d", ("A.java", "B.java")), Commit("2", "d", ("B.java", "A.java"))]
    assert cochange_couplings(commits, EFM, min_support=2) == [Coupling("A", "B", "cochange", 2)]


def test_bulk_commit_ignored():
    efm = {f"E{i}": f"f{i}.java" for i in range(150)}
    commits = [Commit("bulk", "d", tuple(efm.values()))] * 1
    assert cochange_couplings(commits, efm, min_support=1, max_commit_files=100) == []


def test_unmapped_files_ignored():
    commits = [Commit("1", "d", ("A.java", "README.md", "C.java"))] * 2
    commits = [Commit(str(i), "d", c.changed_files) for i, c in enumerate(commits)]
    assert cochange_couplings(commits, EFM) == [Coupling("A", "C", "cochange", 2)]


def _commits(seed, n=50):
    rng = random.Random(seed)
    files = [f"f{i}.java" for i in range(12)]
    return [Commit(f"c{i}", "d", tuple(rng.sample(files, rng.randint(0, 6))))
            for i in range(n)]


@pytest.mark.parametrize("seed", range(10))
def test_support_matches_pair_oracle(seed):
    efm = {f"E{i}": f"f{i}.java" for i in range(12)}
    efm["E0$inner"] = "f0.java"   # two entities sharing one file
    commits = _commits(seed)
    support = cochange_support(commits, efm, max_commit_files=5)
    oracle = {}
    ents = sorted(efm)
    for c in commits:
        if len(c.changed_files) > 5:
            continue
        for a, b in combinations(ents, 2):
            if efm[a] in c.changed_files and efm[b] in c.changed_files:
                oracle[(a, b)] = oracle.get((a, b), 0) + 1
    assert dict(support) == oracle


@pytest.mark.parametrize("seed", range(5))
def test_order_symmetry_and_monotone_support(seed):
    efm = {f"E{i}": f"f{i}.java" for i in range(12)}
    commits = _commits(seed)
    base = cochange_couplings(commits, efm, min_support=2)
    reversed_files = [Commit(c.hash, c.author_date, c.changed_files[::-1]) for c in commits]
    assert cochange_couplings(reversed_files, efm, min_support=2) == base
    assert cochange_couplings(commits[::-1], efm, min_support=2) == base
    higher = cochange_couplings(commits, efm, min_support=4)
    assert {(c.a, c.b) for c in higher} <= {(c.a, c.b) for c in base}
    assert all(c.a < c.b for c in base)
