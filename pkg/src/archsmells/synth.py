"""Seeded synthetic corpus generator.

Each system gets several versions of a package-structured code base with
planted smells (a package cycle, a link hub, an interface-heavy package,
unused classes and packages, sloppy delegations, duplicated code, a
co-change hot spot, a scattered and an overloaded concern). Issues are
then drawn per (version, file) with a rate that grows with the smells
actually detected on that file, so smells carry a learnable signal.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import ingest
from .coupling import cochange_couplings
from .dataset import FEATURES, file_smell_flags
from .ingest import Commit, Issue
from .recover import attach_concerns, attach_couplings, recover_pkg
from .smells import SmellConfig, detect_all

# log-rate contribution of each smell to a file's expected issue count
DEFAULT_WEIGHTS = {
    "UI": -1.0, "UC": -1.0, "SD": 0.8, "FO": 2.2, "LS": 1.0, "DF": 1.8, "CC": 2.4,
    "DC": 1.2, "LO": 1.6, "SPF": 1.0, "CO": 2.0,
}
BASE_RATE = 0.04
N_TOPICS = 12


@dataclass
class VersionFacts:
    version: str
    deps: list
    interfaces: dict
    files: dict
    topics: dict
    duplicates: list
    clusters: dict

    def write(self, directory: Path):
        directory.mkdir(parents=True, exist_ok=True)
        (directory / "deps.rsf").write_text(ingest.dump_deps_rsf(self.deps))
        (directory / "interfaces.rsf").write_text(ingest.dump_interfaces(self.interfaces))
        (directory / "files.rsf").write_text(ingest.dump_entity_file_map(self.files))
        (directory / "topics.tsv").write_text(ingest.dump_topics_tsv(self.topics))
        (directory / "dups.rsf").write_text(ingest.dump_couplings(self.duplicates))
        (directory / "clusters.rsf").write_text(ingest.dump_cluster_map(self.clusters))


@dataclass
class SystemCorpus:
    name: str
    versions: list
    commits: list
    issues: list
    manifest: dict = field(default_factory=dict)

    def write(self, root: Path):
        base = Path(root) / self.name
        for v in self.versions:
            v.write(base / v.version)
        (base / "gitlog.txt").write_text(ingest.render_git_log(self.commits))
        (base / "issues.json").write_text(ingest.dump_issues(self.issues))


def _hash(*parts) -> str:
    return hashlib.sha1("|".join(map(str, parts)).encode()).hexdigest()


def _date(day: int) -> str:
    y, d = divmod(day, 360)
    m, d = divmod(d, 30)
    return f"{2010 + y:04d}-{m + 1:02d}-{d + 1:02d}T12:00:00+00:00"


class _Builder:
    """Generates one system's evolving architecture."""

    def __init__(self, name, rng, n_packages, n_files):
        self.name = name
        self.rng = rng
        self.packages = [f"org.{name}.p{i:02d}" for i in range(n_packages)]
        # planted roles
        self.cycle = self.packages[0:3]
        self.hub = self.packages[3]
        self.heavy = self.packages[4]
        self.unused = self.packages[5]
        self.dup_pkg = self.packages[6]
        self.cochange_pkg = self.packages[7]
        self.overloaded = self.packages[8]
        self.lego = self.packages[9]
        self.counter = 0
        self.classes = {}
        # the unused package stays small; the lego package holds one class
        for p in self.packages:
            k = 3 if p == self.unused else 1 if p == self.lego else None
            for _ in range(k or max(3, n_files // n_packages)):
                self._new_class(p)
        while len(self.classes) < n_files:
            self._new_class(self.packages[10 + self.rng.integers(n_packages - 10)])

    def _new_class(self, pkg):
        cid = f"{pkg}.C{self.counter:04d}"
        self.counter += 1
        r = self.rng.random()
        if pkg == self.heavy:
            ifaces = int(self.rng.integers(25, 40))
        elif pkg == self.lego:
            ifaces = 0
        else:
            ifaces = int(self.rng.integers(2, 6))
        # role: normal, orphan (no links, UI) or leaf (sloppy-delegation target)
        role = "normal"
        if pkg == self.unused:
            role = "orphan"
        elif pkg not in self.cycle + [self.hub] and r < 0.06:
            role = "orphan"
        elif pkg not in self.cycle + [self.hub, self.heavy] and r < 0.14:
            role = "leaf"
        self.classes[cid] = {"pkg": pkg, "ifaces": ifaces, "role": role,
                             "targets": None}
        return cid

    def evolve(self):
        rng = self.rng
        ids = sorted(self.classes)
        for cid in ids:
            if rng.random() < 0.02 and self.classes[cid]["pkg"] not in (self.lego, self.unused):
                del self.classes[cid]
        normal_pkgs = [p for p in self.packages if p not in (self.lego, self.unused)]
        for _ in range(int(rng.integers(4, 10))):
            self._new_class(normal_pkgs[rng.integers(len(normal_pkgs))])
        for info in self.classes.values():
            if rng.random() < 0.1:
                info["targets"] = None

    def deps(self):
        rng = self.rng
        by_pkg = {}
        for cid, info in self.classes.items():
            by_pkg.setdefault(info["pkg"], []).append(cid)
        normal = {p: [c for c in by_pkg.get(p, []) if self.classes[c]["role"] == "normal"]
                  for p in self.packages}
        leaves = [c for c, i in self.classes.items() if i["role"] == "leaf"]
        edges = set()
        sources = sorted(c for c, i in self.classes.items() if i["role"] == "normal")
        for cid in sources:
            info = self.classes[cid]
            if info["targets"] is None:
                pkg = info["pkg"]
                targets = []
                same = [c for c in normal[pkg] if c != cid]
                for _ in range(int(rng.integers(1, 3))):
                    if same:
                        targets.append(same[rng.integers(len(same))])
                if pkg in self.cycle:
                    nxt = self.cycle[(self.cycle.index(pkg) + 1) % len(self.cycle)]
                    if normal[nxt]:
                        targets.append(normal[nxt][rng.integers(len(normal[nxt]))])
                if rng.random() < 0.45 and normal[self.hub] and pkg != self.hub:
                    targets.append(normal[self.hub][rng.integers(len(normal[self.hub]))])
                if rng.random() < 0.3:
                    # downward-only dependency keeps the rest of the graph acyclic
                    later = [p for p in self.packages[10:] if p > pkg and normal[p]]
                    if later:
                        q = later[rng.integers(len(later))]
                        targets.append(normal[q][rng.integers(len(normal[q]))])
                info["targets"] = targets
            for t in info["targets"]:
                if t in self.classes:
                    edges.add((cid, t))
        # each leaf is used by exactly one class from another package
        for leaf in sorted(leaves):
            pkg = self.classes[leaf]["pkg"]
            users = [c for c in sources if self.classes[c]["pkg"] != pkg]
            edges.add((users[_stable_index(leaf, len(users))], leaf))
        return sorted(edges)

    def topics(self):
        rng = self.rng
        dists = {}
        pkgs = sorted({i["pkg"] for i in self.classes.values()})
        scattered = set(self.cycle + [self.hub, self.heavy, self.dup_pkg])
        for idx, p in enumerate(pkgs):
            w = rng.random(N_TOPICS) * 0.1 + 0.01
            # scattered-concern packages all peak on topic 0
            main = 0 if p in scattered else 1 + idx % (N_TOPICS - 1)
            w[main] += 1.0
            if p == self.overloaded:
                extra = [t for t in rng.permutation(N_TOPICS - 1) + 1 if t != main][:2]
                w[extra] += 1.0
            w = w / w.sum()
            dists[p] = {f"t{i}": float(x) for i, x in enumerate(w)}
        return dists

    def duplicates(self):
        rng = self.rng
        dups = set()
        dup_members = sorted(c for c, i in self.classes.items() if i["pkg"] == self.dup_pkg)
        others = sorted(c for c, i in self.classes.items() if i["pkg"] != self.dup_pkg)
        for c in dup_members:
            o = others[rng.integers(len(others))]
            dups.add((c, o, int(rng.integers(2, 6))))
        return [ingest.Coupling.make(a, b, "duplicate", n) for a, b, n in sorted(dups)]


def _stable_index(key, n):
    return int(_hash(key), 16) % n


def _file_of(cid):
    return "src/" + ingest.convention_path(cid)


def _clusters(classes, packages):
    # coarse ACDC-like grouping: neighbouring packages merged pairwise
    out = {}
    for cid, info in classes.items():
        i = packages.index(info["pkg"])
        out.setdefault(f"cluster{i // 2:02d}", set()).add(cid)
    return out


def generate_system(name: str, seed: int, n_versions: int = 5, n_files: int = 220,
                    n_packages: int = 20, weights=None) -> SystemCorpus:
    weights = dict(DEFAULT_WEIGHTS if weights is None else weights)
    rng = np.random.default_rng(seed)
    b = _Builder(name, rng, n_packages, n_files)
    versions, commits, issues = [], [], []
    day = 0
    for vi in range(n_versions):
        if vi:
            b.evolve()
        version = f"{1 + vi // 10}.{vi % 10}.0"
        files = {c: _file_of(c) for c in b.classes}
        facts = VersionFacts(version, b.deps(), {c: i["ifaces"] for c, i in b.classes.items()},
                             files, b.topics(), b.duplicates(),
                             _clusters(b.classes, b.packages))
        versions.append(facts)
        # feature work: co-change hot spot plus background commits
        hot = sorted(c for c, i in b.classes.items() if i["pkg"] == b.cochange_pkg)
        all_files = sorted(files.values())
        for j in range(40):
            day += 1
            if j % 2 == 0 and len(hot) >= 2:
                pick = rng.choice(len(hot), size=min(len(hot), 3), replace=False)
                touched = [files[hot[k]] for k in pick]
            else:
                pick = rng.choice(len(all_files), size=int(rng.integers(1, 4)), replace=False)
                touched = [all_files[k] for k in pick]
            commits.append(Commit(_hash(name, version, "feat", j), _date(day), tuple(touched)))
        if vi == 0:
            day += 1
            commits.append(Commit(_hash(name, "bulk"), _date(day), tuple(all_files[:150])))

        # issues: rate driven by the smells the pipeline will detect
        view = recover_pkg(facts.deps, entities=files, interface_counts=facts.interfaces,
                           system=name, version=version)
        view = attach_concerns(view, facts.topics)
        view = attach_couplings(view, facts.duplicates + cochange_couplings(commits, files))
        flags = file_smell_flags(view, detect_all(view, SmellConfig()), files)
        for f in sorted(set(files.values())):
            score = sum(weights[s] for s in flags.get(f, ()))
            lam = BASE_RATE * math.exp(score)
            for k in range(int(rng.poisson(lam))):
                iid = f"{name.upper()}-{len(issues) + 1}"
                fixing = []
                for m in range(1 + int(rng.random() < 0.3)):
                    day += 1
                    touched = [f]
                    if rng.random() < 0.25:
                        touched.append(all_files[rng.integers(len(all_files))])
                    c = Commit(_hash(iid, m), _date(day), tuple(touched))
                    commits.append(c)
                    fixing.append(c.hash)
                issues.append(Issue(iid, "Bug", "Resolved", "Fixed", (version,), tuple(fixing)))
        # noise the pipeline must filter out
        for k in range(3):
            iid = f"{name.upper()}-{len(issues) + 1}"
            issues.append(Issue(iid, "Improvement", "Resolved", "Won't Fix", (version,), ()))
    manifest = {"name": name, "seed": seed,
                "versions": [{"version": v.version, "files": len(set(v.files.values()))}
                             for v in versions]}
    return SystemCorpus(name, versions, commits, issues, manifest)


SYSTEM_NAMES = ("alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf", "hotel")


def generate_corpus(root, n_systems: int = 5, seed: int = 0, n_versions: int = 5,
                    n_files: int = 220) -> dict:
    """Write ``n_systems`` systems under ``root`` and return the manifest."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    seeds = np.random.SeedSequence(seed).spawn(n_systems)
    systems = []
    for i in range(n_systems):
        name = SYSTEM_NAMES[i] if i < len(SYSTEM_NAMES) else f"sys{i}"
        corpus = generate_system(name, int(seeds[i].generate_state(1)[0]),
                                 n_versions=n_versions, n_files=n_files)
        corpus.write(root)
        systems.append(corpus.manifest)
    manifest = {"seed": seed, "features": list(FEATURES), "systems": systems}
    (root / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest
