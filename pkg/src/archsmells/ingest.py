"""Parsers (and matching writers) for the external fact formats.

Line-oriented formats ignore blank lines and lines starting with ``#``;
anything else that does not match the grammar raises :class:`ParseError`
with its 1-based line number.

==================  ==============================================
deps RSF            ``depends <src> <dst>``
cluster RSF         ``contain <component> <entity>``
interfaces          ``interfaces <entity> <count>``
duplicates          ``dup <entityA> <entityB> <count>``
co-change facts     ``cochange <entityA> <entityB> <strength>``
entity-file map     ``file <entity> <path>``
topics TSV          ``<component>\\t<topic>:<p>\\t<topic>:<p>...``
git log             ``git log --name-only --date=iso-strict --pretty=format:"@@%H|%ad"``
issues              JSON list of issue objects (see :func:`parse_issues`)
==================  ==============================================
"""
from __future__ import annotations

import json
import math
import posixpath
from dataclasses import dataclass

from .errors import ClusterConflictError, DistributionError, ParseError
from .model import Coupling

TOPIC_TOLERANCE = 1e-6
FIXED_STATUSES = {"resolved", "closed"}
FIXED_RESOLUTION = "fixed"


@dataclass(frozen=True)
class Commit:
    hash: str
    author_date: str
    changed_files: tuple = ()

    def __post_init__(self):
        if not self.hash:
            raise ValueError("commit hash must be nonempty")
        object.__setattr__(self, "changed_files", _dedup(self.changed_files))


@dataclass(frozen=True)
class Issue:
    id: str
    issue_type: str = ""
    status: str = ""
    resolution: str = ""
    affected_versions: tuple = ()
    fixing_commits: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "affected_versions", _dedup(self.affected_versions))
        object.__setattr__(self, "fixing_commits", _dedup(self.fixing_commits))

    @property
    def is_fixed(self) -> bool:
        return (self.status.strip().lower() in FIXED_STATUSES
                and self.resolution.strip().lower() == FIXED_RESOLUTION)


def _dedup(items):
    return tuple(dict.fromkeys(str(x) for x in items))


def _fact_lines(text, source=None):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line.split()


def _expect(parts, relation, arity, lineno, source):
    if parts[0] != relation or len(parts) != arity + 1:
        raise ParseError(f"expected '{relation}' with {arity} arguments, got {' '.join(parts)!r}",
                         lineno, source)


def _positive_int(token, lineno, source, what="count"):
    try:
        value = int(token)
    except ValueError:
        raise ParseError(f"{what} must be an integer, got {token!r}", lineno, source) from None
    if value < 1:
        raise ParseError(f"{what} must be >= 1, got {value}", lineno, source)
    return value


# -------------------------------------------------------------------- RSF

def parse_deps_rsf(text: str, source=None) -> list:
    edges = {}
    for lineno, parts in _fact_lines(text, source):
        _expect(parts, "depends", 2, lineno, source)
        edges.setdefault((parts[1], parts[2]), None)
    return list(edges)


def dump_deps_rsf(edges) -> str:
    return "".join(f"depends {a} {b}\n" for a, b in edges)


def parse_cluster_map(text: str, source=None) -> dict:
    clusters = {}
    owner = {}
    for lineno, parts in _fact_lines(text, source):
        _expect(parts, "contain", 2, lineno, source)
        comp, ent = parts[1], parts[2]
        prev = owner.get(ent)
        if prev is not None and prev != comp:
            raise ClusterConflictError(
                f"entity {ent} assigned to both {prev} and {comp}", lineno, source)
        owner[ent] = comp
        clusters.setdefault(comp, set()).add(ent)
    return clusters


def dump_cluster_map(clusters) -> str:
    return "".join(f"contain {c} {e}\n"
                   for c in sorted(clusters) for e in sorted(clusters[c]))


def parse_interfaces(text: str, source=None) -> dict:
    counts = {}
    for lineno, parts in _fact_lines(text, source):
        _expect(parts, "interfaces", 2, lineno, source)
        try:
            n = int(parts[2])
        except ValueError:
            raise ParseError(f"interface count must be an integer, got {parts[2]!r}",
                             lineno, source) from None
        if n < 0:
            raise ParseError(f"interface count must be >= 0, got {n}", lineno, source)
        counts[parts[1]] = n
    return counts


def dump_interfaces(counts) -> str:
    return "".join(f"interfaces {e} {counts[e]}\n" for e in sorted(counts))


def _parse_coupling_lines(text, relation, kind, source):
    out = []
    for lineno, parts in _fact_lines(text, source):
        _expect(parts, relation, 3, lineno, source)
        a, b = parts[1], parts[2]
        if a == b:
            raise ParseError(f"{relation} endpoints must differ ({a})", lineno, source)
        out.append(Coupling.make(a, b, kind, _positive_int(parts[3], lineno, source)))
    return out


def parse_duplicates(text: str, source=None) -> list:
    return _parse_coupling_lines(text, "dup", "duplicate", source)


def parse_cochange_facts(text: str, source=None) -> list:
    return _parse_coupling_lines(text, "cochange", "cochange", source)


def parse_coupling_facts(text: str, source=None) -> list:
    """Mixed ``dup`` / ``cochange`` fact lines."""
    kinds = {"dup": "duplicate", "cochange": "cochange"}
    out = []
    for lineno, parts in _fact_lines(text, source):
        if parts[0] not in kinds:
            raise ParseError(f"expected 'dup' or 'cochange', got {parts[0]!r}", lineno, source)
        _expect(parts, parts[0], 3, lineno, source)
        if parts[1] == parts[2]:
            raise ParseError(f"{parts[0]} endpoints must differ ({parts[1]})", lineno, source)
        out.append(Coupling.make(parts[1], parts[2], kinds[parts[0]],
                                 _positive_int(parts[3], lineno, source)))
    return out


def dump_couplings(couplings) -> str:
    rel = {"duplicate": "dup", "cochange": "cochange"}
    return "".join(f"{rel[cp.kind]} {cp.a} {cp.b} {cp.strength}\n" for cp in couplings)


# ------------------------------------------------------------- file mapping

def convention_path(entity_id: str, extension: str = ".java") -> str:
    """``a.b.C$Inner`` -> ``a/b/C.java``."""
    base = entity_id.split("$", 1)[0]
    return posixpath.join(*base.split(".")) + extension


def parse_entity_file_map(text: str, entities=(), extension: str = ".java",
                          source=None) -> dict:
    """Explicit ``file`` lines, completed for ``entities`` by the naming convention."""
    explicit = {}
    for lineno, parts in _fact_lines(text, source):
        if parts[0] != "file" or len(parts) < 3:
            raise ParseError(f"expected 'file <entity> <path>', got {' '.join(parts)!r}",
                             lineno, source)
        explicit[parts[1]] = " ".join(parts[2:])
    mapping = {e: convention_path(e, extension) for e in entities}
    mapping.update(explicit)
    return mapping


def dump_entity_file_map(mapping) -> str:
    return "".join(f"file {e} {mapping[e]}\n" for e in sorted(mapping))


# ------------------------------------------------------------------ topics

def parse_topics_tsv(text: str, source=None) -> dict:
    topics = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        comp, pairs = fields[0], fields[1:]
        if not pairs:
            raise ParseError(f"component {comp} has no topic probabilities", lineno, source)
        dist = {}
        for pair in pairs:
            topic, sep, prob = pair.rpartition(":")
            try:
                p = float(prob)
            except ValueError:
                p = math.nan
            if not sep or not topic or not math.isfinite(p) or p < 0:
                raise ParseError(f"bad topic:probability pair {pair!r}", lineno, source)
            dist[topic] = dist.get(topic, 0.0) + p
        total = sum(dist.values())
        if abs(total - 1.0) > TOPIC_TOLERANCE:
            raise DistributionError(
                f"probabilities for {comp} sum to {total:.6g}, not 1", lineno, source)
        topics[comp] = {t: p / total for t, p in dist.items()}
    return topics


def dump_topics_tsv(topics) -> str:
    lines = []
    for comp in sorted(topics):
        pairs = "\t".join(f"{t}:{p!r}" for t, p in sorted(topics[comp].items()))
        lines.append(f"{comp}\t{pairs}\n")
    return "".join(lines)


# ----------------------------------------------------------------- git log

GIT_LOG_FORMAT = '--pretty=format:@@%H|%ad'


def parse_git_log(text: str, source=None) -> list:
    commits = []
    current = None
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("@@"):
            if current is not None:
                commits.append(Commit(*current))
            sha, _, date = line[2:].partition("|")
            sha = sha.strip()
            if not sha:
                raise ParseError("commit record without hash", lineno, source)
            if sha in seen:
                raise ParseError(f"duplicate commit {sha}", lineno, source)
            seen.add(sha)
            current = (sha, date.strip(), [])
        elif current is None:
            raise ParseError(f"path outside a commit record: {line!r}", lineno, source)
        else:
            current[2].append(line)
    if current is not None:
        commits.append(Commit(*current))
    return commits


def render_git_log(commits) -> str:
    """Inverse of :func:`parse_git_log`, in the layout git itself prints."""
    blocks = []
    for c in commits:
        blocks.append("\n".join([f"@@{c.hash}|{c.author_date}", *c.changed_files]))
    return "\n\n".join(blocks) + ("\n" if blocks else "")


# ------------------------------------------------------------------ issues

_ISSUE_KEYS = {
    "id": ("id", "key"),
    "issue_type": ("type", "issueType", "issue_type"),
    "status": ("status",),
    "resolution": ("resolution",),
    "affected_versions": ("affectedVersions", "affected_versions", "versions"),
    "fixing_commits": ("fixingCommits", "fixing_commits", "commits"),
}


def _issue_from_obj(obj, index, source):
    if not isinstance(obj, dict):
        raise ParseError(f"issue #{index} is not an object", None, source)
    kwargs = {}
    for name, keys in _ISSUE_KEYS.items():
        for k in keys:
            if k in obj:
                kwargs[name] = obj[k]
                break
    if not kwargs.get("id"):
        raise ParseError(f"issue #{index} has no id", None, source)
    for name in ("affected_versions", "fixing_commits"):
        value = kwargs.get(name, ())
        if isinstance(value, str):
            value = [value]
        kwargs[name] = tuple(value or ())
    for name in ("id", "issue_type", "status", "resolution"):
        kwargs[name] = str(kwargs.get(name) or "")
    return Issue(**kwargs)


def parse_issues(text: str, source=None) -> list:
    """JSON array of objects (or ``{"issues": [...]}``) with keys ``id``,
    ``type``, ``status``, ``resolution``, ``affectedVersions``, ``fixingCommits``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, source) from None
    if isinstance(doc, dict):
        doc = doc.get("issues")
    if not isinstance(doc, list):
        raise ParseError("expected a list of issues", None, source)
    issues = [_issue_from_obj(obj, i, source) for i, obj in enumerate(doc)]
    ids = [i.id for i in issues]
    if len(set(ids)) != len(ids):
        dup = next(x for x in ids if ids.count(x) > 1)
        raise ParseError(f"duplicate issue id {dup}", None, source)
    return issues


def dump_issues(issues) -> str:
    doc = [{"id": i.id, "type": i.issue_type, "status": i.status,
            "resolution": i.resolution, "affectedVersions": list(i.affected_versions),
            "fixingCommits": list(i.fixing_commits)} for i in issues]
    return json.dumps(doc, indent=2) + "\n"


def filter_fixed(issues) -> list:
    return [i for i in issues if i.is_fixed]
