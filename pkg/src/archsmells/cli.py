"""``archsmells`` command line.

Every command writes its artifact under ``--workspace`` together with a
``<artifact>.meta.json`` run record (command, input digests, seed, resolved
configuration, tool version, documented deviations). Exit codes: 0 success,
1 usage error, 2 data/validation error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import tempfile
from dataclasses import replace
from pathlib import Path

from . import __version__, ingest
from .coupling import cochange_couplings
from .dataset import build_dataset, read_dataset_csv, write_dataset_csv
from .errors import ArchSmellError
from .mlkit import (
    LABELS, TRAINERS, confusion_metrics, cross_system, cross_validate, smote,
)
from .model import view_from_dict, view_to_dict
from .pipeline import label_rows, labeled_dataset
from .recover import apply_cluster_map, attach_concerns, attach_couplings, recover_pkg
from .report import (
    long_lived_smelly_files, render_eval_table, render_long_lived, render_smell_summary,
)
from .smells import SD_NOTE, SmellConfig, SmellReport, detect_all

log = logging.getLogger("archsmells")

SEED_ENV = "ARCHSMELLS_SEED"

# defaults for every option that may also come from --config
DEFAULTS = {
    "seed": 0,
    "depth": None,
    "extension": ".java",
    "min_support": 2,
    "max_commit_files": 100,
    "th_sd": 2,
    "min_cycle_size": 3,
    "factors": "med=5,high=20",
    "k": 5,
    "folds": 10,
    "classifier": "decision-table",
    "balancing": "faithful",
    "target": "issue",
    "top": 20,
    "view_kind": "ACDC",
}

DEVIATIONS = {
    "detect": [SD_NOTE],
    "dataset": ["changeCount counts distinct fixing commits per (version, file)",
                "co-change counted at commit granularity"],
    "eval": ["folds are stratified by label",
             "macro precision/recall are unweighted means over low/med/high"],
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# ------------------------------------------------------------------ helpers

def _read(path) -> str:
    try:
        return Path(path).read_text()
    except FileNotFoundError:
        raise ArchSmellError(f"{path}: no such file") from None


def _digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


class Run:
    """Collects inputs and writes artifacts plus their run record."""

    def __init__(self, args, cfg):
        self.args = args
        self.cfg = cfg
        self.workspace = Path(args.workspace)
        self.inputs = {}

    def read(self, path) -> str:
        text = _read(path)
        self.inputs[str(path)] = _digest(path)
        return text

    def out_path(self, name) -> Path:
        p = Path(name)
        return p if p.is_absolute() else self.workspace / p

    def write(self, name, text, kind, extra=None):
        path = self.out_path(name)
        _atomic_write(path, text)
        meta = {
            "command": self.args.command_path,
            "tool_version": __version__,
            "seed": self.cfg["seed"],
            "config": {k: self.cfg[k] for k in sorted(self.cfg)},
            "inputs": dict(sorted(self.inputs.items())),
            "deviations": DEVIATIONS.get(kind, []),
        }
        if extra:
            meta.update(extra)
        _atomic_write(path.with_name(path.name + ".meta.json"), _dump(meta))
        return path


def _load_config(args) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            doc = json.loads(_read(args.config))
        except json.JSONDecodeError as exc:
            raise ArchSmellError(f"{args.config}:{exc.lineno}: invalid JSON: {exc.msg}") from None
        if not isinstance(doc, dict):
            raise ArchSmellError(f"{args.config}: config must be a flat JSON object")
        unknown = sorted(set(doc) - set(DEFAULTS))
        if unknown:
            raise ArchSmellError(f"{args.config}: unknown config keys {unknown}")
        cfg.update(doc)
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            cfg["seed"] = int(env)
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    return cfg


def _parse_factors(text) -> dict:
    factors = {}
    for part in str(text).split(","):
        name, _, value = part.partition("=")
        name = name.strip()
        if name not in LABELS or not value.strip().isdigit():
            raise UsageError(f"bad factor spec {part!r}; expected e.g. med=5,high=20")
        factors[LABELS.index(name)] = int(value)
    return factors


def _load_view(run, path):
    try:
        return view_from_dict(json.loads(run.read(path)))
    except (json.JSONDecodeError, KeyError) as exc:
        raise ArchSmellError(f"{path}: not a view document ({exc})") from None


def _load_report(run, path):
    try:
        return SmellReport.from_json(run.read(path))
    except (json.JSONDecodeError, KeyError) as exc:
        raise ArchSmellError(f"{path}: not a smell report ({exc})") from None


def _load_dataset(run, path):
    return read_dataset_csv(run.read(path), path)


def _efm_for(run, view, path, cfg):
    """Convention paths, overridden by paths stored in the view, overridden
    by an explicit entity-file map."""
    efm = ingest.parse_entity_file_map("", [e.id for e in view.entities], cfg["extension"])
    efm.update({e.id: e.file_path for e in view.entities if e.file_path})
    if path:
        efm.update(ingest.parse_entity_file_map(run.read(path), source=path))
    return efm


# ----------------------------------------------------------------- commands

def _attachments(run, view, args, cfg):
    if args.topics:
        view = attach_concerns(view, ingest.parse_topics_tsv(run.read(args.topics), args.topics))
    couplings = []
    for path in args.couplings or ():
        couplings += ingest.parse_coupling_facts(run.read(path), path)
    return attach_couplings(view, couplings) if couplings else view


def _recover_inputs(run, args, cfg):
    deps = ingest.parse_deps_rsf(run.read(args.deps), args.deps)
    ifaces = (ingest.parse_interfaces(run.read(args.interfaces), args.interfaces)
              if args.interfaces else {})
    explicit = (ingest.parse_entity_file_map(run.read(args.entity_files), source=args.entity_files)
                if args.entity_files else {})
    return deps, ifaces, explicit


def cmd_recover_pkg(run, args, cfg):
    deps, ifaces, explicit = _recover_inputs(run, args, cfg)
    entities = set(ifaces) | set(explicit)
    efm = ingest.parse_entity_file_map("", entities | {e for p in deps for e in p},
                                       cfg["extension"])
    efm.update(explicit)
    view = recover_pkg(deps, entities, ifaces, depth=cfg["depth"], system=args.system,
                       version=args.version, file_map=efm)
    view = _attachments(run, view, args, cfg)
    run.write(args.out, _dump(view_to_dict(view)), "recover")


def cmd_recover_map(run, args, cfg):
    deps, ifaces, explicit = _recover_inputs(run, args, cfg)
    clusters = ingest.parse_cluster_map(run.read(args.map), args.map)
    entities = set(ifaces) | set(explicit)
    all_ids = entities | {e for p in deps for e in p} | {e for m in clusters.values() for e in m}
    efm = ingest.parse_entity_file_map("", all_ids, cfg["extension"])
    efm.update(explicit)
    view = apply_cluster_map(deps, clusters, entities, ifaces, system=args.system,
                             version=args.version, view_kind=cfg["view_kind"], file_map=efm)
    view = _attachments(run, view, args, cfg)
    run.write(args.out, _dump(view_to_dict(view)), "recover")


def cmd_couplings(run, args, cfg):
    commits = ingest.parse_git_log(run.read(args.gitlog), args.gitlog)
    efm = {}
    for vpath in args.view:
        view = _load_view(run, vpath)
        efm.update(_efm_for(run, view, args.entity_files, cfg))
    couplings = cochange_couplings(commits, efm, cfg["min_support"], cfg["max_commit_files"])
    run.write(args.out, ingest.dump_couplings(couplings), "couplings",
              {"granularity": "commit", "couplings": len(couplings)})


def cmd_detect(run, args, cfg):
    view = _load_view(run, args.view)
    config = SmellConfig(th_sd=int(cfg["th_sd"]), min_cycle_size=int(cfg["min_cycle_size"]))
    report = detect_all(view, config)
    run.write(args.out, report.to_json(), "detect", {"skipped": report.skipped})


def cmd_dataset_build(run, args, cfg):
    if len(args.views) != len(args.reports):
        raise UsageError("--views and --reports must have the same length")
    if args.entity_files and len(args.entity_files) != len(args.views):
        raise UsageError("--entity-files must be given once per view")
    per_version = []
    for i, (vp, rp) in enumerate(zip(args.views, args.reports)):
        view = _load_view(run, vp)
        report = _load_report(run, rp)
        if report.view_ref != view.ref:
            raise ArchSmellError(f"{rp}: report is for {report.view_ref}, view is {view.ref}")
        efm = _efm_for(run, view, args.entity_files[i] if args.entity_files else None, cfg)
        per_version.append((view, report, efm))
    issues = ingest.filter_fixed(ingest.parse_issues(run.read(args.issues), args.issues))
    commits = ingest.parse_git_log(run.read(args.gitlog), args.gitlog)
    diag = {}
    rows = build_dataset(per_version, issues, commits, diag)
    run.write(args.out, write_dataset_csv(rows), "dataset",
              {"rows": len(rows), "diagnostics": diag})


def cmd_label(run, args, cfg):
    rows = label_rows(_load_dataset(run, args.dataset))
    run.write(args.out, write_dataset_csv(rows), "label")


def _require_labels(rows, path):
    if any(r.issue_label is None or r.change_label is None for r in rows):
        raise ArchSmellError(f"{path}: dataset is not labeled (run 'label' first)")


def _balance_rows(rows, target, factors, k, seed):
    ds = labeled_dataset(rows, target)
    X, y, base = smote(ds.X, ds.y, factors, k, seed, return_base=True)
    out = list(rows)
    for j in range(len(rows), len(y)):
        src = rows[base[j]]
        out.append(replace(src, version="~synthetic", file=f"{src.file}#smote{j - len(rows) + 1}",
                           features=tuple(int(v) for v in X[j])))
    return out


def cmd_balance(run, args, cfg):
    rows = _load_dataset(run, args.dataset)
    _require_labels(rows, args.dataset)
    factors = _parse_factors(cfg["factors"])
    out = _balance_rows(rows, cfg["target"], factors, int(cfg["k"]), int(cfg["seed"]))
    ds = labeled_dataset(out, cfg["target"])
    sizes = [int((ds.y == c).sum()) for c in range(3)]
    run.write(args.out, write_dataset_csv(out), "balance",
              {"target": cfg["target"], "class_sizes": dict(zip(LABELS, sizes))})


def _trainer(cfg):
    try:
        return TRAINERS[cfg["classifier"]]
    except KeyError:
        raise UsageError(f"unknown classifier {cfg['classifier']!r}; "
                         f"choose from {sorted(TRAINERS)}") from None


def _eval_dataset(run, path, cfg, balance):
    rows = _load_dataset(run, path)
    _require_labels(rows, path)
    ds = labeled_dataset(rows, cfg["target"])
    if balance:
        X, y = smote(ds.X, ds.y, _parse_factors(cfg["factors"]), int(cfg["k"]), int(cfg["seed"]))
        ds = type(ds)(X, y, ds.label_kind, ds.provenance)
    return ds


def _write_eval(run, args, result, cfg, extra):
    result.meta.update(extra)
    result.meta.update({"classifier": cfg["classifier"], "target": cfg["target"],
                        "balancing": cfg["balancing"]})
    run.write(args.out, _dump(result.to_dict()), "eval")
    print(f"macro precision {100 * result.macro_precision:.1f}%  "
          f"macro recall {100 * result.macro_recall:.1f}%")


def cmd_eval_cv(run, args, cfg):
    mode = cfg["balancing"]
    ds = _eval_dataset(run, args.dataset, cfg, balance=(mode == "faithful"))
    factors = _parse_factors(cfg["factors"]) if mode == "strict" else None
    res = cross_validate(ds.X, ds.y, int(cfg["folds"]), int(cfg["seed"]), _trainer(cfg),
                         smote_factors=factors, smote_k=int(cfg["k"]))
    _write_eval(run, args, res, cfg, {"rows": len(ds)})


def cmd_eval_cross(run, args, cfg):
    mode = cfg["balancing"]
    train = [_eval_dataset(run, p, cfg, balance=mode in ("faithful", "strict"))
             for p in args.train]
    test = _eval_dataset(run, args.test, cfg, balance=(mode == "faithful"))
    res = cross_system(train, test, int(cfg["seed"]), _trainer(cfg))
    _write_eval(run, args, res, cfg, {"test_rows": len(test)})


def cmd_report_smells(run, args, cfg):
    reports = [_load_report(run, p) for p in args.reports]
    text = render_smell_summary(reports)
    sys.stdout.write(text)
    run.write(args.out, text, "report")


def cmd_report_eval(run, args, cfg):
    results = {}
    for system, view, path in args.result:
        d = json.loads(run.read(path))
        results[(system, view)] = confusion_metrics(d["confusion_predicted_by_actual"])
    text = render_eval_table(results)
    sys.stdout.write(text)
    run.write(args.out, text, "report")


def cmd_report_long_lived(run, args, cfg):
    if len(args.views) != len(args.reports):
        raise UsageError("--views and --reports must have the same length")
    per_version = []
    for vp, rp in zip(args.views, args.reports):
        view = _load_view(run, vp)
        per_version.append((view, _load_report(run, rp), _efm_for(run, view, None, cfg)))
    ranked = long_lived_smelly_files(per_version, int(cfg["top"]))
    text = render_long_lived(ranked)
    sys.stdout.write(text)
    run.write(args.out, text, "report")


def cmd_synth(run, args, cfg):
    from .synth import generate_corpus

    manifest = generate_corpus(run.out_path(args.out), args.systems, int(cfg["seed"]),
                               args.versions, args.files)
    total = sum(v["files"] for s in manifest["systems"] for v in s["versions"])
    print(f"wrote {len(manifest['systems'])} systems ({total} version-files)")


# ------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="archsmells", description=__doc__.splitlines()[0])
    p.add_argument("--workspace", default="workspace", help="artifact directory")
    p.add_argument("--seed", type=int, help=f"master seed (env {SEED_ENV}; default 0)")
    p.add_argument("--config", help="flat JSON object with option defaults")
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("--version", action="version", version=f"archsmells {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def leaf(parent, name, func, help):
        sp = parent.add_parser(name, help=help)
        sp.set_defaults(func=func)
        return sp

    rec = sub.add_parser("recover", help="build an architecture view")
    rsub = rec.add_subparsers(dest="mode", required=True, parser_class=_Parser)
    for name, func in (("pkg", cmd_recover_pkg), ("apply-map", cmd_recover_map)):
        sp = leaf(rsub, name, func, "package view" if name == "pkg" else "external cluster map")
        sp.add_argument("--deps", required=True)
        sp.add_argument("--interfaces")
        sp.add_argument("--entity-files")
        sp.add_argument("--topics")
        sp.add_argument("--couplings", nargs="*")
        sp.add_argument("--system", required=True)
        sp.add_argument("--version", required=True, dest="version")
        sp.add_argument("--extension")
        sp.add_argument("--out", required=True)
        if name == "pkg":
            sp.add_argument("--depth", type=int)
        else:
            sp.add_argument("--map", required=True)
            sp.add_argument("--view-kind", choices=["ACDC", "ARC", "custom"])

    cp = sub.add_parser("couplings", help="derive couplings")
    csub = cp.add_subparsers(dest="mode", required=True, parser_class=_Parser)
    sp = leaf(csub, "from-gitlog", cmd_couplings, "co-change couplings from git log")
    sp.add_argument("--gitlog", required=True)
    sp.add_argument("--view", required=True, nargs="+")
    sp.add_argument("--entity-files")
    sp.add_argument("--extension")
    sp.add_argument("--min-support", type=int)
    sp.add_argument("--max-commit-files", type=int)
    sp.add_argument("--out", required=True)

    sp = leaf(sub, "detect", cmd_detect, "detect smells in a view")
    sp.add_argument("--view", required=True)
    sp.add_argument("--th-sd", type=int)
    sp.add_argument("--min-cycle-size", type=int)
    sp.add_argument("--out", required=True)

    ds = sub.add_parser("dataset", help="dataset construction")
    dsub = ds.add_subparsers(dest="mode", required=True, parser_class=_Parser)
    sp = leaf(dsub, "build", cmd_dataset_build, "build the per-file dataset")
    sp.add_argument("--views", nargs="+", required=True)
    sp.add_argument("--reports", nargs="+", required=True)
    sp.add_argument("--entity-files", nargs="+")
    sp.add_argument("--extension")
    sp.add_argument("--issues", required=True)
    sp.add_argument("--gitlog", required=True)
    sp.add_argument("--out", required=True)

    sp = leaf(sub, "label", cmd_label, "double-Pareto labeling")
    sp.add_argument("--dataset", required=True)
    sp.add_argument("--out", required=True)

    sp = leaf(sub, "balance", cmd_balance, "SMOTE balancing")
    sp.add_argument("--dataset", required=True)
    sp.add_argument("--target", choices=["issue", "change"])
    sp.add_argument("--factors")
    sp.add_argument("--k", type=int)
    sp.add_argument("--out", required=True)

    ev = sub.add_parser("eval", help="model evaluation")
    esub = ev.add_subparsers(dest="mode", required=True, parser_class=_Parser)
    for name, func in (("cv", cmd_eval_cv), ("cross-system", cmd_eval_cross)):
        sp = leaf(esub, name, func, "cross-validation" if name == "cv" else "cross-system")
        if name == "cv":
            sp.add_argument("--dataset", required=True)
            sp.add_argument("--folds", type=int)
        else:
            sp.add_argument("--train", nargs="+", required=True)
            sp.add_argument("--test", required=True)
        sp.add_argument("--target", choices=["issue", "change"])
        sp.add_argument("--classifier", choices=sorted(TRAINERS))
        sp.add_argument("--balancing", choices=["faithful", "strict", "none"])
        sp.add_argument("--strict-balancing", dest="balancing", action="store_const",
                        const="strict")
        sp.add_argument("--factors")
        sp.add_argument("--k", type=int)
        sp.add_argument("--out", required=True)

    rp = sub.add_parser("report", help="text reports")
    rsub = rp.add_subparsers(dest="mode", required=True, parser_class=_Parser)
    sp = leaf(rsub, "smells", cmd_report_smells, "smell counts per report")
    sp.add_argument("--reports", nargs="+", required=True)
    sp.add_argument("--out", required=True)
    sp = leaf(rsub, "eval", cmd_report_eval, "precision/recall table")
    sp.add_argument("--result", nargs=3, action="append", required=True,
                    metavar=("SYSTEM", "VIEW", "FILE"))
    sp.add_argument("--out", required=True)
    sp = leaf(rsub, "long-lived", cmd_report_long_lived, "long-lived smelly files")
    sp.add_argument("--views", nargs="+", required=True)
    sp.add_argument("--reports", nargs="+", required=True)
    sp.add_argument("--top", type=int)
    sp.add_argument("--out", required=True)

    sp = leaf(sub, "synth", cmd_synth, "write the synthetic corpus")
    sp.add_argument("--systems", type=int, default=5)
    sp.add_argument("--versions", type=int, default=5, dest="versions")
    sp.add_argument("--files", type=int, default=220)
    sp.add_argument("--out", required=True)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    args.command_path = " ".join(
        x for x in (args.command, getattr(args, "mode", None)) if x)
    try:
        cfg = _load_config(args)
        args.func(Run(args, cfg), args, cfg)
    except UsageError as exc:
        print(f"archsmells: error: {exc}", file=sys.stderr)
        return 1
    except (ArchSmellError, OSError, ValueError) as exc:
        print(f"archsmells: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
