"""Drive the full command-line pipeline over a synthetic corpus."""
import json
import os
from contextlib import contextmanager
from pathlib import Path

from archsmells.cli import main


@contextmanager
def chdir(path):
    old = os.getcwd()
    os.chdir(path)
    try:
        yield
    finally:
        os.chdir(old)


def run(*argv):
    code = main(["--workspace", "ws", *argv])
    assert code == 0, argv
    return code


def full_pipeline(root, systems=1, versions=2, files=60, seed=0):
    """Run every stage with relative paths under ``root``; returns the manifest."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    with chdir(root):
        run("--seed", str(seed), "synth", "--systems", str(systems), "--versions",
            str(versions), "--files", str(files), "--out", "corpus")
        manifest = json.loads(Path("ws/corpus/manifest.json").read_text())
        for sysm in manifest["systems"]:
            name = sysm["name"]
            sd = f"ws/corpus/{name}"
            vers = [v["version"] for v in sysm["versions"]]

            def recover(v, out, extra=()):
                d = f"{sd}/{v}"
                run("recover", "pkg", "--deps", f"{d}/deps.rsf", "--interfaces",
                    f"{d}/interfaces.rsf", "--entity-files", f"{d}/files.rsf", "--topics",
                    f"{d}/topics.tsv", "--couplings", f"{d}/dups.rsf", *extra,
                    "--system", name, "--version", v, "--out", out)

            for v in vers:
                recover(v, f"{name}/pre/{v}.json")
            run("couplings", "from-gitlog", "--gitlog", f"{sd}/gitlog.txt", "--view",
                *[f"ws/{name}/pre/{v}.json" for v in vers], "--out", f"{name}/cochange.rsf")
            for v in vers:
                recover(v, f"{name}/views/{v}.json", [f"ws/{name}/cochange.rsf"])
                run("detect", "--view", f"ws/{name}/views/{v}.json",
                    "--out", f"{name}/reports/{v}.json")
            views = [f"ws/{name}/views/{v}.json" for v in vers]
            reports = [f"ws/{name}/reports/{v}.json" for v in vers]
            run("dataset", "build", "--views", *views, "--reports", *reports,
                "--issues", f"{sd}/issues.json", "--gitlog", f"{sd}/gitlog.txt",
                "--out", f"{name}/dataset.csv")
            run("label", "--dataset", f"ws/{name}/dataset.csv", "--out", f"{name}/labeled.csv")
            run("--seed", str(seed), "balance", "--dataset", f"ws/{name}/labeled.csv",
                "--out", f"{name}/balanced.csv")
            run("--seed", str(seed), "eval", "cv", "--dataset", f"ws/{name}/labeled.csv",
                "--out", f"{name}/cv.json")
            run("--seed", str(seed), "eval", "cv", "--dataset", f"ws/{name}/labeled.csv",
                "--strict-balancing", "--out", f"{name}/cv-strict.json")
            run("report", "smells", "--reports", *reports, "--out", f"{name}/smells.txt")
            run("report", "long-lived", "--views", *views, "--reports", *reports,
                "--out", f"{name}/long-lived.txt")
        names = [s["name"] for s in manifest["systems"]]
        if len(names) > 1:
            run("--seed", str(seed), "eval", "cross-system", "--train",
                *[f"ws/{n}/labeled.csv" for n in names[1:]], "--test",
                f"ws/{names[0]}/labeled.csv", "--out", "cross.json")
        results = [x for n in names for x in ("--result", n, "PKG", f"ws/{n}/cv.json")]
        run("report", "eval", *results, "--out", "eval.txt")
    return manifest


def snapshot(root):
    """``{relative path: bytes}`` for every file under ``root``."""
    root = Path(root)
    return {str(p.relative_to(root)): p.read_bytes()
            for p in sorted(root.rglob("*")) if p.is_file()}
