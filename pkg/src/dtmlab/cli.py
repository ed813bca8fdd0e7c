"""``dtm-lab``: run verification tasks from a JSON config and write reports.

Exit status is 0 when every asserted property holds, 1 when some check
fails, and 2 for unusable input (bad config, capacity overflow).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .classify import classify, csv_table, dtm_csv, extend_to_measure, outer_measure
from .constructions import construction_suite
from .dtm import (
    DeficientTM,
    check_dtm_axioms,
    extend_from_compacts,
    regularity_suite,
    smallest_dominating_certificate,
)
from .errors import CapacityError, DTMLabError
from .gallery import get_item, run_gallery
from .report import Check, Report, dumps
from .setfn import check_compact_additivity, from_descriptor
from .topology import build_space
from .variation import variation_identities_suite, resolution_report, table_for

SCHEMA_VERSION = 1
TASKS = ("variations", "identities", "axioms", "extension", "minimality", "regularity",
         "classify", "constructions", "resolution", "gallery")
# older configs name the identity suite by its source
TASK_ALIASES = {"lemma23": "identities"}
RANDOMIZED = {"minimality", "gallery"}
MAX_REFINE = 2


class ConfigError(DTMLabError):
    pass


def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def _functions(cfg: dict) -> dict:
    if "functions" in cfg:
        fns = cfg["functions"]
        if not isinstance(fns, dict) or not fns:
            raise ConfigError("'functions' must be a nonempty object of descriptors")
        return fns
    if "function" in cfg:
        return {"lambda": cfg["function"]}
    return {}


def validate(cfg: dict) -> dict:
    tasks = cfg.get("tasks")
    if not isinstance(tasks, list) or not tasks:
        raise ConfigError("'tasks' must be a nonempty list")
    tasks = cfg["tasks"] = [TASK_ALIASES.get(t, t) for t in tasks]
    unknown = [t for t in tasks if t not in TASKS]
    if unknown:
        raise ConfigError(f"unknown tasks {unknown}; choose from {list(TASKS)}")
    if RANDOMIZED & set(tasks) and not isinstance(cfg.get("seed"), int):
        raise ConfigError(f"tasks {sorted(RANDOMIZED & set(tasks))} need an integer 'seed'")
    depth = cfg.get("refine", 0)
    if not isinstance(depth, int) or not 0 <= depth <= MAX_REFINE:
        raise ConfigError(f"'refine' must be an integer in 0..{MAX_REFINE}")
    needs_fn = [t for t in tasks if t != "gallery"]
    if needs_fn and not _functions(cfg) and "dtm_table" not in cfg:
        raise ConfigError(f"tasks {needs_fn} need 'function' or 'functions'")
    if needs_fn and "space" not in cfg:
        raise ConfigError("a 'space' description is required")
    return cfg


def _wrap(title: str, reports: list[Report]) -> Report:
    out = Report(title)
    for r in reports:
        out.add(Check(r.title, "all checks pass", r.passed, len(r.checks)))
    out.data["reports"] = [r.to_json() for r in reports]
    return out


def _variations(lam) -> tuple[Report, str]:
    sp = lam.space
    t = table_for(lam)
    rep = Report("variations")
    rows = []
    for A in sp.admissible_sets():
        p, m, a = t.triple(A)
        rows.append({"region": sp.labels(A), "plus": p, "minus": m, "total": a})
    rep.data["table"] = rows
    csv = csv_table(sp, ((A, t.plus(A)) for A in sp.admissible_sets()))
    return rep, csv


def _extension(lam) -> Report:
    if any(lam.value(K) < 0 for K in lam.space.compacts()):
        rep = Report("extension from compacts")
        c = rep.add(Check("applicable", "extension needs a nonnegative set function", None))
        c.notes.append("λ takes negative values; see the variations task for λ⁺")
        return rep
    res = extend_from_compacts(lam)
    res.report.data.update(exists=res.exists, verdicts=res.verdicts)
    if res.witness is not None:
        res.report.data["witness"] = res.witness.labels
    return res.report


def execute(cfg: dict) -> tuple[Report, dict[str, str]]:
    """Run the configured tasks; returns the combined report and CSV files by name."""
    cfg = validate(cfg)
    seed = cfg.get("seed", 0)
    depth = cfg.get("refine", 0)
    trials = cfg.get("trials", 50)
    tasks = cfg["tasks"]
    out = Report("dtm-lab run")
    out.data.update(schema_version=SCHEMA_VERSION, tasks=tasks, seed=seed, refine=depth)
    files: dict[str, str] = {}
    results = []

    if "gallery" in tasks:
        g = run_gallery(seed=seed, trials=cfg.get("gallery_trials", 10),
                        names=cfg.get("items"), constructions=cfg.get("constructions", True))
        results.append(("gallery", g))

    fns = _functions(cfg)
    sp = build_space(cfg["space"]) if "space" in cfg else None
    if "dtm_table" in cfg:
        entries = {}
        for item in cfg["dtm_table"]:
            if not isinstance(item, list) or len(item) != 2:
                raise ConfigError("dtm_table entries are [cells, value] pairs")
            entries[sp.mask(item[0])] = item[1]
        results.append(("dtm_table/axioms", check_dtm_axioms(sp, entries, "dtm_table")))

    for name in sorted(fns):
        lam = from_descriptor(sp, fns[name])
        for _ in range(depth):
            lam, _ = lam.refined()
        nu = None
        for task in tasks:
            key = f"{name}/{task}"
            if task == "gallery":
                continue
            if task == "variations":
                rep, csv = _variations(lam)
                files[f"{name}_plus.csv"] = csv
            elif task == "identities":
                rep = variation_identities_suite(lam)
            elif task == "axioms":
                add = check_compact_additivity(lam, seed=seed)
                reps = [add]
                if add.passed:
                    for sign in ("+", "-", "abs"):
                        reps.append(check_dtm_axioms(lam.space,
                                                     DeficientTM.from_function(lam, sign)))
                rep = _wrap("axioms", reps)
            elif task == "resolution":
                rep = resolution_report(lam)
            else:
                if nu is None:
                    nu = DeficientTM.from_function(lam, "+", provenance=f"{name} (λ⁺)")
                if task == "extension":
                    rep = _extension(lam)
                elif task == "minimality":
                    rep = smallest_dominating_certificate(lam, trials=trials, seed=seed)
                elif task == "regularity":
                    rep = regularity_suite(nu)
                elif task == "classify":
                    rep = classify(nu)
                    files[f"{name}_dtm.csv"] = dtm_csv(nu)
                    if rep.data["subadditive"] and lam.space.n <= 16:
                        table = outer_measure(nu)
                        files[f"{name}_outer.csv"] = csv_table(lam.space, table.rows())
                        m = extend_to_measure(nu)
                        files[f"{name}_measure.csv"] = csv_table(
                            lam.space, ((A, m.value(A)) for A in lam.space.admissible_sets()))
                elif task == "constructions":
                    rep = construction_suite(nu)
            results.append((key, rep))

    for key, rep in results:
        out.add(Check(key, rep.title, rep.passed, len(rep.checks)))
    out.data["reports"] = {key: rep.to_json() for key, rep in results}
    return out, files


def _write(report: Report, files: dict[str, str], out_dir: str | None) -> None:
    text = dumps(report)
    if out_dir is None:
        sys.stdout.write(text)
        return
    d = Path(out_dir)
    d.mkdir(parents=True, exist_ok=True)
    (d / "report.json").write_text(text, encoding="utf-8")
    for name, body in sorted(files.items()):
        (d / name).write_text(body, encoding="utf-8")
    summary = "PASS" if report.passed else "FAIL"
    failed = [c.name for c in report.checks if c.passed is False]
    print(f"{summary}: {len(report.checks)} task reports written to {d}"
          + (f"; failing: {', '.join(failed)}" if failed else ""))


def _item_config(name: str) -> dict:
    it = get_item(name)
    return {"space": it.space, "functions": {it.name: it.descriptor}}


def _shorthand(args, tasks: list[str]) -> dict:
    if args.item:
        cfg = _item_config(args.item)
    elif args.config:
        cfg = load_config(args.config)
    else:
        raise ConfigError("give a config file or --item NAME")
    cfg["tasks"] = tasks
    return cfg


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dtm-lab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config_optional=False):
        if config_optional:
            sp.add_argument("config", nargs="?", help="JSON config file")
            sp.add_argument("--item", help="use a gallery item instead of a config")
        sp.add_argument("--out", help="directory for report.json and CSV tables")
        sp.add_argument("--seed", type=int, help="seed for randomized tasks")
        sp.add_argument("--refine", type=int, help=f"subdivision depth 0..{MAX_REFINE}")

    r = sub.add_parser("run", help="run the tasks listed in a config")
    r.add_argument("config")
    common(r)
    g = sub.add_parser("gallery", help="run the gallery and its verification battery")
    common(g)
    g.add_argument("--item", action="append", help="restrict to named items (repeatable)")
    g.add_argument("--no-constructions", action="store_true")
    for name, help_ in (("check", "axioms, variation identities and regularity"),
                        ("classify", "topological-measure and measure classification"),
                        ("construct", "run every construction and check the outputs")):
        common(sub.add_parser(name, help=help_), config_optional=True)
    sub.add_parser("list", help="list gallery item names")
    return p


SHORTHAND = {"check": ["axioms", "identities", "regularity"], "classify": ["classify"],
             "construct": ["constructions"]}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "list":
            from .gallery import gallery

            for it in gallery():
                print(f"{it.name}: {it.claim}")
            return 0
        if args.command == "run":
            cfg = load_config(args.config)
        elif args.command == "gallery":
            cfg = {"tasks": ["gallery"], "seed": 0, "items": args.item,
                   "constructions": not args.no_constructions}
        else:
            cfg = _shorthand(args, SHORTHAND[args.command])
        if args.seed is not None:
            cfg["seed"] = args.seed
        if args.refine is not None:
            cfg["refine"] = args.refine
        report, files = execute(cfg)
    except CapacityError as exc:
        print(f"error: {exc} (offending count: {exc.count})", file=sys.stderr)
        return 2
    except (DTMLabError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _write(report, files, args.out)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
