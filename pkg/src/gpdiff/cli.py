"""Command-line entry point.

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

Run configuration (JSON) for ``gpdiff evolve``::

    {
      "seed": 1,
      "opt1": "de-f05",                        # preset name, or
      "opt2": {"preset": "de-f03", "budget": 200},   # preset + overrides, or
                                               # a full {"algorithm": ...} dict
      "domain": {"lower": -5, "upper": 5, "dimension": 2},
      "population_size": 50, "max_generations": 1000,
      "crossover_rate": 0.9, "mutation_rate": 0.3,
      "random_init_threshold": 200, "repetitions": 3,
      "output": {"archive": "archive.json", "progress": "progress.csv"}
    }

Any other :class:`gpdiff.engine.EngineConfig` field may also be given.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
from pathlib import Path

from . import _rng, bench, fla
from .behavior import evaluate_pair
from .engine import Archive, EngineConfig, best_separating, evolve
from .expr import Domain, ParseError, parse
from .optim import PRESETS, OptimizerConfig, preset

log = logging.getLogger("gpdiff")


class ConfigError(Exception):
    pass


def atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def resolve_optimizer(spec) -> OptimizerConfig:
    try:
        if isinstance(spec, str):
            return preset(spec)
        if isinstance(spec, dict):
            spec = dict(spec)
            if "preset" in spec:
                return preset(spec.pop("preset"), **spec)
            return OptimizerConfig.from_dict(spec)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad optimizer {spec!r}: {exc}") from None
    raise ConfigError(f"bad optimizer {spec!r}")


def load_run_config(path, seed=None) -> tuple[EngineConfig, dict]:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    output = raw.pop("output", {})
    if seed is not None:
        raw["seed"] = seed
    if raw.get("seed") is None:
        raise ConfigError("seed required")
    for key in ("opt1", "opt2"):
        if key in raw:
            raw[key] = resolve_optimizer(raw[key])
    if "domain" in raw:
        try:
            raw["domain"] = Domain(**raw["domain"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad domain: {exc}") from None
    try:
        return EngineConfig(**raw), output
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def read_expr(source: str):
    try:
        text = sys.stdin.read() if source == "-" else Path(source).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read expression: {exc}") from None
    try:
        return parse(text.strip())
    except ParseError as exc:
        raise ConfigError(f"parse error: {exc}") from None


def _budgeted(name: str, budget):
    cfg = resolve_optimizer(name)
    if budget is not None:
        try:
            cfg = cfg.replace(budget=budget)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    return cfg


def _domain(args, dimension=2) -> Domain:
    try:
        return Domain(args.lower, args.upper, dimension)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _emit(text: str, out) -> None:
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


# -- subcommands --------------------------------------------------------------

def cmd_evolve(args):
    config, output = load_run_config(args.config, args.seed)
    if args.out:
        output = {}
    out_dir = Path(args.out or ".")
    archive_path = Path(output.get("archive", out_dir / "archive.json"))
    progress_path = Path(output.get("progress", out_dir / "progress.csv"))

    def run():
        progress_path.parent.mkdir(parents=True, exist_ok=True)
        with open(progress_path, "w", newline="") as fh:
            fields = ["generation", "filled", "max_d", "mean_d", "inserted", "invalid"]
            writer = csv.DictWriter(fh, fields)
            writer.writeheader()

            def on_progress(rec):
                writer.writerow(rec)
                fh.flush()

            archive = evolve(config, on_progress, workers=args.threads)
        atomic_write(archive_path, json.dumps(archive.to_dict(config), indent=1) + "\n")
        try:
            best = best_separating(archive, require_unequal_best=True)
            summary = {"cells": len(archive), **best.to_dict()}
        except LookupError:
            summary = {"cells": len(archive), "best": None}
        print(json.dumps(summary))

    return run


def cmd_distance(args):
    tree = read_expr(args.expr)
    opt1, opt2 = _budgeted(args.opt1, args.budget), _budgeted(args.opt2, args.budget)
    domain = _domain(args)
    if args.reps < 1:
        raise ConfigError("--reps must be >= 1")

    def run():
        score = evaluate_pair(tree, opt1, opt2, domain, args.reps, args.seed, pooled=args.pooled)
        _emit(json.dumps(score.to_dict()) + "\n", args.out)

    return run


def cmd_descriptors(args):
    tree = read_expr(args.expr)
    domain = _domain(args)
    if (args.opt1 is None) != (args.opt2 is None):
        raise ConfigError("--opt1 and --opt2 must be given together")
    pair = None
    if args.opt1:
        pair = _budgeted(args.opt1, args.budget), _budgeted(args.opt2, args.budget)

    def run():
        r = fla.fdc(tree, domain, args.samples, _rng.stream(args.seed, _rng.FDC))
        p = fla.neutrality(tree, domain, args.steps, args.eps, _rng.stream(args.seed, _rng.WALK))
        out = {"fdc": r, "neutrality": p}
        equal_best = False
        if pair:
            equal_best = evaluate_pair(tree, *pair, domain, args.reps, args.seed).equal_best
            out["equal_best"] = equal_best
        b = fla.to_bin(r, p, equal_best)
        out["bin"] = list(b) if pair else list(b[:2])
        _emit(json.dumps(out) + "\n", args.out)

    return run


def cmd_validate(args):
    if (args.expr is None) == (args.baseline is None):
        raise ConfigError("give exactly one of EXPR or --baseline")
    if args.dimension < 2:
        raise ConfigError("--dimension must be >= 2")
    domain = _domain(args, args.dimension)
    if args.expr is not None:
        try:
            function = bench.lift(read_expr(args.expr), args.dimension)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        name = str(function)
    else:
        try:
            function = bench.baseline(args.baseline)
        except KeyError as exc:
            raise ConfigError(str(exc)) from None
        name = args.baseline
    opt1, opt2 = _budgeted(args.opt1, args.budget), _budgeted(args.opt2, args.budget)
    if args.reps < 1:
        raise ConfigError("--reps must be >= 1")

    def run():
        report = bench.validate(function, opt1, opt2, domain, args.reps, seed=args.seed, name=name)
        _emit(json.dumps(report.to_dict()) + "\n", args.out)

    return run


def heatmap_csv(archive: Archive, layer: int) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in archive.heatmap(layer):
        writer.writerow(["" if v != v else repr(float(v)) for v in row])
    return buf.getvalue()


def cmd_export_heatmap(args):
    if args.layer not in (0, 1):
        raise ConfigError("--layer must be 0 or 1")
    try:
        archive = Archive.from_dict(json.loads(Path(args.archive).read_text()))
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        raise ConfigError(f"cannot read archive {args.archive}: {exc}") from None

    def run():
        _emit(heatmap_csv(archive, args.layer), args.out)

    return run


# -- argument parsing ---------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gpdiff",
        description="Evolve benchmark functions that separate two optimizers.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    presets = sorted(PRESETS)

    def common(p, seed_default=0, box=True):
        p.add_argument("--seed", type=int, default=seed_default)
        p.add_argument("--out", help="output file (directory for evolve)")
        if box:
            p.add_argument("--lower", type=float, default=-5.0)
            p.add_argument("--upper", type=float, default=5.0)

    p = sub.add_parser("evolve", help="run MAP-Elites GP from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--threads", type=int, default=1)
    common(p, seed_default=None, box=False)
    p.set_defaults(handler=cmd_evolve)

    p = sub.add_parser("distance", help="behavioural distance of two optimizers on a function")
    p.add_argument("expr", help="file holding an s-expression ('-' for stdin)")
    p.add_argument("--opt1", default="de-f05", help=f"preset: {', '.join(presets)}")
    p.add_argument("--opt2", default="de-f03")
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--budget", type=int)
    p.add_argument("--pooled", action="store_true")
    common(p)
    p.set_defaults(handler=cmd_distance)

    p = sub.add_parser("descriptors", help="FDC / neutrality descriptors of a function")
    p.add_argument("expr")
    p.add_argument("--opt1")
    p.add_argument("--opt2")
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--budget", type=int)
    p.add_argument("--samples", type=int, default=fla.N_SAMPLES)
    p.add_argument("--steps", type=int, default=fla.WALK_STEPS)
    p.add_argument("--eps", type=float, default=fla.EPS)
    common(p)
    p.set_defaults(handler=cmd_descriptors)

    p = sub.add_parser("validate", help="lift a 2-D function and compare best solution sets")
    p.add_argument("expr", nargs="?")
    p.add_argument("--baseline", help=f"one of {', '.join(sorted(bench.BASELINES))}")
    p.add_argument("--dimension", type=int, default=10)
    p.add_argument("--opt1", default="de-f05")
    p.add_argument("--opt2", default="de-f03")
    p.add_argument("--reps", type=int, default=21)
    p.add_argument("--budget", type=int)
    common(p)
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser("export-heatmap", help="20x20 CSV of archive distances for one layer")
    p.add_argument("archive")
    p.add_argument("--layer", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_export_heatmap)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        run = args.handler(args)
    except ConfigError as exc:
        print(f"gpdiff {args.command}: {exc}", file=sys.stderr)
        return 2
    try:
        run()
    except Exception as exc:
        log.exception("run failed")
        print(f"gpdiff {args.command}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
