"""Command-line entry point: single runs, population sweeps, and
calibration grid search.

Precedence for settings is CLI flags over config-file values over built-in
defaults. Seeds are always explicit or derived (base seed + replicate
index); wall-clock seeding happens only with ``--seed auto``.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from .config import ConfigError, SimConfig
from .engine import run
from .experiments import (
    SweepSpec,
    calibrate,
    default_jobs,
    min_stable_band_target,
    run_sweep,
    stable_fraction_target,
    survival_ordering_target,
    write_population_plot,
)


def parse_population_range(text: str) -> list[int]:
    """Parse ``N`` or an inclusive ``start:stop:step`` range."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return [int(parts[0])]
        if len(parts) == 3:
            start, stop, step = (int(p) for p in parts)
            if step <= 0 or stop < start:
                raise ValueError
            return list(range(start, stop + 1, step))
    except ValueError:
        pass
    raise ConfigError(f"population must be N or start:stop:step, got {text!r}")


def _load_config(path: Optional[str]) -> SimConfig:
    if path is None:
        cfg = SimConfig()
        cfg.validate()
        return cfg
    return SimConfig.load(path)


def _resolve_seed(raw: str) -> int:
    if raw == "auto":
        seed = time.time_ns() % (2**31)
        print(f"seed auto -> {seed}")
        return seed
    return int(raw)


def _apply_common_overrides(cfg: SimConfig, args: argparse.Namespace) -> SimConfig:
    overrides = {}
    if getattr(args, "ticks", None) is not None:
        overrides["ticks"] = args.ticks
    if getattr(args, "no_production", False):
        overrides["production_enabled"] = False
    return cfg.replace(**overrides) if overrides else cfg


def _out_dir(args: argparse.Namespace) -> Path:
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write_probe"
        probe.touch()
        probe.unlink()
    except OSError as exc:
        raise ConfigError(f"output directory {out} is not writable: {exc}") from exc
    return out


def cmd_run(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    cfg = _apply_common_overrides(cfg, args)
    if args.population is not None:
        values = parse_population_range(args.population)
        if len(values) != 1:
            raise ConfigError("run takes a single population, not a range")
        cfg = cfg.replace(initial_population=values[0])
    seed = _resolve_seed(args.seed)
    out = _out_dir(args)
    result = run(cfg, seed)
    csv_path = out / f"{result.basename()}.csv"
    result.write_csv(csv_path)
    result.write_event_log(out / f"{result.basename()}.events.jsonl")
    if args.emit_plots:
        write_population_plot(result, out / f"{result.basename()}.svg")
    final = result.final_report()
    print(
        f"final population {final.population} after {len(result.reports)} ticks | "
        f"shipments {final.shipments_received} disasters {final.shipping_disasters} "
        f"accidents {final.habitat_accidents} births {final.births} deaths {final.deaths} | "
        f"{csv_path}"
    )
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    cfg = _apply_common_overrides(cfg, args)
    populations = parse_population_range(args.population)
    spec = SweepSpec.make(
        populations, replicates=args.replicates, base_seed=int(args.seed)
    )
    out = _out_dir(args)
    result = run_sweep(
        spec,
        base_config=cfg,
        out_dir=out,
        jobs=args.jobs,
        emit_plots=args.emit_plots,
    )
    for v in result.verdicts:
        marks = " ".join("S" if flag else "u" for flag in v.per_replicate)
        verdict = "stable" if v.aggregate else "unstable"
        print(f"population {v.initial_population:4d}  [{marks}]  {verdict}")
    mn = result.min_stable_population()
    print(f"min stable population: {mn if mn is not None else 'none'}")
    print(f"summary: {out / 'sweep_summary.csv'}")
    return 0


def cmd_calibrate(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    cfg = _apply_common_overrides(cfg, args)
    if args.grid is not None:
        grid = json.loads(Path(args.grid).read_text())
        if not isinstance(grid, dict) or not all(
            isinstance(v, list) for v in grid.values()
        ):
            raise ConfigError("grid file must map knob names to value lists")
    else:
        # Single-point grid: score the shipped defaults themselves.
        grid = {"production_enabled": [cfg.production_enabled]}
    populations = parse_population_range(args.population)
    targets = [
        stable_fraction_target("large_populations_stable", 50, 0.9),
        min_stable_band_target("min_stable_in_band", 18, 34),
        survival_ordering_target("agreeable_outlives_neurotic", 0.8),
    ]
    out = _out_dir(args)
    scores = calibrate(
        cfg,
        grid,
        targets,
        sweep_populations=populations,
        replicates=args.replicates,
        base_seed=int(args.seed),
        jobs=args.jobs,
        out_path=out / "calibration.jsonl",
    )
    for s in scores[:10]:
        flags = " ".join(f"{name}={'y' if ok else 'n'}" for name, ok in s.satisfied.items())
        print(f"score {s.score}/{len(s.satisfied)}  {s.overrides}  {flags}")
    print(f"results: {out / 'calibration.jsonl'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="marscolony",
        description="Deterministic Mars-settlement simulation and experiment harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="JSON config file (defaults apply if absent)")
        p.add_argument("--ticks", type=int, help="override run length in ticks")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument(
            "--no-production",
            action="store_true",
            help="disable local food/water/air production",
        )

    p_run = sub.add_parser("run", help="run one seeded replicate")
    add_common(p_run)
    p_run.add_argument("--seed", default="0", help="integer seed, or 'auto'")
    p_run.add_argument(
        "--population", "--populations", help="initial population override"
    )
    p_run.add_argument("--emit-plots", action="store_true", help="write an SVG plot")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="population sweep with replicates")
    add_common(p_sweep)
    p_sweep.add_argument("--seed", default="0", help="base seed (replicates add their index)")
    p_sweep.add_argument(
        "--population",
        "--populations",
        default="10:50:4",
        help="population value or inclusive range start:stop:step",
    )
    p_sweep.add_argument("--replicates", type=int, default=5)
    p_sweep.add_argument("--jobs", type=int, default=default_jobs())
    p_sweep.add_argument("--emit-plots", action="store_true", help="write SVG plots")
    p_sweep.set_defaults(func=cmd_sweep)

    p_cal = sub.add_parser("calibrate", help="grid-search calibration knobs")
    add_common(p_cal)
    p_cal.add_argument("--seed", default="0", help="base seed")
    p_cal.add_argument("--grid", help="JSON file mapping knob names to value lists")
    p_cal.add_argument(
        "--population",
        "--populations",
        default="10:50:8",
        help="sweep populations per grid point",
    )
    p_cal.add_argument("--replicates", type=int, default=3)
    p_cal.add_argument("--jobs", type=int, default=default_jobs())
    p_cal.set_defaults(func=cmd_calibrate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
