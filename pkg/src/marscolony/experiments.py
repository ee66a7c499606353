"""Batch replication: population sweeps, the bounce-back stability
classifier, minimum-stable-population search, and calibration grid search
over the invented probability and penalty constants.

A colony counts as stable when its population never sits below the
threshold for longer than the bounce-back window and ends the run at or
above the threshold. Sweeps run each (population, replicate) cell as an
independent seeded run, optionally in parallel; results are merged in a
fixed order so the output is byte-identical regardless of worker count.
"""

from __future__ import annotations

import csv
import itertools
import json
import os
from dataclasses import dataclass, field
from multiprocessing import get_context
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

from .config import SimConfig
from .engine import RunResult, run


def classify_stability(
    population_series: Sequence[int], threshold: int = 10, window: int = 84
) -> bool:
    """Bounce-back viability check over one population trajectory.

    Stable iff every maximal contiguous stretch below the threshold lasts at
    most ``window`` ticks and the final census is at or above the threshold.
    """
    if len(population_series) == 0:
        raise ValueError("population series must be non-empty")
    below = 0
    for pop in population_series:
        if pop < threshold:
            below += 1
            if below > window:
                return False
        else:
            below = 0
    return population_series[-1] >= threshold


@dataclass(frozen=True)
class SweepSpec:
    """One population sweep: replicate seeds are base_seed + replicate index."""

    populations: tuple[int, ...]
    replicates: int = 5
    base_seed: int = 0
    overrides: tuple[tuple[str, Any], ...] = ()

    @classmethod
    def make(
        cls,
        populations: Sequence[int],
        replicates: int = 5,
        base_seed: int = 0,
        **overrides: Any,
    ) -> "SweepSpec":
        return cls(
            populations=tuple(populations),
            replicates=replicates,
            base_seed=base_seed,
            overrides=tuple(sorted(overrides.items())),
        )

    def seed_for(self, replicate: int) -> int:
        return self.base_seed + replicate


@dataclass(frozen=True)
class RunSummary:
    """Stability verdict and final census of one sweep cell."""

    initial_population: int
    replicate: int
    seed: int
    stable: bool
    final_population: int
    final_neurotic: int
    final_reactive: int
    final_social: int
    final_agreeable: int


@dataclass(frozen=True)
class StabilityVerdict:
    initial_population: int
    per_replicate: tuple[bool, ...]

    @property
    def aggregate(self) -> bool:
        """Majority rule: stable iff strictly more than half the replicates are."""
        return sum(self.per_replicate) * 2 > len(self.per_replicate)


@dataclass
class SweepResult:
    spec: SweepSpec
    verdicts: list[StabilityVerdict]
    runs: list[RunSummary]

    def min_stable_population(self) -> Optional[int]:
        return min_stable_population(self.verdicts)


def min_stable_population(verdicts: Sequence[StabilityVerdict]) -> Optional[int]:
    """Smallest initial population whose aggregate verdict is stable."""
    for v in sorted(verdicts, key=lambda v: v.initial_population):
        if v.aggregate:
            return v.initial_population
    return None


def _cell_config(base: SimConfig, spec: SweepSpec, population: int) -> SimConfig:
    return base.replace(**dict(spec.overrides)).replace(initial_population=population)


def _run_cell(args: tuple) -> tuple[int, int, RunSummary, Optional[str]]:
    """Worker: one (population, replicate) cell. Returns a sort key + summary."""
    base, spec, population, replicate, out_dir, emit_plots = args
    config = _cell_config(base, spec, population)
    seed = spec.seed_for(replicate)
    result = run(config, seed)
    if out_dir is not None:
        out = Path(out_dir)
        result.write_csv(out / f"{result.basename()}.csv")
        result.write_event_log(out / f"{result.basename()}.events.jsonl")
        if emit_plots:
            write_population_plot(result, out / f"{result.basename()}.svg")
    series = result.population_series()
    stable = classify_stability(
        series, config.stability_threshold, config.bounce_back_window
    )
    final = result.final_report()
    summary = RunSummary(
        initial_population=population,
        replicate=replicate,
        seed=seed,
        stable=stable,
        final_population=final.population,
        final_neurotic=final.n_neurotic,
        final_reactive=final.n_reactive,
        final_social=final.n_social,
        final_agreeable=final.n_agreeable,
    )
    return population, replicate, summary, None


def run_sweep(
    spec: SweepSpec,
    base_config: Optional[SimConfig] = None,
    out_dir: Optional[str | Path] = None,
    jobs: int = 1,
    emit_plots: bool = False,
) -> SweepResult:
    """Run the full population x replicate grid and classify each run.

    Cells execute independently (``jobs`` processes when > 1) and results
    are merged in (population, replicate) order, so the verdict table does
    not depend on the degree of parallelism.
    """
    if not spec.populations:
        raise ValueError("sweep needs at least one population value")
    base = base_config if base_config is not None else SimConfig()
    # Validate every cell config up front so a bad override fails fast.
    for population in spec.populations:
        _cell_config(base, spec, population)
    if out_dir is not None:
        Path(out_dir).mkdir(parents=True, exist_ok=True)

    cells = [
        (base, spec, population, replicate, None if out_dir is None else str(out_dir), emit_plots)
        for population in spec.populations
        for replicate in range(spec.replicates)
    ]
    if jobs > 1 and len(cells) > 1:
        with get_context().Pool(processes=jobs) as pool:
            raw = pool.map(_run_cell, cells)
    else:
        raw = [_run_cell(cell) for cell in cells]

    raw.sort(key=lambda item: (item[0], item[1]))
    runs = [item[2] for item in raw]
    verdicts = []
    for population, group in itertools.groupby(runs, key=lambda s: s.initial_population):
        group = list(group)
        verdicts.append(
            StabilityVerdict(
                initial_population=population,
                per_replicate=tuple(s.stable for s in group),
            )
        )
    verdicts.sort(key=lambda v: v.initial_population)
    result = SweepResult(spec=spec, verdicts=verdicts, runs=runs)
    if out_dir is not None:
        write_sweep_summary(result, Path(out_dir) / "sweep_summary.csv")
    return result


def write_sweep_summary(result: SweepResult, path: str | Path) -> None:
    """Verdict table: one row per initial population, one column per replicate."""
    replicates = result.spec.replicates
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["initial_population"]
            + [f"replicate_{i}_stable" for i in range(replicates)]
            + ["n_stable", "aggregate_stable"]
        )
        for v in result.verdicts:
            writer.writerow(
                [v.initial_population]
                + [str(flag).lower() for flag in v.per_replicate]
                + [sum(v.per_replicate), str(v.aggregate).lower()]
            )


def write_population_plot(result: RunResult, path: str | Path) -> None:
    """Population-vs-tick line chart for one run, written as SVG."""
    import matplotlib

    matplotlib.use("svg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(8, 4))
    series = result.population_series()
    ax.plot(range(len(series)), series, lw=1.0)
    ax.axhline(result.config.stability_threshold, color="red", ls="--", lw=0.8)
    ax.set_xlabel("tick (weeks)")
    ax.set_ylabel("population")
    ax.set_title(
        f"initial population {result.config.initial_population}, seed {result.seed}"
    )
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


@dataclass(frozen=True)
class CalibrationTarget:
    """A named pass/fail predicate over a sweep result."""

    name: str
    predicate: Callable[[SweepResult], bool]

    def check(self, result: SweepResult) -> bool:
        return bool(self.predicate(result))


@dataclass
class CalibrationScore:
    overrides: dict[str, Any]
    satisfied: dict[str, bool]

    @property
    def score(self) -> int:
        return sum(self.satisfied.values())


def stable_fraction_target(
    name: str, min_population: int, min_fraction: float
) -> CalibrationTarget:
    """At least this fraction of replicates stable among populations >= N."""

    def predicate(result: SweepResult) -> bool:
        flags = [
            s.stable for s in result.runs if s.initial_population >= min_population
        ]
        if not flags:
            return False
        return sum(flags) / len(flags) >= min_fraction

    return CalibrationTarget(name, predicate)


def min_stable_band_target(name: str, low: int, high: int) -> CalibrationTarget:
    """Minimum stable population falls inside [low, high]."""

    def predicate(result: SweepResult) -> bool:
        mn = result.min_stable_population()
        return mn is not None and low <= mn <= high

    return CalibrationTarget(name, predicate)


def survival_ordering_target(name: str, min_fraction: float) -> CalibrationTarget:
    """Final agreeable count strictly beats final neurotic count in enough runs."""

    def predicate(result: SweepResult) -> bool:
        if not result.runs:
            return False
        wins = sum(1 for s in result.runs if s.final_agreeable > s.final_neurotic)
        return wins / len(result.runs) >= min_fraction

    return CalibrationTarget(name, predicate)


def calibrate(
    base_config: SimConfig,
    knob_grid: dict[str, Sequence[Any]],
    targets: Sequence[CalibrationTarget],
    sweep_populations: Sequence[int],
    replicates: int = 5,
    base_seed: int = 0,
    jobs: int = 1,
    out_path: Optional[str | Path] = None,
) -> list[CalibrationScore]:
    """Grid-search the invented constants against qualitative targets.

    Every grid point runs a full sweep and is scored by how many targets it
    satisfies; results come back ranked best-first (ties keep grid order).
    """
    if not knob_grid:
        raise ValueError("calibration grid must contain at least one knob")
    if not targets:
        raise ValueError("calibration needs at least one target")
    names = sorted(knob_grid)
    scores: list[CalibrationScore] = []
    for values in itertools.product(*(knob_grid[name] for name in names)):
        overrides = dict(zip(names, values))
        spec = SweepSpec.make(
            sweep_populations, replicates=replicates, base_seed=base_seed, **overrides
        )
        result = run_sweep(spec, base_config=base_config, jobs=jobs)
        scores.append(
            CalibrationScore(
                overrides=overrides,
                satisfied={t.name: t.check(result) for t in targets},
            )
        )
    order = {id(s): i for i, s in enumerate(scores)}
    scores.sort(key=lambda s: (-s.score, order[id(s)]))
    if out_path is not None:
        _write_calibration(scores, out_path)
    return scores


def _write_calibration(scores: list[CalibrationScore], path: str | Path) -> None:
    with open(path, "w") as fh:
        for s in scores:
            fh.write(
                json.dumps(
                    {"overrides": s.overrides, "score": s.score, "targets": s.satisfied},
                    sort_keys=True,
                )
                + "\n"
            )


def default_jobs() -> int:
    return os.cpu_count() or 1
