import pytest
from hypothesis import given, strategies as st

from marscolony.engine import run
from marscolony.experiments import (
    CalibrationTarget,
    StabilityVerdict,
    SweepSpec,
    calibrate,
    classify_stability,
    min_stable_population,
    min_stable_band_target,
    run_sweep,
    stable_fraction_target,
    survival_ordering_target,
    write_sweep_summary,
)

from helpers import quiet_config


def test_constant_series_is_stable():
    assert classify_stability([20] * 500, threshold=10, window=84)


def test_long_dip_is_unstable():
    series = [20] * 100 + [8] * 100 + [20] * 100
    assert not classify_stability(series, threshold=10, window=84)


def test_boundary_dip_is_stable():
    # "Bounces back within" the window: an 84-tick dip is still acceptable.
    series = [20] * 100 + [9] * 84 + [12] * 100
    assert classify_stability(series, threshold=10, window=84)


def test_dip_of_window_plus_one_is_unstable():
    series = [20] * 100 + [9] * 85 + [12] * 100
    assert not classify_stability(series, threshold=10, window=84)


def test_final_census_below_threshold_is_unstable():
    assert not classify_stability([20] * 100 + [9], threshold=10, window=84)


def test_two_separate_dips_each_get_their_own_window():
    series = [20] * 10 + [9] * 80 + [15] * 10 + [9] * 80 + [15] * 10
    assert classify_stability(series, threshold=10, window=84)


def test_empty_series_is_rejected():
    with pytest.raises(ValueError):
        classify_stability([], threshold=10, window=84)


@given(
    series=st.lists(st.integers(min_value=0, max_value=40), min_size=1, max_size=300),
    bumps=st.lists(st.integers(min_value=0, max_value=30), min_size=1, max_size=300),
)
def test_classifier_is_monotone_in_population(series, bumps):
    raised = [p + b for p, b in zip(series, bumps)] + series[len(bumps):]
    if classify_stability(series, threshold=10, window=20):
        assert classify_stability(raised, threshold=10, window=20)


def test_aggregate_requires_strict_majority():
    assert StabilityVerdict(10, (True, True, False)).aggregate
    assert not StabilityVerdict(10, (True, False, False)).aggregate
    assert not StabilityVerdict(10, (True, True, False, False)).aggregate


def test_aggregate_is_symmetric_in_replicate_order():
    flags = (True, False, True, False, True)
    from itertools import permutations

    verdicts = {StabilityVerdict(10, p).aggregate for p in permutations(flags)}
    assert verdicts == {True}


def test_min_stable_all_stable_returns_smallest():
    verdicts = [StabilityVerdict(p, (True,)) for p in (30, 10, 20)]
    assert min_stable_population(verdicts) == 10


def test_min_stable_none_stable_returns_none():
    verdicts = [StabilityVerdict(p, (False,)) for p in (10, 20)]
    assert min_stable_population(verdicts) is None


def test_min_stable_reference_verdict_pattern():
    # The observed sweep pattern: 10/14/18/26/38 fail, 22/30/34/42/46/50
    # bounce back; the minimum viable initial population is 22.
    pattern = {
        10: False,
        14: False,
        18: False,
        22: True,
        26: False,
        30: True,
        34: True,
        38: False,
        42: True,
        46: True,
        50: True,
    }
    verdicts = [
        StabilityVerdict(pop, (stable,) * 5) for pop, stable in pattern.items()
    ]
    assert min_stable_population(verdicts) == 22


def _tiny_config():
    # Everything calm and production on: populations persist, so verdicts
    # reduce to "population stayed at or above threshold".
    return quiet_config(ticks=40, production_enabled=True, stockpile_weeks=400)


def test_degenerate_sweep_equals_single_classification():
    cfg = _tiny_config()
    spec = SweepSpec.make([20], replicates=1, base_seed=3)
    sweep = run_sweep(spec, base_config=cfg)
    assert len(sweep.runs) == 1
    result = run(cfg.replace(initial_population=20), seed=3)
    expected = classify_stability(
        result.population_series(), cfg.stability_threshold, cfg.bounce_back_window
    )
    assert sweep.verdicts[0].per_replicate == (expected,)


def test_sweep_shape_eleven_populations_five_replicates():
    spec = SweepSpec.make(range(10, 51, 4), replicates=5, base_seed=0)
    sweep = run_sweep(spec, base_config=_tiny_config())
    assert len(sweep.runs) == 55
    assert len(sweep.verdicts) == 11
    assert [v.initial_population for v in sweep.verdicts] == list(range(10, 51, 4))


def test_replicate_seeds_are_base_plus_index():
    spec = SweepSpec.make([8, 12], replicates=3, base_seed=100)
    sweep = run_sweep(spec, base_config=_tiny_config())
    for summary in sweep.runs:
        assert summary.seed == 100 + summary.replicate


def test_sweep_is_deterministic_across_reruns_and_jobs():
    spec = SweepSpec.make([8, 12, 16], replicates=2, base_seed=7)
    cfg = _tiny_config()
    serial = run_sweep(spec, base_config=cfg, jobs=1)
    parallel = run_sweep(spec, base_config=cfg, jobs=2)
    again = run_sweep(spec, base_config=cfg, jobs=1)
    assert serial.runs == parallel.runs == again.runs
    assert serial.verdicts == parallel.verdicts


def test_sweep_writes_summary_and_run_artifacts(tmp_path):
    spec = SweepSpec.make([8, 12], replicates=2, base_seed=1)
    sweep = run_sweep(spec, base_config=_tiny_config(), out_dir=tmp_path)
    summary = tmp_path / "sweep_summary.csv"
    assert summary.exists()
    lines = summary.read_text().splitlines()
    assert len(lines) == 3  # header + one row per population
    assert lines[0].startswith("initial_population,replicate_0_stable")
    csvs = list(tmp_path.glob("run_*.csv"))
    events = list(tmp_path.glob("run_*.events.jsonl"))
    assert len(csvs) == 4 and len(events) == 4


def test_sweep_rejects_empty_population_list():
    with pytest.raises(ValueError):
        run_sweep(SweepSpec.make([]), base_config=_tiny_config())


def test_summary_matches_verdicts(tmp_path):
    spec = SweepSpec.make([8], replicates=3, base_seed=0)
    sweep = run_sweep(spec, base_config=_tiny_config())
    path = tmp_path / "s.csv"
    write_sweep_summary(sweep, path)
    row = path.read_text().splitlines()[1].split(",")
    assert int(row[0]) == 8
    assert row[1:4] == [str(f).lower() for f in sweep.verdicts[0].per_replicate]


def test_calibrate_rejects_empty_grid():
    with pytest.raises(ValueError):
        calibrate(_tiny_config(), {}, [CalibrationTarget("x", lambda r: True)], [8])


def test_calibrate_single_point_grid():
    scores = calibrate(
        _tiny_config(),
        {"sleep_regen": [5.0]},
        [CalibrationTarget("always", lambda r: True)],
        sweep_populations=[8],
        replicates=1,
    )
    assert len(scores) == 1
    assert scores[0].score == 1
    assert scores[0].overrides == {"sleep_regen": 5.0}


def test_calibrate_ranks_dominant_point_first():
    # One grid point satisfies both targets, the other only one; the
    # dominant point must rank first.
    def well_rested(result) -> bool:
        return result.spec.overrides == (("sleep_regen", 6.0),)

    scores = calibrate(
        _tiny_config(),
        {"sleep_regen": [4.0, 6.0]},
        [
            CalibrationTarget("well_rested", well_rested),
            CalibrationTarget("always", lambda r: True),
        ],
        sweep_populations=[8],
        replicates=1,
    )
    assert scores[0].overrides == {"sleep_regen": 6.0}
    assert scores[0].score == 2
    assert scores[1].score == 1


def test_calibrate_persists_ranked_results(tmp_path):
    out = tmp_path / "cal.jsonl"
    calibrate(
        _tiny_config(),
        {"sleep_regen": [5.0, 6.0]},
        [CalibrationTarget("always", lambda r: True)],
        sweep_populations=[8],
        replicates=1,
        out_path=out,
    )
    import json

    lines = [json.loads(l) for l in out.read_text().splitlines()]
    assert len(lines) == 2
    assert all("overrides" in l and "score" in l for l in lines)


def test_builtin_targets_on_synthetic_results():
    from marscolony.experiments import RunSummary, SweepResult

    spec = SweepSpec.make([40, 50], replicates=2)
    runs = [
        RunSummary(40, 0, 0, True, 20, 1, 3, 5, 9),
        RunSummary(40, 1, 1, True, 18, 2, 3, 5, 6),
        RunSummary(50, 0, 0, True, 30, 0, 5, 8, 12),
        RunSummary(50, 1, 1, False, 5, 1, 1, 1, 2),
    ]
    verdicts = [
        StabilityVerdict(40, (True, True)),
        StabilityVerdict(50, (True, False)),
    ]
    result = SweepResult(spec=spec, verdicts=verdicts, runs=runs)
    assert stable_fraction_target("t", 50, 0.5).check(result)
    assert not stable_fraction_target("t", 50, 0.9).check(result)
    assert min_stable_band_target("t", 30, 45).check(result)
    assert not min_stable_band_target("t", 45, 60).check(result)
    assert survival_ordering_target("t", 0.8).check(result)  # 4/4 runs
