import numpy as np
import pytest
from hypothesis import given, strategies as st

from marscolony.agents import (
    DIRECTIONS,
    consume,
    mortality_sweep,
    move_agent,
    move_all,
    sleep,
    step_position,
)
from marscolony.core import GRID_SIZE, SettlementState, init_state

from helpers import make_martian, make_state, quiet_config

EAST = DIRECTIONS.index((1, 0))


def test_unit_step_east():
    assert step_position(25, 25, EAST) == (26, 25)


def test_toroidal_wrap_east():
    assert step_position(49, 10, EAST) == (0, 10)


def test_all_directions_are_unit_chebyshev_steps():
    for d in range(8):
        x, y = step_position(25, 25, d)
        assert max(abs(x - 25), abs(y - 25)) == 1


def test_move_agent_direction_frequencies_uniform():
    # Independent frequency oracle: 1e5 moves, every direction 0.125 +- 0.01,
    # and a chi-square statistic under the df=7, alpha=0.001 critical value.
    rng = np.random.default_rng(42)
    m = make_martian(x=25, y=25)
    counts = np.zeros(8, dtype=int)
    trials = 100_000
    for _ in range(trials):
        old = (m.x, m.y)
        move_agent(m, rng)
        dx = (m.x - old[0] + GRID_SIZE // 2) % GRID_SIZE - GRID_SIZE // 2
        dy = (m.y - old[1] + GRID_SIZE // 2) % GRID_SIZE - GRID_SIZE // 2
        counts[DIRECTIONS.index((dx, dy))] += 1
    freqs = counts / trials
    assert np.all(np.abs(freqs - 0.125) <= 0.01)
    expected = trials / 8
    chi2 = float(((counts - expected) ** 2 / expected).sum())
    assert chi2 < 24.32


def test_move_all_moves_everyone_one_step():
    state = make_state(quiet_config(initial_population=30))
    before = {m.id: (m.x, m.y) for m in state.martians}
    move_all(state)
    for m in state.martians:
        bx, by = before[m.id]
        dx = min(abs(m.x - bx), GRID_SIZE - abs(m.x - bx))
        dy = min(abs(m.y - by), GRID_SIZE - abs(m.y - by))
        assert max(dx, dy) == 1


def test_sleep_caps_at_100():
    m = make_martian(health=100.0)
    sleep(m, 5.0)
    assert m.health == 100.0


def test_sleep_adds_under_cap():
    m = make_martian(health=90.0)
    sleep(m, 5.0)
    assert m.health == 95.0


def test_sleep_cap_binds():
    m = make_martian(health=98.0)
    sleep(m, 5.0)
    assert m.health == 100.0


def _settlement(cfg, food=0.0, water=1e9, air=1e9):
    s = SettlementState(cfg, initial_population=4)
    s.food, s.water, s.air = food, water, air
    s.waste = 0.0
    return s


def test_surplus_production_is_contributed():
    cfg = quiet_config()
    s = _settlement(cfg, food=0.0)
    m = make_martian()
    m.prod_food = 12.0
    consume(m, s, cfg)
    assert s.food == pytest.approx(12.0 - 10.5)
    assert m.health == 100.0


def test_pool_covers_exact_deficit():
    cfg = quiet_config()
    s = _settlement(cfg, food=10.5)
    m = make_martian()
    consume(m, s, cfg)
    assert s.food == 0.0
    assert m.health == 100.0


def test_single_resource_shortfall_penalty():
    # Hand ledger: food need 10.5 fully unmet at penalty 10 -> health -10.
    cfg = quiet_config(shortfall_health_penalty=10.0)
    s = _settlement(cfg, food=0.0)
    m = make_martian()
    consume(m, s, cfg)
    assert m.health == pytest.approx(90.0)


def test_partial_shortfall_scales_linearly():
    cfg = quiet_config(shortfall_health_penalty=10.0)
    s = _settlement(cfg, food=10.5 * 0.25)
    m = make_martian()
    consume(m, s, cfg)
    assert m.health == pytest.approx(100.0 - 10.0 * 0.75)


def test_shortfalls_stack_across_resources():
    cfg = quiet_config(shortfall_health_penalty=10.0)
    s = _settlement(cfg, food=0.0, water=0.0, air=0.0)
    m = make_martian()
    consume(m, s, cfg)
    assert m.health == pytest.approx(70.0)


def test_personal_waste_is_emitted():
    cfg = quiet_config()
    s = _settlement(cfg, food=1e9)
    consume(make_martian(), s, cfg)
    assert s.waste == pytest.approx(cfg.waste_per_agent)


def test_health_floors_at_zero():
    cfg = quiet_config(shortfall_health_penalty=10.0)
    s = _settlement(cfg, food=0.0, water=0.0, air=0.0)
    m = make_martian(health=15.0)
    consume(m, s, cfg)
    assert m.health == 0.0


@given(
    produced=st.floats(min_value=0.0, max_value=40.0),
    pool=st.floats(min_value=25.0, max_value=1e6),
)
def test_food_ledger_identity_when_pool_not_floored(produced, pool):
    # pool_after == pool_before + contribution - withdrawal, exact to 1e-9.
    cfg = quiet_config()
    s = _settlement(cfg, food=pool)
    m = make_martian()
    m.prod_food = produced
    consume(m, s, cfg)
    need = cfg.weekly_need_food
    expected = pool + max(0.0, produced - need) - min(pool, max(0.0, need - produced))
    assert abs(s.food - expected) <= 1e-9
    assert s.food >= 0.0


def test_health_zero_means_dead():
    state = make_state(quiet_config(initial_population=8))
    state.martians[2].health = 0.0
    removed = mortality_sweep(state)
    assert [m.id for m in removed] == [2]
    assert all(m.id != 2 for m in state.martians)
    assert state.counters.deaths == 1


def test_no_random_death_at_zero_probability():
    state = make_state(quiet_config(initial_population=50, p_random_death=0.0))
    assert mortality_sweep(state) == []
    assert state.live_population() == 50


def test_dead_partner_references_are_cleared():
    state = make_state(quiet_config(initial_population=8))
    state.martians[0].partner = state.martians[3].id
    state.pairings = {"food": [(state.martians[0].id, state.martians[3].id)]}
    state.martians[3].health = 0.0
    mortality_sweep(state)
    assert state.martians[0].partner is None
    assert state.pairings["food"] == []


def test_random_death_rate_matches_binomial_oracle():
    # 1000 agents at p = 0.0005 for one tick: 0.5 expected deaths. Over 1e4
    # sweeps the sample mean must sit within 3 standard errors.
    p = 0.0005
    state = make_state(quiet_config(initial_population=1000, p_random_death=p))
    replicates = 10_000
    total = 0
    for _ in range(replicates):
        removed = mortality_sweep(state)
        total += len(removed)
        if removed:
            state.martians.extend(removed)
            state.martians.sort(key=lambda m: m.id)
    n = 1000
    se = (n * p * (1 - p) / replicates) ** 0.5
    assert abs(total / replicates - n * p) <= 3 * se


def test_mortality_preserves_id_order():
    state = make_state(quiet_config(initial_population=30, p_random_death=0.5))
    mortality_sweep(state)
    ids = [m.id for m in state.martians]
    assert ids == sorted(ids)
