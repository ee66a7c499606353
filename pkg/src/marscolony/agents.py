"""Per-tick individual settler behaviors: movement, sleep, consumption
against personal production and the settlement pools, and mortality.

All functions here are invoked by the engine in a fixed agent-id order;
none of them parallelize within a tick.
"""

from __future__ import annotations

import numpy as np

from .config import SimConfig
from .core import GRID_SIZE, Martian, SettlementState, SimState

# Eight compass directions, index order fixed: E, NE, N, NW, W, SW, S, SE.
DIRECTIONS = ((1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1))


def step_position(x: int, y: int, direction: int) -> tuple[int, int]:
    """One unit step in the given direction, wrapping toroidally."""
    dx, dy = DIRECTIONS[direction]
    return (x + dx) % GRID_SIZE, (y + dy) % GRID_SIZE

def move_agent(m: Martian, rng: np.random.Generator) -> None:
    """Face a uniformly random direction and move forward one cell."""
    m.x, m.y = step_position(m.x, m.y, int(rng.integers(0, 8)))


def move_all(state: SimState) -> None:
    """Move every settler one step (ascending id, one batched draw)."""
    if not state.martians:
        return
    directions = state.rng["movement"].integers(0, 8, size=len(state.martians))
    for m, d in zip(state.martians, directions):
        m.x, m.y = step_position(m.x, m.y, int(d))


def sleep(m: Martian, regen: float) -> None:
    """Regenerate health, capped at 100."""
    m.health = min(100.0, m.health + regen)


def consume(m: Martian, settlement: SettlementState, config: SimConfig) -> dict[str, float]:
    """Consume the weekly need of each resource.

    Personal production covers the need first; any remainder is contributed
    to the settlement pool. Deficits are drawn from the pool, which floors
    at zero; whatever still goes unmet costs health proportionally to the
    unmet fraction. Resources are processed in a fixed order (food, water,
    air) so penalty application is deterministic.

    Returns the unmet amount per resource (all zero in the well-fed case).
    """
    unmet_amounts: dict[str, float] = {}
    for resource, need in (
        ("food", config.weekly_need_food),
        ("water", config.weekly_need_water),
        ("air", config.weekly_need_air),
    ):
        produced = m.produced(resource)
        if produced >= need:
            settlement.add_store(resource, produced - need)
            unmet_amounts[resource] = 0.0
            continue
        deficit = need - produced
        pool = settlement.store(resource)
        taken = min(pool, deficit)
        settlement.set_store(resource, pool - taken)
        unmet = deficit - taken
        unmet_amounts[resource] = unmet
        if unmet > 0.0:
            penalty = config.shortfall_health_penalty * (unmet / need)
            m.health = max(0.0, m.health - penalty)
    settlement.waste += config.waste_per_agent
    return unmet_amounts


def mortality_sweep(state: SimState) -> list[Martian]:
    """Remove settlers with zero health or an unlucky random-death draw.

    Returns the removed settlers. Partner references to the dead are
    cleared and this tick's pairings are pruned.
    """
    martians = state.martians
    if not martians:
        return []
    draws = state.rng["mortality"].random(len(martians))
    p = state.config.p_random_death
    dead = [m for m, d in zip(martians, draws) if m.health <= 0.0 or d < p]
    if not dead:
        return []
    dead_ids = {m.id for m in dead}
    state.martians = [m for m in martians if m.id not in dead_ids]
    for m in state.martians:
        if m.partner in dead_ids:
            m.partner = None
    for task, pairs in state.pairings.items():
        state.pairings[task] = [
            (a, b) for a, b in pairs if a not in dead_ids and b not in dead_ids
        ]
    state.counters.deaths += len(dead)
    return dead
