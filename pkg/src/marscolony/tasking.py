"""Skill-based pairing for production tasks, production against patch
capacity, waste removal, and accident-recovery skill checks.

A pair is valid for a task when, for each of the two skills, at least one
member meets that skill's threshold. Matching is greedy over a random
permutation: deterministic given the pairing stream, maximal by
construction, and random among valid pairings as required.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Martian, SimState, StressorKind, Stressor, TaskThresholds


@dataclass(frozen=True)
class Pairing:
    task: str
    member_a: int
    member_b: int


def pair_is_valid(a: Martian, b: Martian, threshold: tuple[int, int]) -> bool:
    t1, t2 = threshold
    return max(a.skill1, b.skill1) >= t1 and max(a.skill2, b.skill2) >= t2


def form_pairs(
    agents: list[Martian],
    task: str,
    thresholds: TaskThresholds,
    rng: np.random.Generator,
) -> tuple[list[tuple[int, int]], list[int]]:
    """Greedy maximal matching for one task.

    Agents are sorted by id before shuffling, so the output depends only on
    the RNG stream state, never on storage order. Returns (pairs, unpaired
    ids); no two unpaired agents form a valid pair.
    """
    t1, t2 = thresholds.for_task(task)
    ordered = sorted(agents, key=lambda m: m.id)
    n = len(ordered)
    if n < 2:
        return [], [m.id for m in ordered]
    perm = rng.permutation(n)
    meets1 = [m.skill1 >= t1 for m in ordered]
    meets2 = [m.skill2 >= t2 for m in ordered]
    matched = [False] * n
    pairs: list[tuple[int, int]] = []
    for pos in range(n):
        i = perm[pos]
        if matched[i]:
            continue
        for pos_b in range(pos + 1, n):
            j = perm[pos_b]
            if matched[j]:
                continue
            if (meets1[i] or meets1[j]) and (meets2[i] or meets2[j]):
                matched[i] = True
                matched[j] = True
                pairs.append((ordered[i].id, ordered[j].id))
                break
    unpaired = [ordered[i].id for i in range(n) if not matched[i]]
    return pairs, unpaired


_PATCH_RATES = {"food": "p_food", "water": "p_water", "air": "p_air"}


def produce(state: SimState, task: str, pairs: list[tuple[int, int]]) -> None:
    """Harvest the task's resource for every member of a valid pair.

    Each member harvests min(patch rate x technology, remaining capacity at
    its own cell); the cell's remaining capacity drops by the harvested
    amount. Successful producers emit a small waste by-product. With
    production disabled nothing is harvested and no by-product is made.
    """
    config = state.config
    if not config.production_enabled or not pairs:
        return
    settlement = state.settlement
    rate = getattr(config, _PATCH_RATES[task]) * settlement.technology
    grid = settlement.capacity_grid(task)
    by_id = {m.id: m for m in state.martians}
    for a, b in pairs:
        for member_id in (a, b):
            m = by_id[member_id]
            harvest = min(rate, float(grid[m.x, m.y]))
            grid[m.x, m.y] -= harvest
            m.add_produced(task, harvest)
            m.prod_waste += config.waste_byproduct
            settlement.waste += config.waste_byproduct


def remove_waste(state: SimState, pairs: list[tuple[int, int]]) -> None:
    """Each valid waste pair removes a fixed amount, floored at zero."""
    removed = state.config.waste_removal_rate * len(pairs)
    state.settlement.waste = max(0.0, state.settlement.waste - removed)


def attempt_accident_recovery(state: SimState, stressor: Stressor) -> bool:
    """Skill check to clear a habitat-accident stressor.

    Succeeds iff at least one valid pair exists against the accident
    thresholds; a successful check deactivates the stressor immediately.
    Shipping stressors cannot be recovered by skill.
    """
    if stressor.kind is not StressorKind.HABITAT:
        raise ValueError("only habitat stressors are recoverable by skill check")
    if not stressor.active:
        return False
    pairs, _ = form_pairs(state.martians, "accident", state.thresholds, state.rng["pairing"])
    state.pairings["accident"] = pairs
    if pairs:
        stressor.active = False
        return True
    return False
