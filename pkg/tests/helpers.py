"""Shared test utilities: tiny state builders and independent oracles."""

from __future__ import annotations

import numpy as np

from marscolony.config import SimConfig
from marscolony.core import (
    CATEGORY_ORDER,
    Martian,
    ResilienceCategory,
    SimState,
    init_state,
)


def quiet_config(**overrides) -> SimConfig:
    """A config with every stochastic event switched off."""
    base = dict(
        ticks=50,
        p_habitat_accident=0.0,
        p_shipping_disaster=0.0,
        p_random_death=0.0,
        p_arrival=0.0,
        production_enabled=False,
    )
    base.update(overrides)
    return SimConfig().replace(**base)


def make_state(config: SimConfig | None = None, seed: int = 0) -> SimState:
    return init_state(config if config is not None else quiet_config(), seed)


def make_martian(
    id: int = 0,
    skill1: int = 50,
    x: int = 0,
    y: int = 0,
    category: ResilienceCategory = ResilienceCategory.SOCIAL,
    coping: float | None = None,
    health: float = 100.0,
) -> Martian:
    m = Martian(id=id, category=category, coping=0.94, skill1=skill1, x=x, y=y)
    if coping is not None:
        m.coping = coping
    m.health = health
    return m


def make_population(skills: list[int]) -> list[Martian]:
    return [
        make_martian(id=i, skill1=s, category=CATEGORY_ORDER[i % 4])
        for i, s in enumerate(skills)
    ]


def pair_valid(s1a: int, s1b: int, t1: int, t2: int) -> bool:
    """Validity predicate restated independently of the implementation."""
    s2a, s2b = 100 - s1a, 100 - s1b
    return max(s1a, s1b) >= t1 and max(s2a, s2b) >= t2


def pair_valid_skills(
    a: tuple[int, int], b: tuple[int, int], t1: int, t2: int
) -> bool:
    return max(a[0], b[0]) >= t1 and max(a[1], b[1]) >= t2


def max_matching_size(skills: list[tuple[int, int]], t1: int, t2: int) -> int:
    """Exhaustive maximum matching size by bitmask DP (n <= ~14)."""
    n = len(skills)
    valid_mask = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if pair_valid_skills(skills[i], skills[j], t1, t2):
                valid_mask[i] |= 1 << j
                valid_mask[j] |= 1 << i
    memo: dict[int, int] = {0: 0}

    def best(mask: int) -> int:
        cached = memo.get(mask)
        if cached is not None:
            return cached
        low = (mask & -mask).bit_length() - 1
        rest = mask ^ (1 << low)
        result = best(rest)  # leave `low` unmatched
        partners = valid_mask[low] & rest
        while partners:
            j_bit = partners & -partners
            partners ^= j_bit
            result = max(result, 1 + best(rest ^ j_bit))
            if 1 + (bin(rest ^ j_bit).count("1") // 2) <= result:
                break
        memo[mask] = result
        return result

    return best((1 << n) - 1)


def any_valid_pair(skills: list[tuple[int, int]], t1: int, t2: int) -> bool:
    """Brute-force existence check over all agent pairs."""
    n = len(skills)
    return any(
        pair_valid_skills(skills[i], skills[j], t1, t2)
        for i in range(n)
        for j in range(i + 1, n)
    )


def random_instance(rng: np.random.Generator, n: int, accident_style: bool = False):
    """Random skills and thresholds mirroring the initialization rules."""
    skills = []
    for _ in range(n):
        s1 = int(rng.integers(0, 101))
        skills.append((s1, 100 - s1))
    if accident_style:
        t1, t2 = int(rng.integers(0, 101)), int(rng.integers(0, 101))
    else:
        t1 = int(rng.integers(0, 101))
        t2 = 100 - t1
    return skills, t1, t2
