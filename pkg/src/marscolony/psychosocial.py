"""Proximity-based social interaction and stressor pressure.

Interaction helps settlers whose coping sits above the midpoint and hurts
those below it, scaled by category: agreeable types gain the most and lose
the least, neurotic types the reverse. Partners also nudge each other's
coping: a composed partner reassures, a struggling one drains.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import SimConfig
from .core import GRID_SIZE, Martian, ResilienceCategory, SimState


@dataclass(frozen=True)
class InteractionCoefficients:
    gain: dict[ResilienceCategory, float]
    loss: dict[ResilienceCategory, float]
    midpoint: float
    health_scale: float
    coping_boost: float
    coping_drain: float
    coping_floor: float

    @classmethod
    def from_config(cls, config: SimConfig) -> "InteractionCoefficients":
        return cls(
            gain={
                ResilienceCategory.AGREEABLE: config.gain_agreeable,
                ResilienceCategory.SOCIAL: config.gain_social,
                ResilienceCategory.REACTIVE: config.gain_reactive,
                ResilienceCategory.NEUROTIC: config.gain_neurotic,
            },
            loss={
                ResilienceCategory.AGREEABLE: config.loss_agreeable,
                ResilienceCategory.SOCIAL: config.loss_social,
                ResilienceCategory.REACTIVE: config.loss_reactive,
                ResilienceCategory.NEUROTIC: config.loss_neurotic,
            },
            midpoint=config.coping_midpoint,
            health_scale=config.health_scale,
            coping_boost=config.coping_boost,
            coping_drain=config.coping_drain,
            coping_floor=config.coping_floor,
        )


def toroidal_chebyshev(x1: int, y1: int, x2: int, y2: int, size: int = GRID_SIZE) -> int:
    """Chebyshev distance on a torus of the given size."""
    dx = abs(x1 - x2)
    dy = abs(y1 - y2)
    return max(min(dx, size - dx), min(dy, size - dy))


def find_neighbors(m: Martian, population: list[Martian], radius: int = 3) -> list[int]:
    """Ids of all other live settlers within the sensing radius."""
    return [
        other.id
        for other in population
        if other.id != m.id
        and toroidal_chebyshev(m.x, m.y, other.x, other.y) <= radius
    ]


def health_delta(m: Martian, coeffs: InteractionCoefficients) -> float:
    """Health change one interaction gives this settler (by its own coping)."""
    gap = m.coping - coeffs.midpoint
    if gap >= 0.0:
        return coeffs.gain[m.category] * gap * coeffs.health_scale
    return -coeffs.loss[m.category] * (-gap) * coeffs.health_scale


def interact(
    a: Martian, b: Martian, coeffs: InteractionCoefficients
) -> tuple[tuple[float, float], tuple[float, float]]:
    """Apply one social interaction between two settlers.

    Both deltas are computed from the pre-interaction state, then applied
    with clamping (health to [0, 100], coping to [floor, 1]). Returns the
    raw (health, coping) delta for each participant, a first then b.
    """
    dh_a = health_delta(a, coeffs)
    dh_b = health_delta(b, coeffs)
    dc_a = coeffs.coping_boost if b.coping >= coeffs.midpoint else -coeffs.coping_drain
    dc_b = coeffs.coping_boost if a.coping >= coeffs.midpoint else -coeffs.coping_drain
    a.health = min(100.0, max(0.0, a.health + dh_a))
    b.health = min(100.0, max(0.0, b.health + dh_b))
    a.coping = min(1.0, max(coeffs.coping_floor, a.coping + dc_a))
    b.coping = min(1.0, max(coeffs.coping_floor, b.coping + dc_b))
    a.partner = b.id
    b.partner = a.id
    return (dh_a, dc_a), (dh_b, dc_b)


def run_interactions(state: SimState) -> int:
    """One social round: each settler interacts at most once.

    Settlers are visited in ascending id order; each picks a uniformly
    random not-yet-engaged neighbor (interaction stream) and the pair's
    deltas apply immediately. Returns the number of interactions.
    """
    martians = state.martians
    n = len(martians)
    if n < 2:
        return 0
    coeffs = InteractionCoefficients.from_config(state.config)
    radius = state.config.interaction_radius
    rng = state.rng["interaction"]

    # Bucket settlers by cell once; positions are frozen during this phase.
    buckets: dict[tuple[int, int], list[Martian]] = {}
    for m in martians:
        buckets.setdefault((m.x, m.y), []).append(m)

    engaged: set[int] = set()
    count = 0
    for m in martians:
        if m.id in engaged:
            continue
        candidates: list[Martian] = []
        if 2 * radius + 1 >= GRID_SIZE:
            candidates = [
                other
                for other in martians
                if other.id != m.id
                and other.id not in engaged
                and toroidal_chebyshev(m.x, m.y, other.x, other.y) <= radius
            ]
        else:
            for dx in range(-radius, radius + 1):
                for dy in range(-radius, radius + 1):
                    cell = ((m.x + dx) % GRID_SIZE, (m.y + dy) % GRID_SIZE)
                    for other in buckets.get(cell, ()):
                        if other.id != m.id and other.id not in engaged:
                            candidates.append(other)
        if not candidates:
            continue
        partner = candidates[int(rng.integers(0, len(candidates)))]
        interact(m, partner, coeffs)
        engaged.add(m.id)
        engaged.add(partner.id)
        count += 1
    return count


def apply_stressor_pressure(state: SimState) -> None:
    """Each active stressor pressures every settler independently.

    Per stressor per tick, each live settler is hit with probability
    ``p_stressor_hit``, losing a fixed amount of health and coping
    (clamped to their valid ranges).
    """
    active = [s for s in state.stressors if s.active]
    if not active or not state.martians:
        return
    config = state.config
    p = config.p_stressor_hit
    rng = state.rng["stressor"]
    for _ in active:
        draws = rng.random(len(state.martians))
        for m, d in zip(state.martians, draws):
            if d < p:
                m.health = max(0.0, m.health - config.stressor_health_penalty)
                m.coping = max(
                    config.coping_floor, m.coping - config.stressor_coping_penalty
                )
