"""Domain types for the settlement simulation and state initialization.

The world is a 50x50 toroidal grid of patches. Settlers ("martians") carry a
resilience category, a coping capacity derived from it, two complementary
skills summing to 100, health, and a grid position. The settlement pools
stores of food, water, air, waste, and minerals, and holds a global
technology multiplier. Stressors are transient tokens spawned by habitat
accidents or shipping disasters.
"""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from .config import ConfigError, SimConfig
from .rng import RngStreams

GRID_SIZE = 50

# Task processing order is fixed for determinism.
PRODUCTION_TASKS = ("food", "water", "air")
TASKS = ("food", "water", "air", "waste", "accident")

RESOURCES = ("food", "water", "air")


class ResilienceCategory(enum.Enum):
    """Personality archetypes ordered by increasing coping capacity."""

    NEUROTIC = "neurotic"
    REACTIVE = "reactive"
    SOCIAL = "social"
    AGREEABLE = "agreeable"


CATEGORY_ORDER = (
    ResilienceCategory.NEUROTIC,
    ResilienceCategory.REACTIVE,
    ResilienceCategory.SOCIAL,
    ResilienceCategory.AGREEABLE,
)

_BASE_COPING = {
    ResilienceCategory.NEUROTIC: 0.84,
    ResilienceCategory.REACTIVE: 0.89,
    ResilienceCategory.SOCIAL: 0.94,
    ResilienceCategory.AGREEABLE: 0.98,
}


def coping_for(category: ResilienceCategory) -> float:
    """Base coping score for a resilience category."""
    return _BASE_COPING[category]


class Martian:
    """One settler. Mutable; owned by exactly one simulation state."""

    __slots__ = (
        "id",
        "category",
        "coping",
        "skill1",
        "skill2",
        "health",
        "x",
        "y",
        "partner",
        "prod_food",
        "prod_water",
        "prod_air",
        "prod_waste",
    )

    def __init__(
        self,
        id: int,
        category: ResilienceCategory,
        coping: float,
        skill1: int,
        x: int,
        y: int,
    ):
        self.id = id
        self.category = category
        self.coping = coping
        self.skill1 = skill1
        self.skill2 = 100 - skill1
        self.health = 100.0
        self.x = x
        self.y = y
        self.partner: Optional[int] = None
        self.prod_food = 0.0
        self.prod_water = 0.0
        self.prod_air = 0.0
        self.prod_waste = 0.0

    def reset_tick_ledger(self) -> None:
        self.partner = None
        self.prod_food = 0.0
        self.prod_water = 0.0
        self.prod_air = 0.0
        self.prod_waste = 0.0

    def produced(self, resource: str) -> float:
        return getattr(self, f"prod_{resource}")

    def add_produced(self, resource: str, amount: float) -> None:
        setattr(self, f"prod_{resource}", getattr(self, f"prod_{resource}") + amount)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return (
            f"Martian(id={self.id}, cat={self.category.value}, "
            f"health={self.health:.1f}, coping={self.coping:.3f}, "
            f"skills=({self.skill1},{self.skill2}), pos=({self.x},{self.y}))"
        )


class StressorKind(enum.Enum):
    SHIPPING = "shipping"
    HABITAT = "habitat"


class Stressor:
    """An active adverse-event token.

    Habitat stressors target one settlement store and drain it each tick;
    shipping stressors only pressure the settlers. Both dissipate after four
    ticks unless a habitat stressor is removed earlier by a skill check.
    """

    __slots__ = ("kind", "age_ticks", "target_resource", "active")

    def __init__(self, kind: StressorKind, target_resource: Optional[str] = None):
        if kind is StressorKind.HABITAT and target_resource is None:
            raise ValueError("habitat stressors need a target resource")
        if kind is StressorKind.SHIPPING and target_resource is not None:
            raise ValueError("shipping stressors have no target resource")
        self.kind = kind
        self.age_ticks = 0
        self.target_resource = target_resource
        self.active = True

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return (
            f"Stressor({self.kind.value}, age={self.age_ticks}, "
            f"target={self.target_resource}, active={self.active})"
        )


DISSIPATION_AGE = 4


class SettlementState:
    """Pooled stores plus the per-patch production-capacity grid."""

    __slots__ = (
        "food_capacity",
        "air_capacity",
        "water_capacity",
        "food",
        "water",
        "air",
        "waste",
        "minerals",
        "technology",
    )

    def __init__(self, config: SimConfig, initial_population: int):
        n = initial_population
        weeks = config.stockpile_weeks
        self.food = config.weekly_need_food * n * weeks
        self.water = config.weekly_need_water * n * weeks
        self.air = config.weekly_need_air * n * weeks
        self.waste = 0.0
        self.minerals = 0.0
        self.technology = config.technology_initial
        self.food_capacity = np.full((GRID_SIZE, GRID_SIZE), config.p_food)
        self.air_capacity = np.full((GRID_SIZE, GRID_SIZE), config.p_air)
        self.water_capacity = np.full((GRID_SIZE, GRID_SIZE), config.p_water)

    def restore_capacities(self, config: SimConfig) -> None:
        """Reset per-patch remaining capacity to the weekly rates."""
        self.food_capacity.fill(config.p_food)
        self.air_capacity.fill(config.p_air)
        self.water_capacity.fill(config.p_water)

    def capacity_grid(self, resource: str) -> np.ndarray:
        return getattr(self, f"{resource}_capacity")

    def store(self, resource: str) -> float:
        return getattr(self, resource)

    def set_store(self, resource: str, value: float) -> None:
        setattr(self, resource, value)

    def add_store(self, resource: str, delta: float) -> None:
        setattr(self, resource, getattr(self, resource) + delta)


@dataclass
class TaskThresholds:
    """Skill requirements rolled once per run.

    Production tasks (food, water, air, waste) take complementary pairs
    summing to 100; accident recovery rolls both requirements independently,
    modeling not knowing in advance what an emergency will demand.
    """

    food: tuple[int, int]
    water: tuple[int, int]
    air: tuple[int, int]
    waste: tuple[int, int]
    accident: tuple[int, int]

    def for_task(self, task: str) -> tuple[int, int]:
        return getattr(self, task)


@dataclass
class Counters:
    shipments_received: int = 0
    shipping_disasters: int = 0
    habitat_accidents: int = 0
    births: int = 0
    deaths: int = 0


@dataclass
class SimState:
    """Complete simulation state; fully determined by (config, seed, tick)."""

    config: SimConfig
    tick: int
    martians: list[Martian]
    stressors: list[Stressor]
    settlement: SettlementState
    thresholds: TaskThresholds
    counters: Counters
    rng: RngStreams
    next_id: int
    # Pairings formed this tick, task -> list of (id_a, id_b). Derived view of
    # the per-agent taskmate relation.
    pairings: dict[str, list[tuple[int, int]]] = field(default_factory=dict)

    def live_population(self) -> int:
        return len(self.martians)

    def taskmate_of(self, agent_id: int, task: str) -> Optional[int]:
        for a, b in self.pairings.get(task, ()):
            if a == agent_id:
                return b
            if b == agent_id:
                return a
        return None


def init_state(config: SimConfig, seed: int) -> SimState:
    """Build the initial state for a run.

    Categories are assigned round-robin so counts differ by at most one (and
    are exactly equal when the population is a multiple of four). Skill 1 is
    a uniform integer in [0, 100] with skill 2 its complement; positions are
    uniform over the grid. Stores start at ``weekly need x N x
    stockpile_weeks`` for food, water, and air.
    """
    config.validate()
    n = config.initial_population
    if n < 4:
        raise ConfigError("initial_population must be >= 4")

    rng = RngStreams(seed)
    init = rng["init"]

    skills = init.integers(0, 101, size=n)
    xs = init.integers(0, GRID_SIZE, size=n)
    ys = init.integers(0, GRID_SIZE, size=n)

    martians = []
    for i in range(n):
        category = CATEGORY_ORDER[i % 4]
        coping = max(config.coping_floor, coping_for(category))
        martians.append(
            Martian(
                id=i,
                category=category,
                coping=coping,
                skill1=int(skills[i]),
                x=int(xs[i]),
                y=int(ys[i]),
            )
        )

    def production_threshold() -> tuple[int, int]:
        s1 = int(init.integers(0, 101))
        return (s1, 100 - s1)

    thresholds = TaskThresholds(
        food=production_threshold(),
        water=production_threshold(),
        air=production_threshold(),
        waste=production_threshold(),
        accident=(int(init.integers(0, 101)), int(init.integers(0, 101))),
    )

    return SimState(
        config=config,
        tick=0,
        martians=martians,
        stressors=[],
        settlement=SettlementState(config, n),
        thresholds=thresholds,
        counters=Counters(),
        rng=rng,
        next_id=n,
    )


def spawn_martian(state: SimState, category: ResilienceCategory, skill1: int, x: int, y: int) -> Martian:
    """Create a fresh settler with the next free id and add it to the state."""
    m = Martian(
        id=state.next_id,
        category=category,
        coping=max(state.config.coping_floor, coping_for(category)),
        skill1=skill1,
        x=x,
        y=y,
    )
    state.next_id += 1
    state.martians.append(m)
    return m


def snapshot(state: SimState) -> dict[str, Any]:
    """Plain-data snapshot of the full state, including RNG internals.

    Two states advanced identically from the same (config, seed) produce
    equal snapshots; this is the basis of the determinism tests.
    """
    return {
        "tick": state.tick,
        "martians": [
            (
                m.id,
                m.category.value,
                m.coping,
                m.skill1,
                m.skill2,
                m.health,
                m.x,
                m.y,
                m.partner,
                m.prod_food,
                m.prod_water,
                m.prod_air,
                m.prod_waste,
            )
            for m in state.martians
        ],
        "stressors": [
            (s.kind.value, s.age_ticks, s.target_resource, s.active)
            for s in state.stressors
        ],
        "settlement": {
            "food": state.settlement.food,
            "water": state.settlement.water,
            "air": state.settlement.air,
            "waste": state.settlement.waste,
            "minerals": state.settlement.minerals,
            "technology": state.settlement.technology,
            "food_capacity": state.settlement.food_capacity.tolist(),
            "air_capacity": state.settlement.air_capacity.tolist(),
            "water_capacity": state.settlement.water_capacity.tolist(),
        },
        "thresholds": {t: list(state.thresholds.for_task(t)) for t in TASKS},
        "counters": vars(state.counters).copy(),
        "next_id": state.next_id,
        "rng": _plain(state.rng.state()),
    }


def state_digest(state: SimState) -> str:
    """Stable hash of :func:`snapshot`, for golden-run regression tests."""
    canon = json.dumps(snapshot(state), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def _plain(obj: Any) -> Any:
    """Recursively convert numpy scalars so json can serialize RNG state."""
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj
