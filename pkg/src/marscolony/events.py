"""Environment-level stochastic events: Earth shipments and shipping
disasters, habitat accidents, arrival waves, the stressor lifecycle, and
mineral-driven technology improvement.

Every event appends a structured record (tick, type, target, magnitude) to
the run's event log, which downstream checks can replay against the
reported store trajectories.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .core import (
    CATEGORY_ORDER,
    DISSIPATION_AGE,
    GRID_SIZE,
    SimState,
    Stressor,
    StressorKind,
    spawn_martian,
)
from .tasking import attempt_accident_recovery


@dataclass(frozen=True)
class EventRecord:
    tick: int
    type: str
    target: Optional[str]
    magnitude: float


EventLog = list  # list[EventRecord]

ACCIDENT_TARGETS = ("food", "water", "air", "minerals")


def _on_shipment_cycle(state: SimState) -> bool:
    return state.tick > 0 and state.tick % state.config.shipment_frequency == 0


def shipment_event(state: SimState, log: EventLog) -> bool:
    """Resolve the scheduled Earth shipment at a shipment tick.

    With probability ``p_shipping_disaster`` the shipment is lost and a
    shipping stressor spawns; otherwise food (one full resupply cycle for
    the current census) and minerals arrive. Returns True when delivered.
    """
    assert _on_shipment_cycle(state), "shipment_event invoked off-cycle"
    config = state.config
    if state.rng["events"].random() < config.p_shipping_disaster:
        state.stressors.append(Stressor(StressorKind.SHIPPING))
        state.counters.shipping_disasters += 1
        log.append(EventRecord(state.tick, "shipping_disaster", None, 1.0))
        return False
    food = config.weekly_need_food * state.live_population() * config.shipment_frequency
    state.settlement.food += food
    state.settlement.minerals += config.minerals_per_shipment
    state.counters.shipments_received += 1
    log.append(EventRecord(state.tick, "shipment", "food", food))
    log.append(EventRecord(state.tick, "shipment", "minerals", config.minerals_per_shipment))
    return True


def maybe_arrivals(state: SimState, log: EventLog, shipment_delivered: bool) -> int:
    """Roll for a wave of new settlers riding the resupply shuttle.

    A destroyed shipment carries no people, so a disaster tick never has
    arrivals. New settlers get a uniformly random category, fresh skills,
    full health, and a random position. Returns the number added.
    """
    assert _on_shipment_cycle(state), "maybe_arrivals invoked off-cycle"
    if not shipment_delivered:
        return 0
    config = state.config
    rng = state.rng["events"]
    if rng.random() >= config.p_arrival:
        return 0
    count = config.arrivals_per_event
    for _ in range(count):
        category = CATEGORY_ORDER[int(rng.integers(0, 4))]
        skill1 = int(rng.integers(0, 101))
        x = int(rng.integers(0, GRID_SIZE))
        y = int(rng.integers(0, GRID_SIZE))
        spawn_martian(state, category, skill1, x, y)
    state.counters.births += count
    if count:
        log.append(EventRecord(state.tick, "arrivals", None, float(count)))
    return count


def maybe_habitat_accident(state: SimState, log: EventLog) -> bool:
    """Roll the per-tick habitat accident.

    An accident halves one uniformly chosen store (food, water, air, or
    minerals) and spawns a habitat stressor targeting that store.
    """
    config = state.config
    rng = state.rng["events"]
    if rng.random() >= config.p_habitat_accident:
        return False
    target = ACCIDENT_TARGETS[int(rng.integers(0, 4))]
    before = state.settlement.store(target)
    lost = before / 2.0
    state.settlement.set_store(target, before - lost)
    state.stressors.append(Stressor(StressorKind.HABITAT, target_resource=target))
    state.counters.habitat_accidents += 1
    log.append(EventRecord(state.tick, "habitat_accident", target, lost))
    return True


def update_stressors(state: SimState, log: EventLog) -> None:
    """Advance the stressor lifecycle by one tick.

    Active habitat stressors first drain a fraction of their target store,
    then every active stressor ages by one; habitat stressors then get a
    recovery skill check, and anything reaching the dissipation age
    deactivates. Fully dissipated stressors are dropped from the state.
    """
    config = state.config
    active = [s for s in state.stressors if s.active]
    for s in active:
        if s.kind is StressorKind.HABITAT:
            store = state.settlement.store(s.target_resource)
            drained = store * config.stressor_drain_fraction
            if drained > 0.0:
                state.settlement.set_store(s.target_resource, store - drained)
                log.append(
                    EventRecord(state.tick, "stressor_drain", s.target_resource, drained)
                )
    for s in active:
        s.age_ticks += 1
    for s in active:
        if s.kind is StressorKind.HABITAT and s.active:
            if attempt_accident_recovery(state, s):
                log.append(
                    EventRecord(
                        state.tick, "stressor_recovered", s.target_resource, float(s.age_ticks)
                    )
                )
    for s in active:
        if s.active and s.age_ticks >= DISSIPATION_AGE:
            s.active = False
            log.append(
                EventRecord(
                    state.tick, "stressor_dissipated", s.target_resource, float(s.age_ticks)
                )
            )
    state.stressors = [s for s in state.stressors if s.active]


def consume_minerals_for_tech(state: SimState, log: EventLog) -> bool:
    """Convert one batch of minerals into a technology increment.

    Runs only at shipment ticks, consumes a full batch when one is
    available, and never consumes minerals once technology is capped.
    """
    config = state.config
    if not _on_shipment_cycle(state):
        return False
    settlement = state.settlement
    if settlement.technology >= config.tech_cap:
        return False
    if settlement.minerals < config.minerals_per_tech_step:
        return False
    settlement.minerals -= config.minerals_per_tech_step
    settlement.technology = min(config.tech_cap, settlement.technology + config.tech_increment)
    log.append(
        EventRecord(state.tick, "tech_step", "minerals", config.minerals_per_tech_step)
    )
    return True
