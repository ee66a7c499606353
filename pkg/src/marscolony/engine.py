"""The tick scheduler: composes all phases in a fixed order, restores patch
capacity, and observes per-tick metrics.

Phase order within one tick:

 1. restore patch capacities
 2. move all settlers (ascending id)
 3. sleep
 4. pair + produce for food, water, air
 5. waste-removal pairing and removal
 6. consume + contribute
 7. social interactions
 8. shipment and arrival events (shipment ticks only)
 9. habitat-accident roll
10. stressor pressure, drain, recovery, aging
11. minerals -> technology
12. mortality sweep
13. emit tick report, advance the tick counter

The order is part of the determinism contract and is pinned by a golden-run
regression test.
"""

from __future__ import annotations

import csv
import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import agents, events, psychosocial, tasking
from .config import SimConfig
from .core import (
    CATEGORY_ORDER,
    PRODUCTION_TASKS,
    SimState,
    init_state,
)
from .events import EventLog, EventRecord


@dataclass(frozen=True)
class TickReport:
    """End-of-week census of one tick."""

    tick: int
    population: int
    n_neurotic: int
    n_reactive: int
    n_social: int
    n_agreeable: int
    coping_mean: float
    coping_min: float
    coping_max: float
    health_mean: float
    store_food: float
    store_water: float
    store_air: float
    store_waste: float
    store_minerals: float
    technology: float
    active_stressors: int
    shipments_received: int
    shipping_disasters: int
    habitat_accidents: int
    births: int
    deaths: int


TICK_REPORT_FIELDS = tuple(f.name for f in dataclasses.fields(TickReport))


def observe(state: SimState) -> TickReport:
    """Snapshot the state into a TickReport (empty-population stats are 0)."""
    martians = state.martians
    counts = {cat: 0 for cat in CATEGORY_ORDER}
    for m in martians:
        counts[m.category] += 1
    if martians:
        copings = [m.coping for m in martians]
        coping_mean = sum(copings) / len(copings)
        coping_min = min(copings)
        coping_max = max(copings)
        health_mean = sum(m.health for m in martians) / len(martians)
    else:
        coping_mean = coping_min = coping_max = health_mean = 0.0
    c = state.counters
    s = state.settlement
    return TickReport(
        tick=state.tick,
        population=len(martians),
        n_neurotic=counts[CATEGORY_ORDER[0]],
        n_reactive=counts[CATEGORY_ORDER[1]],
        n_social=counts[CATEGORY_ORDER[2]],
        n_agreeable=counts[CATEGORY_ORDER[3]],
        coping_mean=coping_mean,
        coping_min=coping_min,
        coping_max=coping_max,
        health_mean=health_mean,
        store_food=s.food,
        store_water=s.water,
        store_air=s.air,
        store_waste=s.waste,
        store_minerals=s.minerals,
        technology=s.technology,
        active_stressors=sum(1 for st in state.stressors if st.active),
        shipments_received=c.shipments_received,
        shipping_disasters=c.shipping_disasters,
        habitat_accidents=c.habitat_accidents,
        births=c.births,
        deaths=c.deaths,
    )


def step(state: SimState, log: Optional[EventLog] = None) -> TickReport:
    """Advance the simulation by one tick and report the end-of-week census."""
    if log is None:
        log = []
    config = state.config

    state.pairings = {}
    for m in state.martians:
        m.reset_tick_ledger()

    state.settlement.restore_capacities(config)
    agents.move_all(state)
    for m in state.martians:
        agents.sleep(m, config.sleep_regen)

    for task in PRODUCTION_TASKS:
        pairs, _ = tasking.form_pairs(
            state.martians, task, state.thresholds, state.rng["pairing"]
        )
        state.pairings[task] = pairs
        tasking.produce(state, task, pairs)

    waste_pairs, _ = tasking.form_pairs(
        state.martians, "waste", state.thresholds, state.rng["pairing"]
    )
    state.pairings["waste"] = waste_pairs
    tasking.remove_waste(state, waste_pairs)

    for m in state.martians:
        agents.consume(m, state.settlement, config)

    psychosocial.run_interactions(state)

    if state.tick > 0 and state.tick % config.shipment_frequency == 0:
        delivered = events.shipment_event(state, log)
        events.maybe_arrivals(state, log, delivered)

    events.maybe_habitat_accident(state, log)

    psychosocial.apply_stressor_pressure(state)
    events.update_stressors(state, log)

    events.consume_minerals_for_tech(state, log)

    agents.mortality_sweep(state)

    report = observe(state)
    state.tick += 1
    return report


@dataclass
class RunResult:
    """All observable output of one replicate."""

    config: SimConfig
    seed: int
    reports: list[TickReport]
    events: list[EventRecord]

    def population_series(self) -> list[int]:
        return [r.population for r in self.reports]

    def final_report(self) -> TickReport:
        return self.reports[-1]

    def basename(self) -> str:
        return f"run_{self.config.digest()}_{self.seed}"

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(TICK_REPORT_FIELDS)
            for r in self.reports:
                writer.writerow([getattr(r, name) for name in TICK_REPORT_FIELDS])

    def write_event_log(self, path: str | Path) -> None:
        with open(path, "w") as fh:
            for e in self.events:
                fh.write(
                    json.dumps(
                        {
                            "tick": e.tick,
                            "type": e.type,
                            "target": e.target,
                            "magnitude": e.magnitude,
                        },
                        sort_keys=True,
                    )
                    + "\n"
                )


def run(config: SimConfig, seed: int) -> RunResult:
    """Run a full replicate: init, then ``config.ticks`` steps.

    A zero-tick run reports just the initial census. By default the run
    continues even at population zero, since arrival events can recolonize;
    set ``halt_on_extinction`` to stop at the first empty census instead.
    """
    config.validate()
    state = init_state(config, seed)
    log: list[EventRecord] = []
    if config.ticks == 0:
        return RunResult(config, seed, [observe(state)], log)
    reports = []
    for _ in range(config.ticks):
        reports.append(step(state, log))
        if config.halt_on_extinction and reports[-1].population == 0:
            break
    return RunResult(config, seed, reports, log)


def load_population_series(csv_path: str | Path) -> list[int]:
    """Read back the population column of a run CSV."""
    with open(csv_path, newline="") as fh:
        return [int(row["population"]) for row in csv.DictReader(fh)]
