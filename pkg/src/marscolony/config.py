"""Simulation configuration: every environment constant, probability, and
calibration knob in one serializable dataclass.

A run is fully determined by a ``SimConfig`` plus an integer seed. The config
round-trips losslessly through JSON; every field has a default, so an empty
file (or no file at all) is a valid run.

Fields fall into three groups:

* Physical constants taken from ISS life-support figures (weekly needs,
  per-patch recycling rates, stockpile sizing).
* Event schedule constants (resupply cycle length, shipment contents).
* Calibration knobs for quantities the underlying model describes only
  qualitatively (event probabilities, health/coping deltas). These are the
  knobs targeted by the calibration grid search in
  :mod:`marscolony.experiments`.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any


class ConfigError(ValueError):
    """Raised when a config file or field value is invalid.

    The message always names the offending field.
    """


@dataclass(frozen=True)
class SimConfig:
    # Population and horizon. One tick is one Earth week.
    initial_population: int = 20
    ticks: int = 1456  # 28 Earth years

    # Weekly per-settler needs (ISS consumption rates).
    weekly_need_food: float = 10.5  # kg
    weekly_need_water: float = 28.0  # L
    weekly_need_air: float = 5.88  # kg

    # Per-patch weekly production capacity, restored at the start of each tick.
    p_food: float = 0.5
    p_air: float = 5.88
    p_water: float = 28.0
    p_waste: float = 0.0

    # Earth resupply.
    shipment_frequency: int = 78  # ticks between shipments
    minerals_per_shipment: float = 100.0
    stockpile_weeks: int = 156  # initial stores cover this many weeks of need

    # Technology multiplier on patch production.
    technology_initial: float = 0.5
    tech_cap: float = 1.5
    tech_increment: float = 0.01
    minerals_per_tech_step: float = 10.0

    # Placeholder for settlement energy consumption; reserved, never read.
    energy_placeholder: float = 1.0

    # Local production of food/water/air can be switched off entirely to
    # model a colony living purely on stockpiles and resupply.
    production_enabled: bool = True

    # Stochastic event rates.
    p_habitat_accident: float = 0.01  # per tick
    p_shipping_disaster: float = 0.1  # per shipment
    p_random_death: float = 0.0005  # per agent per tick
    p_arrival: float = 0.5  # per shipment
    arrivals_per_event: int = 4

    # Health dynamics.
    sleep_regen: float = 5.0
    shortfall_health_penalty: float = 10.0  # per fully unmet resource-week
    stressor_health_penalty: float = 2.0
    stressor_coping_penalty: float = 0.005
    p_stressor_hit: float = 0.5  # per agent per active stressor per tick
    stressor_drain_fraction: float = 0.05  # of target store per tick

    # Social interaction model. Gains/losses are per-category multipliers on
    # the distance between an agent's coping and the midpoint.
    coping_midpoint: float = 0.90
    health_scale: float = 10.0
    gain_agreeable: float = 1.0
    gain_social: float = 0.9
    gain_reactive: float = 0.8
    gain_neurotic: float = 0.6
    loss_agreeable: float = 0.6
    loss_social: float = 0.8
    loss_reactive: float = 0.9
    loss_neurotic: float = 1.0
    coping_boost: float = 0.002
    coping_drain: float = 0.004
    coping_floor: float = 0.5
    interaction_radius: int = 3

    # Waste handling.
    waste_per_agent: float = 1.0  # kg per settler per tick
    waste_byproduct: float = 0.1  # kg per successful producer per task
    waste_removal_rate: float = 2.0  # kg removed per valid waste pair

    # Stability criterion for the experiment harness.
    stability_threshold: int = 10
    bounce_back_window: int = 84  # ticks (1.5 years)

    # Stop a run early once the population hits zero. Off by default:
    # arrival events can recolonize an empty settlement.
    halt_on_extinction: bool = False

    def validate(self) -> None:
        """Raise :class:`ConfigError` naming the first offending field."""
        if self.initial_population < 4:
            raise ConfigError("initial_population must be >= 4")
        if self.ticks < 0:
            raise ConfigError("ticks must be >= 0")
        for name in (
            "p_habitat_accident",
            "p_shipping_disaster",
            "p_random_death",
            "p_arrival",
            "p_stressor_hit",
            "stressor_drain_fraction",
        ):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], got {value}")
        for name in (
            "weekly_need_food",
            "weekly_need_water",
            "weekly_need_air",
            "p_food",
            "p_air",
            "p_water",
            "minerals_per_shipment",
            "minerals_per_tech_step",
        ):
            value = getattr(self, name)
            if value <= 0:
                raise ConfigError(f"{name} must be > 0, got {value}")
        for name in (
            "p_waste",
            "sleep_regen",
            "shortfall_health_penalty",
            "stressor_health_penalty",
            "stressor_coping_penalty",
            "waste_per_agent",
            "waste_byproduct",
            "waste_removal_rate",
            "tech_increment",
            "health_scale",
            "coping_boost",
            "coping_drain",
        ):
            value = getattr(self, name)
            if value < 0:
                raise ConfigError(f"{name} must be >= 0, got {value}")
        if self.shipment_frequency < 1:
            raise ConfigError("shipment_frequency must be >= 1")
        if self.stockpile_weeks < 0:
            raise ConfigError("stockpile_weeks must be >= 0")
        if self.arrivals_per_event < 0:
            raise ConfigError("arrivals_per_event must be >= 0")
        if not 0.0 <= self.coping_floor <= 1.0:
            raise ConfigError("coping_floor must be in [0, 1]")
        if not self.coping_floor <= self.coping_midpoint <= 1.0:
            raise ConfigError("coping_midpoint must be in [coping_floor, 1]")
        if self.technology_initial < 0:
            raise ConfigError("technology_initial must be >= 0")
        if self.tech_cap < self.technology_initial:
            raise ConfigError("tech_cap must be >= technology_initial")
        if self.interaction_radius < 0:
            raise ConfigError("interaction_radius must be >= 0")
        if self.stability_threshold < 1:
            raise ConfigError("stability_threshold must be >= 1")
        if self.bounce_back_window < 0:
            raise ConfigError("bounce_back_window must be >= 0")
        gains = (
            self.gain_agreeable,
            self.gain_social,
            self.gain_reactive,
            self.gain_neurotic,
        )
        if not (gains[0] > gains[1] > gains[2] > gains[3] > 0):
            raise ConfigError(
                "gain_agreeable > gain_social > gain_reactive > gain_neurotic > 0 required"
            )
        losses = (
            self.loss_neurotic,
            self.loss_reactive,
            self.loss_social,
            self.loss_agreeable,
        )
        if not (losses[0] > losses[1] > losses[2] > losses[3] > 0):
            raise ConfigError(
                "loss_neurotic > loss_reactive > loss_social > loss_agreeable > 0 required"
            )

    def replace(self, **overrides: Any) -> "SimConfig":
        """Return a copy with the given fields replaced (validated)."""
        unknown = set(overrides) - {f.name for f in dataclasses.fields(self)}
        if unknown:
            raise ConfigError(f"unknown config field: {sorted(unknown)[0]}")
        cfg = dataclasses.replace(self, **overrides)
        cfg.validate()
        return cfg

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SimConfig":
        field_types = {f.name: f.type for f in dataclasses.fields(cls)}
        kwargs: dict[str, Any] = {}
        for key, value in data.items():
            if key not in field_types:
                raise ConfigError(f"unknown config field: {key}")
            kwargs[key] = _coerce(key, value, field_types[key])
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg

    @classmethod
    def from_json(cls, text: str) -> "SimConfig":
        try:
            data = json.loads(text) if text.strip() else {}
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)

    @classmethod
    def load(cls, path: str | Path) -> "SimConfig":
        return cls.from_json(Path(path).read_text())

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n")

    def digest(self) -> str:
        """Stable 12-hex-digit hash of the canonical JSON form."""
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:12]


def _coerce(name: str, value: Any, annotation: str | type) -> Any:
    """Coerce a JSON value to the field's declared type, rejecting mismatches."""
    type_name = annotation if isinstance(annotation, str) else annotation.__name__
    if type_name == "bool":
        if not isinstance(value, bool):
            raise ConfigError(f"{name} must be a boolean, got {value!r}")
        return value
    if type_name == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{name} must be an integer, got {value!r}")
        return value
    if type_name == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{name} must be a number, got {value!r}")
        return float(value)
    raise ConfigError(f"{name} has unsupported type {type_name}")
