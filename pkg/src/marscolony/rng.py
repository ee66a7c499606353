"""Labeled, independently seeded random streams.

One root seed fans out into a fixed set of named substreams, one per
simulation concern. Each label maps to a stable spawn key, so adding draws
in one phase (say, movement) never shifts the sequence seen by another
(say, pairing). This is what makes golden-run regression tests survive
local changes to a single phase.
"""

from __future__ import annotations

from typing import Any

import numpy as np

# Stable label -> spawn-key mapping. Order is append-only: renumbering keys
# would silently change every seeded run.
STREAM_KEYS = {
    "init": 0,
    "movement": 1,
    "events": 2,
    "pairing": 3,
    "interaction": 4,
    "stressor": 5,
    "mortality": 6,
}


class RngStreams:
    """A bundle of named PCG64 generators derived from one seed."""

    __slots__ = ("seed", "_streams")

    def __init__(self, seed: int):
        self.seed = seed
        self._streams = {
            label: np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(key,)))
            for label, key in STREAM_KEYS.items()
        }

    def __getitem__(self, label: str) -> np.random.Generator:
        return self._streams[label]

    def state(self) -> dict[str, Any]:
        """Snapshot of every substream's internal state (for equality checks)."""
        return {label: gen.bit_generator.state for label, gen in self._streams.items()}
