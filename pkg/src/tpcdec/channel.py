"""BPSK over AWGN with counter-based, per-trial reproducible noise.

Noise for trial ``trial_id`` comes from a Philox generator keyed by
``SeedSequence(seed, spawn_key=(point, trial_id, stream))`` and numpy's
``Generator.standard_normal``. Because the key is a pure function of the
trial coordinates, results do not depend on which worker runs a trial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ChannelConfig",
    "demap",
    "modulate",
    "to_llr",
    "transmit",
    "trial_rng",
]

NOISE_STREAM = 0
DATA_STREAM = 1


def trial_rng(seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class ChannelConfig:
    """AWGN channel with Es/N0 = 1 / (2 sigma^2)."""

    sigma: float
    seed: int = 0
    point: int = 0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    @classmethod
    def from_es_n0_db(cls, es_n0_db: float, seed: int = 0, point: int = 0) -> ChannelConfig:
        return cls(math.sqrt(1.0 / (2.0 * 10 ** (es_n0_db / 10))), seed, point)

    @classmethod
    def from_eb_n0_db(cls, eb_n0_db: float, rate: float, seed: int = 0, point: int = 0) -> ChannelConfig:
        return cls.from_es_n0_db(eb_n0_db + 10 * math.log10(rate), seed, point)

    @property
    def es_n0_db(self) -> float:
        return 10 * math.log10(1.0 / (2.0 * self.sigma**2))

    def eb_n0_db(self, rate: float) -> float:
        return self.es_n0_db - 10 * math.log10(rate)


def modulate(bits) -> np.ndarray:
    """0 -> +1, 1 -> -1."""
    return 1.0 - 2.0 * np.asarray(bits, dtype=np.float64)


def demap(x) -> np.ndarray:
    return (np.asarray(x) < 0).astype(np.uint8)


def transmit(x, cfg: ChannelConfig, trial_id: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    noise = trial_rng(cfg.seed, cfg.point, trial_id, NOISE_STREAM).standard_normal(x.shape)
    return x + cfg.sigma * noise


def to_llr(y, cfg: ChannelConfig) -> np.ndarray:
    return 2.0 * np.asarray(y, dtype=np.float64) / cfg.sigma**2
