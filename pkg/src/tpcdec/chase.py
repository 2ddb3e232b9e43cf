"""Chase-II test patterns and candidate lists for one component word."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bch import CodeSpec, LengthMismatch, bdd_decode

__all__ = [
    "CandidateList",
    "ReliabilityOrder",
    "bpsk",
    "build_list",
    "correlation",
    "hard_decision",
    "rank_reliability",
    "test_patterns",
]


@dataclass(frozen=True)
class ReliabilityOrder:
    indices: np.ndarray
    p: int

    @property
    def least_reliable(self) -> np.ndarray:
        return self.indices[: self.p]


@dataclass(frozen=True)
class CandidateList:
    """Distinct BDD outputs in order of first appearance.

    ``words`` has shape ``(size, n)``; ``corr[j]`` is ``(2l)^T phi(words[j])``.
    """

    words: np.ndarray
    corr: np.ndarray

    def __len__(self) -> int:
        return self.words.shape[0]

    @property
    def best_index(self) -> int:
        if len(self) == 0:
            raise IndexError("empty candidate list")
        return int(np.argmax(self.corr))

    @property
    def best(self) -> np.ndarray:
        return self.words[self.best_index]


def bpsk(bits) -> np.ndarray:
    return 1.0 - 2.0 * np.asarray(bits, dtype=np.float64)


def hard_decision(llr) -> np.ndarray:
    """Negative LLRs map to bit 1; zero maps to bit 0."""
    return (np.asarray(llr) < 0).astype(np.uint8)


def correlation(llr, word) -> float:
    return float(np.dot(2.0 * np.asarray(llr, dtype=np.float64), bpsk(word)))


def rank_reliability(llr, p: int) -> ReliabilityOrder:
    llr = np.asarray(llr, dtype=np.float64)
    if not 0 <= p <= llr.shape[0]:
        raise ValueError(f"p={p} must lie in [0, {llr.shape[0]}]")
    return ReliabilityOrder(np.argsort(np.abs(llr), kind="stable"), p)


def test_patterns(hard, order: ReliabilityOrder) -> np.ndarray:
    """All 2^p perturbations of ``hard``; bit j of the pattern index flips the j-th least reliable position."""
    hard = np.asarray(hard, dtype=np.uint8)
    idx = np.arange(1 << order.p)
    flips = ((idx[:, None] >> np.arange(order.p)) & 1).astype(np.uint8)
    patterns = np.repeat(hard[None, :], idx.size, axis=0)
    patterns[:, order.least_reliable] ^= flips
    return patterns


def build_list(spec: CodeSpec, llr, p: int) -> CandidateList:
    llr = np.asarray(llr, dtype=np.float64)
    if llr.shape[0] != spec.n:
        raise LengthMismatch(f"expected {spec.n} LLRs, got {llr.shape[0]}")
    order = rank_reliability(llr, p)
    seen: dict[bytes, np.ndarray] = {}
    for pattern in test_patterns(hard_decision(llr), order):
        word = bdd_decode(spec, pattern)
        if word is not None:
            seen.setdefault(word.tobytes(), word)
    if not seen:
        return CandidateList(np.zeros((0, spec.n), dtype=np.uint8), np.zeros(0))
    words = np.stack(list(seen.values()))
    return CandidateList(words, (2.0 * llr) @ bpsk(words).T)
