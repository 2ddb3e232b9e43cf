"""Soft-output rules mapping a Chase candidate list to extrinsic LLRs.

Two rules are provided. The normalized-offset max-log rule compares the
best list candidate for each bit hypothesis against an out-of-list bound
point and passes the gap through a two-slope piecewise-linear map. The
Chase-Pyndiah rule uses the classic competitor difference with a fixed
fallback magnitude when no competitor exists.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chase import CandidateList, ReliabilityOrder, bpsk, build_list, hard_decision, rank_reliability

__all__ = [
    "HalfIterParams",
    "HypothesisReliability",
    "OutListBound",
    "build_out_list_bound",
    "component_extrinsic",
    "extrinsic_proposed",
    "extrinsic_pyndiah",
    "hypothesis_deltas",
    "psi",
]


@dataclass(frozen=True)
class HalfIterParams:
    alpha: float
    lambda1: float
    lambda2: float
    mu: float
    beta_pyndiah: float = 0.0
    alpha_pyndiah: float | None = None

    def __post_init__(self):
        # alpha = 0 is accepted: it switches the iterations off entirely.
        if not 0.0 <= self.alpha <= 1.5:
            raise ValueError(f"alpha={self.alpha} outside [0, 1.5]")
        if not self.lambda1 >= self.lambda2 >= 0.0:
            raise ValueError(f"need lambda1 >= lambda2 >= 0, got {self.lambda1}, {self.lambda2}")
        if self.alpha_pyndiah is not None and not 0.0 <= self.alpha_pyndiah <= 1.5:
            raise ValueError(f"alpha_pyndiah={self.alpha_pyndiah} outside [0, 1.5]")

    def scale_for(self, rule: str) -> float:
        """Extrinsic scale; the baseline rule may carry its own."""
        if rule == "pyndiah" and self.alpha_pyndiah is not None:
            return self.alpha_pyndiah
        return self.alpha


@dataclass(frozen=True)
class OutListBound:
    y_tilde: np.ndarray
    corr_tilde: float
    flipped: np.ndarray


@dataclass(frozen=True)
class HypothesisReliability:
    delta0: float | None
    delta1: float | None


def build_out_list_bound(llr, order: ReliabilityOrder, t_prime: int) -> OutListBound:
    """Sign vector flipping the t'+1 positions ranked just after the Chase set."""
    llr = np.asarray(llr, dtype=np.float64)
    if order.p + t_prime + 1 > llr.shape[0]:
        raise ValueError("p + t' + 1 exceeds the word length")
    flipped = order.indices[order.p : order.p + t_prime + 1]
    y_tilde = bpsk(hard_decision(llr))
    y_tilde[flipped] *= -1.0
    absl = np.abs(llr)
    corr_tilde = 2.0 * (absl.sum() - 2.0 * absl[flipped].sum())
    return OutListBound(y_tilde, float(corr_tilde), flipped)


def hypothesis_deltas(cands: CandidateList, bound: OutListBound, i: int) -> HypothesisReliability:
    if len(cands) == 0:
        raise ValueError("hypothesis reliabilities need a nonempty list")
    out = []
    for s in (0, 1):
        mask = cands.words[:, i] == s
        out.append(float(cands.corr[mask].max() - bound.corr_tilde) if mask.any() else None)
    return HypothesisReliability(*out)


def psi(delta: float | None, params: HalfIterParams) -> float:
    if delta is None:
        return 0.0
    shifted = delta - params.mu
    return max(params.lambda1 * shifted, params.lambda2 * shifted)


def extrinsic_proposed(llr, cands: CandidateList, bound: OutListBound, params: HalfIterParams) -> np.ndarray:
    llr = np.asarray(llr, dtype=np.float64)
    ext = np.zeros_like(llr)
    if len(cands) == 0:
        return ext
    for i in range(llr.shape[0]):
        h = hypothesis_deltas(cands, bound, i)
        ext[i] = psi(h.delta0, params) - psi(h.delta1, params)
    return ext


def extrinsic_pyndiah(llr, cands: CandidateList, params: HalfIterParams) -> np.ndarray:
    llr = np.asarray(llr, dtype=np.float64)
    ext = np.zeros_like(llr)
    if len(cands) == 0:
        return ext
    best = cands.best
    corr_best = cands.corr[cands.best_index]
    sign = bpsk(best)
    for i in range(llr.shape[0]):
        rivals = cands.words[:, i] != best[i]
        if rivals.any():
            ext[i] = sign[i] * (corr_best - cands.corr[rivals].max()) / 4.0 - llr[i]
        else:
            ext[i] = params.beta_pyndiah * sign[i]
    return ext


def component_extrinsic(spec, llr, p: int, params: HalfIterParams, rule: str = "proposed", t_prime: int | None = None):
    """Reference (uncompiled) soft-output path for one component word."""
    llr = np.asarray(llr, dtype=np.float64)
    cands = build_list(spec, llr, p)
    if rule == "pyndiah":
        return extrinsic_pyndiah(llr, cands, params)
    if rule != "proposed":
        raise ValueError(f"unknown rule {rule!r}")
    order = rank_reliability(llr, p)
    bound = build_out_list_bound(llr, order, spec.t if t_prime is None else t_prime)
    return extrinsic_proposed(llr, cands, bound, params)
