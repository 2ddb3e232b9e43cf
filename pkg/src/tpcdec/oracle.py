"""Exact bitwise MAP soft output by codebook enumeration (small codes only)."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bch import CodeSpec
from .channel import DATA_STREAM, ChannelConfig, modulate, to_llr, transmit, trial_rng
from .chase import build_list, rank_reliability
from .siso import build_out_list_bound, hypothesis_deltas

__all__ = [
    "LLR_MAX",
    "MAX_DIMENSION",
    "CORRELATION_COLUMNS",
    "CodeTooLarge",
    "Codebook",
    "correlate_delta_vs_exact",
    "exact_app_llr",
    "exact_extrinsic",
    "fit_slope",
    "subset_log_probs",
    "write_correlation_csv",
]

LLR_MAX = 60.0
MAX_DIMENSION = 26
# words (uint8) + symbols (float64) per codebook entry and position
MAX_CODEBOOK_BYTES = 2 << 30
CORRELATION_COLUMNS = ("trial", "pos", "delta0", "exact_ex", "in_list")


class CodeTooLarge(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Codebook:
    words: np.ndarray
    symbols: np.ndarray

    @classmethod
    def from_code(cls, spec: CodeSpec) -> Codebook:
        if spec.k > MAX_DIMENSION:
            raise CodeTooLarge(f"{spec.name}: k={spec.k} exceeds the enumeration limit {MAX_DIMENSION}")
        need = (1 << spec.k) * spec.n * 9
        if need > MAX_CODEBOOK_BYTES:
            raise CodeTooLarge(f"{spec.name}: codebook needs {need / 2**30:.1f} GiB, limit is {MAX_CODEBOOK_BYTES / 2**30:.0f} GiB")
        # codeword j is the XOR of generator rows selected by the bits of j
        words = np.zeros((1 << spec.k, spec.n), dtype=np.uint8)
        for row in range(spec.k):
            half = 1 << row
            words[half : 2 * half] = words[:half] ^ spec.generator_matrix[spec.k - 1 - row]
        return cls.from_words(words)

    @classmethod
    def from_words(cls, words) -> Codebook:
        words = np.atleast_2d(np.asarray(words, dtype=np.uint8))
        return cls(words, modulate(words))

    def __len__(self) -> int:
        return self.words.shape[0]


def subset_log_probs(codebook: Codebook, llr) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Unnormalized log posteriors of the bit-0 and bit-1 subsets per position.

    Returns ``(log_p0, log_p1, log_total)``; the codeword log-likelihood is
    ``l^T phi(c) / 2`` up to a constant shared by all codewords.
    """
    llr = np.atleast_2d(np.asarray(llr, dtype=np.float64))
    metric = 0.5 * llr @ codebook.symbols.T
    peak = metric.max(axis=1, keepdims=True)
    weights = np.exp(metric - peak)
    ones = codebook.words.astype(np.float64)
    with np.errstate(divide="ignore"):
        log_p1 = np.log(weights @ ones) + peak
        log_p0 = np.log(weights @ (1.0 - ones)) + peak
        log_total = np.log(weights.sum(axis=1, keepdims=True)) + peak
    return log_p0, log_p1, log_total


def exact_app_llr(codebook: Codebook, llr) -> np.ndarray:
    """Bitwise a-posteriori LLRs, saturated at +-LLR_MAX.

    Accepts one word ``(n,)`` or a batch ``(B, n)`` and returns the same shape.
    """
    llr = np.asarray(llr, dtype=np.float64)
    log_p0, log_p1, _ = subset_log_probs(codebook, llr)
    with np.errstate(invalid="ignore"):
        app = log_p0 - log_p1
    app = np.clip(np.nan_to_num(app, nan=0.0, posinf=LLR_MAX, neginf=-LLR_MAX), -LLR_MAX, LLR_MAX)
    return app.reshape(llr.shape)


def exact_extrinsic(codebook: Codebook, llr) -> np.ndarray:
    return exact_app_llr(codebook, llr) - np.asarray(llr, dtype=np.float64)


def correlate_delta_vs_exact(spec: CodeSpec, n_trials: int, sigma: float, p: int, seed: int = 0,
                             t_prime: int | None = None, all_zero: bool = True) -> np.ndarray:
    """Per-(trial, position) table of reliability gap vs. exact extrinsic.

    With ``all_zero`` the zero codeword is sent and ``delta0`` is the gap of
    the bit-0 hypothesis. Otherwise a random codeword is sent and both
    columns are taken for the transmitted bit (gap of that hypothesis, exact
    extrinsic multiplied by its BPSK symbol), which is the same statistic by
    code linearity. ``delta0`` is NaN where the hypothesis has no candidate.
    """
    codebook = Codebook.from_code(spec)
    t_prime = spec.t if t_prime is None else t_prime
    cfg = ChannelConfig(sigma, seed)
    dtype = [("trial", np.int64), ("pos", np.int64), ("delta0", np.float64), ("exact_ex", np.float64), ("in_list", np.bool_)]
    table = np.zeros(n_trials * spec.n, dtype=dtype)
    for trial in range(n_trials):
        if all_zero:
            sent = codebook.words[0]
        else:
            sent = codebook.words[trial_rng(seed, 0, trial, DATA_STREAM).integers(len(codebook))]
        llr = to_llr(transmit(modulate(sent), cfg, trial), cfg)
        cands = build_list(spec, llr, p)
        bound = build_out_list_bound(llr, rank_reliability(llr, p), t_prime)
        in_list = bool(len(cands)) and bool((cands.words == sent).all(axis=1).any())
        exact = exact_extrinsic(codebook, llr) * modulate(sent)
        rows = table[trial * spec.n : (trial + 1) * spec.n]
        rows["trial"] = trial
        rows["pos"] = np.arange(spec.n)
        rows["exact_ex"] = exact
        rows["in_list"] = in_list
        for i in range(spec.n):
            d = None
            if len(cands):
                h = hypothesis_deltas(cands, bound, i)
                d = h.delta1 if sent[i] else h.delta0
            rows["delta0"][i] = np.nan if d is None else d
    return table


def fit_slope(table: np.ndarray, in_list: bool = True) -> tuple[float, float]:
    """Least-squares line ``exact_ex ~ slope * delta0 + intercept`` over one list-membership class."""
    sel = (table["in_list"] == in_list) & np.isfinite(table["delta0"])
    if sel.sum() < 2:
        raise ValueError("not enough rows to fit")
    slope, intercept = np.polyfit(table["delta0"][sel], table["exact_ex"][sel], 1)
    return float(slope), float(intercept)


def write_correlation_csv(table: np.ndarray, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CORRELATION_COLUMNS)
        for row in table:
            d0 = "" if np.isnan(row["delta0"]) else repr(float(row["delta0"]))
            writer.writerow([int(row["trial"]), int(row["pos"]), d0, repr(float(row["exact_ex"])),
                             "true" if row["in_list"] else "false"])
