"""Product-code encoding and the iterative column/row soft decoder.

Half-iteration ``t`` (1-based) decodes every column when ``t`` is odd and
every row when it is even, reading a-priori values from the previous
a-posteriori matrix and writing ``L_app = L_in + alpha_t * L_ex``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .bch import CodeSpec, LengthMismatch, check, encode
from .siso import HalfIterParams

__all__ = ["RULES", "TpcSpec", "extract_info", "half_iteration", "tpc_decode", "tpc_encode"]

RULES = ("proposed", "pyndiah", "oracle")


@dataclass(frozen=True, eq=False)
class TpcSpec:
    row_code: CodeSpec
    col_code: CodeSpec
    p: int
    schedule: tuple[HalfIterParams, ...]
    t_prime_row: int | None = None
    t_prime_col: int | None = None
    _oracles: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "schedule", tuple(self.schedule))
        if len(self.schedule) % 2:
            raise ValueError(f"schedule needs an even number of half-iterations, got {len(self.schedule)}")
        for code, tp in ((self.row_code, self.t_prime_row), (self.col_code, self.t_prime_col)):
            if self.p + (code.t if tp is None else tp) + 1 > code.n:
                raise ValueError(f"p={self.p} too large for {code.name}")

    @property
    def shape(self) -> tuple[int, int]:
        return self.col_code.n, self.row_code.n

    @property
    def info_shape(self) -> tuple[int, int]:
        return self.col_code.k, self.row_code.k

    @property
    def k(self) -> int:
        return self.col_code.k * self.row_code.k

    @property
    def rate(self) -> float:
        return self.k / (self.col_code.n * self.row_code.n)

    @property
    def iterations(self) -> int:
        return len(self.schedule) // 2

    def with_schedule(self, schedule: Sequence[HalfIterParams]) -> TpcSpec:
        return TpcSpec(self.row_code, self.col_code, self.p, tuple(schedule), self.t_prime_row, self.t_prime_col)


def tpc_encode(spec: TpcSpec, info) -> np.ndarray:
    info = np.asarray(info, dtype=np.uint8)
    if info.size != spec.k:
        raise LengthMismatch(f"expected {spec.k} information bits, got {info.size}")
    rows = encode(spec.row_code, info.reshape(spec.info_shape))
    return np.ascontiguousarray(encode(spec.col_code, rows.T).T)


def extract_info(spec: TpcSpec, decision) -> np.ndarray:
    kc, kr = spec.info_shape
    return np.asarray(decision)[:kc, :kr].reshape(-1).copy()


def _component_pass(code: CodeSpec, t_prime: int | None, p: int, llr_rows: np.ndarray, rule: str,
                    params: HalfIterParams, oracles: dict) -> np.ndarray:
    if rule == "oracle":
        from .oracle import Codebook, exact_extrinsic

        if code.name not in oracles:
            oracles[code.name] = Codebook.from_code(code)
        return exact_extrinsic(oracles[code.name], llr_rows)
    llr_rows = np.ascontiguousarray(llr_rows, dtype=np.float64)
    ext = np.empty_like(llr_rows)
    gf = code.field
    _kernels.siso_rows(
        llr_rows, code.n_base, code.extended, code.t, code.t if t_prime is None else t_prime, p,
        code.syndrome_table, gf.exp_table, gf.log_table, gf.order,
        _kernels.RULE_PROPOSED if rule == "proposed" else _kernels.RULE_PYNDIAH,
        params.lambda1, params.lambda2, params.mu, params.beta_pyndiah, ext,
    )
    return ext


def half_iteration(spec: TpcSpec, l_app_prev: np.ndarray, t: int, rule: str = "proposed") -> np.ndarray:
    """Extrinsic matrix produced at half-iteration ``t`` (1-based) from ``L_app_{t-1}``."""
    if rule not in RULES:
        raise ValueError(f"unknown rule {rule!r}; expected one of {RULES}")
    params = spec.schedule[t - 1]
    if t % 2:
        ext = _component_pass(spec.col_code, spec.t_prime_col, spec.p, l_app_prev.T, rule, params, spec._oracles)
        return ext.T
    return _component_pass(spec.row_code, spec.t_prime_row, spec.p, l_app_prev, rule, params, spec._oracles)


def _is_product_codeword(spec: TpcSpec, bits: np.ndarray) -> bool:
    return all(check(spec.row_code, r) for r in bits) and all(check(spec.col_code, c) for c in bits.T)


def tpc_decode(spec: TpcSpec, l_in, rule: str = "proposed", stop_early: bool = False):
    """Run the full schedule; returns ``(decision_bits, final_l_app)``."""
    l_in = np.asarray(l_in, dtype=np.float64)
    if l_in.shape != spec.shape:
        raise LengthMismatch(f"LLR matrix shape {l_in.shape} does not match {spec.shape}")
    l_app = l_in
    for t in range(1, len(spec.schedule) + 1):
        ext = half_iteration(spec, l_app, t, rule)
        l_app = l_in + spec.schedule[t - 1].scale_for(rule) * ext
        if stop_early and t % 2 == 0 and _is_product_codeword(spec, (l_app < 0).astype(np.uint8)):
            break
    return (l_app < 0).astype(np.uint8), l_app
