"""Offline fitting of the per-half-iteration decoder parameters.

``optimize_lambdas`` runs DE/rand/1/bin over (lambda1, lambda2, mu) one
half-iteration at a time, earlier half-iterations frozen, minimising the
final BER on a fixed set of frames. ``optimize_alpha`` picks the extrinsic
scale that maximises the GMI of ``L_in + alpha * L_ex`` at one half-iteration.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .channel import DATA_STREAM, ChannelConfig, modulate, to_llr, transmit, trial_rng
from .siso import HalfIterParams
from .tpc import TpcSpec, half_iteration, tpc_decode, tpc_encode

__all__ = [
    "DEFAULT_BOUNDS",
    "DeConfig",
    "DeResult",
    "DecoderContext",
    "differential_evolution",
    "gmi_of_scaled_llrs",
    "alpha_scores",
    "optimize_alpha",
    "optimize_alpha_schedule",
    "optimize_lambdas",
    "params_from_triple",
]

log = logging.getLogger(__name__)

DEFAULT_BOUNDS = ((0.0, 1.5), (0.0, 0.3), (-40.0, 0.0))


def gmi_of_scaled_llrs(llrs, bits) -> float:
    """``1 - mean(log2(1 + exp(-x L)))`` with ``x = +1`` for bit 0 and ``-1`` for bit 1."""
    llrs = np.asarray(llrs, dtype=np.float64).ravel()
    bits = np.asarray(bits).ravel()
    if llrs.shape != bits.shape:
        raise ValueError(f"length mismatch: {llrs.size} LLRs vs {bits.size} bits")
    signed = (1.0 - 2.0 * bits) * llrs
    return float(1.0 - np.mean(np.logaddexp(0.0, -signed)) / np.log(2.0))


@dataclass
class DeConfig:
    population_size: int = 24
    F: float = 0.7
    CR: float = 0.9
    generations: int = 40
    bounds: tuple[tuple[float, float], ...] = DEFAULT_BOUNDS
    objective_snr_db: float = 3.9
    frames_per_eval: int = 20
    seed: int = 0

    def validate(self) -> None:
        if self.population_size < 4:
            raise ValueError(f"DE needs population_size >= 4, got {self.population_size}")
        if not 0.0 < self.CR <= 1.0:
            raise ValueError(f"CR={self.CR} outside (0, 1]")
        if not 0.0 < self.F < 2.0:
            raise ValueError(f"F={self.F} outside (0, 2)")
        if self.generations < 1 or self.frames_per_eval < 1:
            raise ValueError("generations and frames_per_eval must be positive")
        for i, (lo, hi) in enumerate(self.bounds):
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise ValueError(f"bounds[{i}] = ({lo}, {hi}) must be finite with lo < hi")


@dataclass
class DeResult:
    x: np.ndarray
    fun: float
    history: list[float]
    populations: list[np.ndarray]


def differential_evolution(objective: Callable[[np.ndarray], float], cfg: DeConfig) -> DeResult:
    """Minimise ``objective`` over the box ``cfg.bounds`` with DE/rand/1/bin.

    Mutants are clamped to the box. A trial replaces its target only if it is
    no worse, so the best value never increases between generations.
    """
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    lo = np.array([b[0] for b in cfg.bounds], dtype=np.float64)
    hi = np.array([b[1] for b in cfg.bounds], dtype=np.float64)
    npop, dim = cfg.population_size, lo.size

    pop = lo + rng.random((npop, dim)) * (hi - lo)
    fit = np.array([objective(x) for x in pop])
    history = [float(fit.min())]
    populations = [pop.copy()]
    for gen in range(cfg.generations):
        for i in range(npop):
            r1, r2, r3 = rng.choice([j for j in range(npop) if j != i], size=3, replace=False)
            mutant = np.clip(pop[r1] + cfg.F * (pop[r2] - pop[r3]), lo, hi)
            cross = rng.random(dim) < cfg.CR
            cross[rng.integers(dim)] = True
            trial = np.where(cross, mutant, pop[i])
            f = objective(trial)
            if f <= fit[i]:
                pop[i], fit[i] = trial, f
        history.append(float(fit.min()))
        populations.append(pop.copy())
        log.debug("generation %d best %.6g", gen + 1, history[-1])
    best = int(np.argmin(fit))
    return DeResult(pop[best].copy(), float(fit[best]), history, populations)


def params_from_triple(base: HalfIterParams, triple) -> HalfIterParams:
    """The two-slope map is symmetric in its slopes, so they are stored sorted."""
    l1, l2, mu = (float(v) for v in triple)
    return dataclasses.replace(base, lambda1=max(l1, l2), lambda2=min(l1, l2), mu=mu)


class DecoderContext:
    """Fixed Monte Carlo sample (matched seeds) for parameter fitting."""

    def __init__(self, spec: TpcSpec, eb_n0_db: float, frames: int, seed: int = 0, rule: str = "proposed"):
        self.spec = spec
        self.rule = rule
        self.schedule = list(spec.schedule)
        chan = ChannelConfig.from_eb_n0_db(eb_n0_db, spec.rate, seed)
        self.infos, self.codewords, self.llrs = [], [], []
        for trial in range(frames):
            info = trial_rng(seed, 0, trial, DATA_STREAM).integers(0, 2, spec.k, dtype=np.uint8)
            coded = tpc_encode(spec, info)
            self.infos.append(info)
            self.codewords.append(coded)
            self.llrs.append(to_llr(transmit(modulate(coded), chan, trial), chan))

    def _spec(self, schedule=None) -> TpcSpec:
        return self.spec.with_schedule(self.schedule if schedule is None else schedule)

    def ber(self, schedule: Sequence[HalfIterParams] | None = None) -> float:
        spec = self._spec(schedule)
        kc, kr = spec.info_shape
        errors = 0
        for info, llr in zip(self.infos, self.llrs):
            decision, _ = tpc_decode(spec, llr, self.rule)
            errors += int(np.count_nonzero(decision[:kc, :kr].ravel() != info))
        return errors / (len(self.infos) * spec.k)

    def evaluate(self, half_iter: int, triple) -> float:
        schedule = list(self.schedule)
        schedule[half_iter - 1] = params_from_triple(schedule[half_iter - 1], triple)
        return self.ber(schedule)

    def extrinsic_samples(self, half_iter: int):
        """``(L_in, L_ex, bits)`` at ``half_iter`` with the current schedule, flattened over frames."""
        spec = self._spec()
        l_in, l_ex = [], []
        for llr in self.llrs:
            l_app = llr
            for t in range(1, half_iter):
                l_app = llr + spec.schedule[t - 1].scale_for(self.rule) * half_iteration(spec, l_app, t, self.rule)
            l_in.append(llr.ravel())
            l_ex.append(half_iteration(spec, l_app, half_iter, self.rule).ravel())
        bits = np.concatenate([c.ravel() for c in self.codewords])
        return np.concatenate(l_in), np.concatenate(l_ex), bits

    def set_params(self, half_iter: int, params: HalfIterParams) -> None:
        self.schedule[half_iter - 1] = params


def alpha_scores(context, half_iter: int, grid) -> tuple[np.ndarray, np.ndarray]:
    """Sorted grid and the GMI of ``L_in + alpha * L_ex`` at each grid value."""
    grid = np.sort(np.asarray(grid, dtype=np.float64))
    l_in, l_ex, bits = context.extrinsic_samples(half_iter)
    return grid, np.array([gmi_of_scaled_llrs(l_in + a * l_ex, bits) for a in grid])


def optimize_alpha(context, half_iter: int, grid) -> float:
    """GMI-maximising scale on ``grid``; ties resolve to the smaller value."""
    grid, scores = alpha_scores(context, half_iter, grid)
    return float(grid[int(np.argmax(scores))])


def optimize_alpha_schedule(context, grid, on_score: Callable[[int, float, float], None] | None = None) -> list[float]:
    """Greedy forward pass: each half-iteration's alpha is fixed before the next is fitted."""
    alphas = []
    for h in range(1, len(context.schedule) + 1):
        values, scores = alpha_scores(context, h, grid)
        alpha = float(values[int(np.argmax(scores))])
        if on_score is not None:
            for a, g in zip(values, scores):
                on_score(h, float(a), float(g))
        field = "alpha_pyndiah" if getattr(context, "rule", "proposed") == "pyndiah" else "alpha"
        context.set_params(h, dataclasses.replace(context.schedule[h - 1], **{field: alpha}))
        alphas.append(alpha)
        log.info("half-iteration %d: alpha=%.3f", h, alpha)
    return alphas


def optimize_lambdas(context, cfg: DeConfig, half_iters: Sequence[int] | None = None,
                     on_generation: Callable[[int, int, float], None] | None = None):
    """Fit (lambda1, lambda2, mu) per half-iteration; returns ``(triples, objective_values, histories)``."""
    cfg.validate()
    if half_iters is None:
        half_iters = range(1, len(context.schedule) + 1)
    triples, values, histories = [], [], []
    for h in half_iters:
        res = differential_evolution(lambda x, h=h: context.evaluate(h, x), dataclasses.replace(cfg, seed=cfg.seed + h))
        if on_generation is not None:
            for g, v in enumerate(res.history):
                on_generation(h, g, v)
        params = params_from_triple(context.schedule[h - 1], res.x)
        context.set_params(h, params)
        triples.append((params.lambda1, params.lambda2, params.mu))
        values.append(res.fun)
        histories.append(res.history)
        log.info("half-iteration %d: lambda1=%.4f lambda2=%.4f mu=%.3f ber=%.3e", h, *triples[-1], res.fun)
    return triples, values, histories
