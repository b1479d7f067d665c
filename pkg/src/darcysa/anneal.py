"""Annealed minimization of the quadratic flow energy.

Phases: random init -> plain Metropolis burn-in -> plateau detection ->
exponential cooling with over-relaxation interleaving -> greedy descent.
Convergence is monitored on the normalized mass-balance residual, not on
the raw energy (whose minimum is nonzero under a pressure difference);
traces expose both so the interpretation is auditable.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .darcy import (
    PressureState,
    ScalarField,
    Transmissibilities,
    action,
    residual,
    transmissibilities,
)
from .grid import BoundaryConditions, GridSpec


@dataclass(frozen=True)
class AnnealConfig:
    m: int = 2000  # plain Metropolis burn-in sweeps
    n_s: int = 3000  # sweeps per plateau-check / cooling block
    alpha: float = 0.9  # cooling factor
    t_i: float = 0.5  # initial cooling temperature
    eps1: float = 0.1  # residual threshold to enter the greedy phase
    eps2: float = 1e-2  # final residual threshold
    or_ratio: float = 0.75  # fraction of cooling sweeps that are over-relaxation
    proposal_width: float | None = None  # initial step size [m]; default 0.5*|dp|
    target_acceptance: float = 0.4
    plateau_rtol: float = 0.01
    max_phases: int = 500  # cooling-phase budget
    max_greedy_sweeps: int = 200_000
    rule: str = "harmonic"

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must be in (0, 1)")
        if not 0 < self.t_i <= 1:
            raise ValueError("t_i must be in (0, 1]")
        if not 0 < self.eps2 < self.eps1:
            raise ValueError("need 0 < eps2 < eps1")
        if not 0 <= self.or_ratio < 1:
            raise ValueError("or_ratio must be in [0, 1)")


@dataclass
class TraceRecord:
    phase: str  # 'init' | 'burnin' | 'plateau' | 'cooling' | 'greedy'
    k: int  # cooling step, -1 outside the cooling phase
    temperature: float
    sweep: int  # cumulative sweep count
    action: float
    residual: float
    acceptance_rate: float


@dataclass
class AnnealTrace:
    records: list[TraceRecord] = field(default_factory=list)

    def add(self, *args):
        self.records.append(TraceRecord(*args))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["phase", "k", "temperature", "sweep", "action", "residual", "acceptance_rate"])
            for r in self.records:
                w.writerow([r.phase, r.k, repr(r.temperature), r.sweep, repr(r.action), repr(r.residual), repr(r.acceptance_rate)])


class AnnealError(RuntimeError):
    def __init__(self, msg, trace: AnnealTrace | None = None):
        super().__init__(msg)
        self.trace = trace


def init_pressure(g: GridSpec, bc: BoundaryConditions, seed) -> PressureState:
    """Uniform random interior pressure between the two boundary heads."""
    rng = np.random.default_rng(seed)
    lo = min(bc.inlet_pressure, bc.outlet_pressure)
    hi = max(bc.inlet_pressure, bc.outlet_pressure)
    vals = rng.uniform(lo, hi, size=g.shape) if hi > lo else np.full(g.shape, lo)
    return PressureState(g, bc, vals)


def _kernel_args(p: PressureState, T: Transmissibilities):
    return (
        p.values, T.tx, T.ty, T.tz, T.ty_in, T.ty_out,
        p.bc.inlet_pressure, p.bc.outlet_pressure,
    )


def mh_sweep(p: PressureState, T: Transmissibilities, temperature: float, width: float, seed):
    """One lexicographic Metropolis sweep; accepts with min(1, exp(-dS/T)).

    Mutates p in place and returns (p, acceptance_rate). temperature = 1
    reproduces the plain pre-cooling Metropolis step.
    """
    rng = np.random.default_rng(seed)
    n = p.grid.n_cells
    offsets = rng.uniform(-1.0, 1.0, n)
    uniforms = rng.uniform(0.0, 1.0, n)
    acc = kernels.metropolis_sweep(*_kernel_args(p, T), temperature, width, offsets, uniforms, False)
    return p, acc / n


def greedy_sweep(p: PressureState, T: Transmissibilities, width, seed, target: float = 0.35):
    """As mh_sweep but accepts only dS < 0; the action never increases.

    `width` may be a scalar, or a per-cell array that is then adapted in
    place (accepted -> widen, rejected -> narrow, equilibrium acceptance
    `target`) so every cell's step tracks its own distance to the local
    minimizer. Lower targets trade speed for a lower stochastic noise
    floor on the residual.
    """
    rng = np.random.default_rng(seed)
    n = p.grid.n_cells
    offsets = rng.uniform(-1.0, 1.0, n)
    if np.ndim(width) == 0:
        acc = kernels.metropolis_sweep(*_kernel_args(p, T), 1.0, float(width), offsets, offsets, True)
    else:
        dp_scale = max(abs(p.bc.dp), 1.0)
        acc = kernels.greedy_adaptive_sweep(
            *_kernel_args(p, T), width, offsets,
            np.exp(0.5 * (1.0 - target)), np.exp(-0.5 * target), 1e-15 * dp_scale, dp_scale,
        )
    return p, acc / n


def or_sweep(p: PressureState, T: Transmissibilities):
    """Over-relaxation: reflect each cell about its local minimizer, in order."""
    kernels.overrelax_sweep(*_kernel_args(p, T))
    return p


def cooling_temperature(k: int, alpha: float, t_i: float) -> float:
    """Exponential schedule T(k) = alpha^k * t_i."""
    if k < 0:
        raise ValueError("cooling step must be >= 0")
    return alpha**k * t_i


def windowed_plateau(series, window: int, rtol: float) -> bool:
    """True when the means of the last two consecutive windows agree to rtol."""
    if len(series) < 2 * window:
        return False
    a = float(np.mean(series[-2 * window : -window]))
    b = float(np.mean(series[-window:]))
    return abs(b - a) <= rtol * max(abs(a), 1e-300)


def solve(
    K: ScalarField,
    g: GridSpec,
    bc: BoundaryConditions,
    cfg: AnnealConfig,
    seed,
) -> tuple[PressureState, AnnealTrace]:
    """Full annealing pipeline; deterministic given (K, cfg, seed).

    Raises AnnealError (carrying the trace) when the cooling-phase or
    greedy-sweep budget runs out before the residual reaches eps2.
    """
    T = transmissibilities(K, g, cfg.rule)
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    init_seed, sweep_seed = ss.spawn(2)
    sweep_rng = np.random.default_rng(sweep_seed)

    p = init_pressure(g, bc, init_seed)
    trace = AnnealTrace()
    sweep = 0
    width = cfg.proposal_width if cfg.proposal_width is not None else 0.5 * abs(bc.dp)
    if width <= 0:
        width = 1e-3
    min_width = 1e-14 * max(abs(bc.dp), 1.0)

    res = residual(p, T)
    trace.add("init", -1, 1.0, sweep, action(p, T), res, 0.0)
    if res <= cfg.eps2:  # dp = 0 gives the constant exact field at init
        return p, trace

    # burn-in: plain Metropolis at temperature 1
    block = max(1, min(50, cfg.m))
    done = 0
    while done < cfg.m:
        n_sw = min(block, cfg.m - done)
        acc_sum = 0.0
        for _ in range(n_sw):
            _, a = mh_sweep(p, T, 1.0, width, sweep_rng)
            acc_sum += a
            sweep += 1
        done += n_sw
        rate = acc_sum / n_sw
        width = max(min_width, width * float(np.clip(rate / cfg.target_acceptance, 0.5, 2.0)))
        trace.add("burnin", -1, 1.0, sweep, action(p, T), residual(p, T), rate)

    # plateau detection on block means of the action, every n_s sweeps
    block_means = []
    for _ in range(cfg.max_phases):
        acts = np.empty(cfg.n_s)
        acc_sum = 0.0
        for s in range(cfg.n_s):
            _, a = mh_sweep(p, T, 1.0, width, sweep_rng)
            acc_sum += a
            acts[s] = action(p, T)
            sweep += 1
        block_means.append(float(acts.mean()))
        rate = acc_sum / cfg.n_s
        trace.add("plateau", -1, 1.0, sweep, float(acts[-1]), residual(p, T), rate)
        if windowed_plateau(block_means, 1, cfg.plateau_rtol):
            break
    else:
        raise AnnealError("action never plateaued within the phase budget", trace)

    # exponential cooling with over-relaxation interleaving
    mh_period = max(1, round(1.0 / (1.0 - cfg.or_ratio)))
    entered_greedy = False
    for k in range(cfg.max_phases):
        temp = cooling_temperature(k, cfg.alpha, cfg.t_i)
        if k > 0:
            width = max(min_width, width * np.sqrt(cfg.alpha))
        acc_sum = 0.0
        n_mh = 0
        for s in range(1, cfg.n_s + 1):
            if s % mh_period == 0:
                _, a = mh_sweep(p, T, temp, width, sweep_rng)
                acc_sum += a
                n_mh += 1
            else:
                or_sweep(p, T)
            sweep += 1
        rate = acc_sum / n_mh if n_mh else 0.0
        if n_mh:
            width = max(min_width, width * float(np.clip(rate / cfg.target_acceptance, 0.5, 2.0) ** 0.5))
        res = residual(p, T)
        trace.add("cooling", k, temp, sweep, action(p, T), res, rate)
        if res <= cfg.eps1:
            entered_greedy = True
            break
    if not entered_greedy:
        raise AnnealError(
            f"residual {res:.3e} above eps1={cfg.eps1} after {cfg.max_phases} cooling phases", trace
        )

    # greedy descent, checked every n_s sweeps like the cooling blocks, with
    # per-cell width adaptation and the same OR interleaving (OR alone leaves
    # the action fixed, so the phase stays non-increasing); when the residual
    # stops improving between checks, lower the acceptance target to push
    # down the stochastic noise floor (ill-conditioned K fields need this)
    widths = np.full(g.shape, max(width, 1e-3 * max(abs(bc.dp), 1.0)))
    target = 0.35
    best_res = np.inf
    n_greedy = 0
    while n_greedy < cfg.max_greedy_sweeps:
        block = min(cfg.n_s, cfg.max_greedy_sweeps - n_greedy)
        rate = 0.0
        for s in range(1, block + 1):
            if s % mh_period == 0:
                _, rate = greedy_sweep(p, T, widths, sweep_rng, target)
            else:
                or_sweep(p, T)
            n_greedy += 1
            sweep += 1
        res = residual(p, T)
        trace.add("greedy", -1, 0.0, sweep, action(p, T), res, rate)
        if res <= cfg.eps2:
            return p, trace
        if res > 0.8 * best_res and target > 0.02:
            target *= 0.5
        best_res = min(best_res, res)
    raise AnnealError(
        f"residual {res:.3e} above eps2={cfg.eps2} after {cfg.max_greedy_sweeps} greedy sweeps",
        trace,
    )
