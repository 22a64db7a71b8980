"""
Type-II maximum likelihood for (alpha, beta, gamma).

The objective is maximized in log-coordinates ``theta = ln(alpha, beta,
gamma)`` so positivity never has to be enforced. Each start runs a
gradient ascent preconditioned by the (sign-corrected) analytic Hessian,
with a backtracking line search; if the line search stalls away from a stationary point the branch
finishes with Nelder-Mead. The best start wins.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from . import model
from .errors import DegenerateData, NotConverged, WindowMismatch
from .model import Hyperparams, ModeStats, ScaleExponents, TrueModel
from .spectral import WindowedSpectrum

__all__ = [
    "DEFAULT_STARTS",
    "OptimizerConfig",
    "EstimationResult",
    "maximize",
    "estimate_empirical",
    "estimate_expected",
]

DEFAULT_STARTS = (
    Hyperparams(1.0, 1.0, 1.0),
    Hyperparams(1e-2, 1.0, 1e-4),
    Hyperparams(1.0, 1e-2, 1e-4),
    Hyperparams(1e2, 1e-1, 1e-2),
)

STEP_TOL = 1e-8
ARMIJO = 1e-4
MAX_STEP = 2.0  # largest log-coordinate move per iteration
MAX_BACKTRACK = 60


@dataclass(frozen=True)
class OptimizerConfig:
    max_iterations: int = 500
    relative_tolerance: float = 1e-9
    initial_points: tuple = DEFAULT_STARTS
    step_shrink: float = 0.5
    keep_trace: bool = False

    def __post_init__(self):
        if int(self.max_iterations) < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.relative_tolerance > 0:
            raise ValueError("relative_tolerance must be > 0")
        if not 0.0 < self.step_shrink < 1.0:
            raise ValueError("step_shrink must lie in (0, 1)")
        pts = tuple(self.initial_points)
        if not pts:
            raise ValueError("at least one initial point is required")
        object.__setattr__(self, "initial_points", pts)


@dataclass
class EstimationResult:
    estimate: Hyperparams
    objective_value: float
    iterations: int
    converged: bool
    trace: list | None = None
    gradient: np.ndarray | None = None
    diagnostics: dict = field(default_factory=dict)


@dataclass
class _Branch:
    theta: np.ndarray
    value: float
    grad: np.ndarray
    iterations: int
    converged: bool
    trace: list | None
    stalled_steps: list
    plateau: bool = False


def _ascent_direction(g, H):
    """Newton direction with the Hessian forced negative definite."""
    if not np.all(np.isfinite(H)):
        return g.copy()
    w, V = np.linalg.eigh(0.5 * (H + H.T))
    floor = 1e-10 * max(float(np.max(np.abs(w))), 1e-300)
    w = -np.maximum(np.abs(w), floor)
    d = -(V @ ((V.T @ g) / w))
    if not (np.all(np.isfinite(d)) and np.dot(d, g) > 0):
        d = g.copy()
    return d


def _ascend(evaluate, theta0, cfg):
    """Newton-preconditioned gradient ascent with backtracking from ``theta0``."""
    theta = np.array(theta0, dtype=float)
    val, g, H = evaluate(theta)
    trace = [(theta.copy(), val)] if cfg.keep_trace else None
    steps = []
    converged = False
    plateau = False
    it = 0
    while it < cfg.max_iterations:
        it += 1
        d = _ascent_direction(g, H)
        dnorm = np.linalg.norm(d)
        if dnorm > MAX_STEP:
            d *= MAX_STEP / dnorm
        slope = float(np.dot(d, g))
        t = 1.0
        accepted = False
        for _ in range(MAX_BACKTRACK):
            cand = theta + t * d
            cval, cg, cH = evaluate(cand)
            if np.isfinite(cval) and cval >= val + ARMIJO * t * slope:
                accepted = True
                break
            t *= cfg.step_shrink
        if not accepted:
            steps.append(0.0)
            if np.linalg.norm(g) <= 1e-6 * (1.0 + abs(val)):
                # stationary to working precision: no representable improvement left
                converged = True
                break
            theta, val, g, extra, converged = _nelder_mead(evaluate, theta, cfg)
            it += extra
            if trace is not None:
                trace.append((theta.copy(), val))
            break
        step = cand - theta
        improvement = cval - val
        theta, val, g, H = cand, cval, cg, cH
        snorm = float(np.linalg.norm(step))
        steps.append(snorm)
        if trace is not None:
            trace.append((theta.copy(), val))
        tol = cfg.relative_tolerance * max(1.0, abs(val))
        if improvement < tol and snorm < STEP_TOL:
            converged = True
            break
        if improvement < tol and float(np.max(np.abs(g))) < tol:
            # asymptotic plateau: the gain left along any coordinate is below tol
            converged = True
            plateau = True
            break
    return _Branch(theta, val, g, it, converged, trace, steps[-5:], plateau)


def _nelder_mead(evaluate, theta, cfg):
    res = optimize.minimize(
        lambda x: -evaluate(x, value_only=True)[0],
        theta,
        method="Nelder-Mead",
        options={"xatol": STEP_TOL, "fatol": 1e-14, "maxiter": 50 * cfg.max_iterations},
    )
    x = np.array(res.x, dtype=float)
    val, g, _ = evaluate(x)
    converged = bool(res.success) and np.linalg.norm(g) <= 1e-6 * (1.0 + abs(val))
    return x, val, g, int(res.nit), converged


def maximize(stats: ModeStats, cfg: OptimizerConfig | None = None, beta_star=None,
             shift=0.0):
    """
    Maximize the per-mode objective over positive (alpha, beta, gamma).

    Parameters
    ----------
    stats : ModeStats
    cfg : OptimizerConfig, optional
    beta_star : float, optional
        If given, ``stats.power`` is truth power and the expected objective
        is maximized.
    shift : float
        Constant added to the reported objective value only. The search
        itself never sees it, so results do not depend on it.
    """
    cfg = cfg or OptimizerConfig()
    if beta_star is not None:
        stats = ModeStats(stats.lam, stats.power + 1.0 / beta_star)

    lam, power = stats.lam, stats.power

    def evaluate(theta, value_only=False):
        val, grad, hess = model.log_coordinate_derivatives(
            theta, lam, power, hessian=not value_only)
        # an overflowed gradient counts as a rejected point, not a direction
        if not (np.isfinite(val) and np.all(np.isfinite(grad))):
            return -np.inf, grad, hess
        return val, grad, hess

    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        branches = [_ascend(evaluate, p.log_coords(), cfg) for p in cfg.initial_points]
    # highest objective wins; ties go to the smallest log-coordinate norm
    best = min(branches, key=lambda b: (-b.value, float(np.linalg.norm(b.theta))))

    diagnostics = {
        "starts": [
            {"estimate": Hyperparams.from_log(b.theta).as_dict(), "objective": b.value + shift,
             "iterations": b.iterations, "converged": b.converged}
            for b in branches
        ],
        "final_step_norms": best.stalled_steps,
        "gradient_log_norm": float(np.linalg.norm(best.grad)),
        "plateau": best.plateau,
    }
    p = stats.power
    if np.ptp(p) <= 8 * np.finfo(float).eps * max(float(np.max(p)), np.finfo(float).tiny):
        diagnostics["degenerate"] = True
        warnings.warn(
            "data power is flat across modes; alpha is not identifiable and the "
            "estimate sits on a likelihood plateau",
            DegenerateData,
            stacklevel=3,
        )
    if not best.converged:
        warnings.warn(
            f"optimizer stopped after {best.iterations} iterations without meeting "
            f"the stopping rule; returning the best iterate",
            NotConverged,
            stacklevel=3,
        )
    trace = None
    if best.trace is not None:
        trace = [(Hyperparams.from_log(t), v + shift) for t, v in best.trace]
    return EstimationResult(
        estimate=Hyperparams.from_log(best.theta),
        objective_value=best.value + shift,
        iterations=best.iterations,
        converged=best.converged,
        trace=trace,
        gradient=best.grad,
        diagnostics=diagnostics,
    )


def estimate_empirical(G: WindowedSpectrum, n, N, cfg: OptimizerConfig | None = None,
                       exponents: ScaleExponents | None = None) -> EstimationResult:
    """Maximize the empirical renormalized log marginal likelihood of ``G``."""
    if G.n != n or G.N != N:
        raise WindowMismatch(
            f"coefficients cover W({G.n}) of an N={G.N} lattice, expected W({n}) of N={N}"
        )
    shift = model._phi_shift(n, N, exponents)
    return maximize(ModeStats.from_window(G), cfg, shift=shift)


def estimate_expected(tm: TrueModel, n, N, cfg: OptimizerConfig | None = None,
                      exponents: ScaleExponents | None = None) -> EstimationResult:
    """Statistical-average estimates: maximize the expected objective on W(n)."""
    if N != tm.size:
        raise ValueError(f"truth spectrum has size {tm.size}, expected N={N}")
    shift = model._phi_shift(n, N, exponents)
    return maximize(ModeStats.truth(tm, n), cfg, beta_star=tm.beta_star, shift=shift)


def log_gradient_norm(result: EstimationResult):
    return float(np.linalg.norm(result.gradient))
