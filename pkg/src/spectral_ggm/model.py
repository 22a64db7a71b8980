"""
Gaussian graphical model on the torus, written mode by mode.

In the DFT basis the prior precision is diagonal with entries
``c = gamma + alpha * lam`` and a data coefficient has variance
``1/beta + 1/c``. Everything here works on per-mode arrays of ``lam`` and
data power, so a single transform of the data is enough for any number of
objective and gradient evaluations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import spectral
from .errors import WindowMismatch, WindowTooLarge
from .spectral import WindowedSpectrum

__all__ = [
    "Hyperparams",
    "ScaleExponents",
    "PowerSpectrum",
    "TrueModel",
    "ModeStats",
    "prior_mode_variance",
    "marginal_mode_variance",
    "wiener_gain",
    "empirical_objective",
    "expected_objective",
    "objective_gradient",
]

LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class Hyperparams:
    """Smoothness ``alpha``, noise ``beta`` and ridge ``gamma`` precisions."""

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v > 0.0):
                raise ValueError(f"{name} must be finite and > 0, got {v!r}")
            object.__setattr__(self, name, v)

    def as_array(self):
        return np.array([self.alpha, self.beta, self.gamma])

    def log_coords(self):
        return np.log(self.as_array())

    @classmethod
    def from_log(cls, theta):
        a, b, g = np.exp(np.asarray(theta, dtype=float))
        return cls(a, b, g)

    def as_dict(self):
        return {"alpha": self.alpha, "beta": self.beta, "gamma": self.gamma}


@dataclass(frozen=True)
class ScaleExponents:
    """Power-law exponents of the field (``psi``) and data (``phi``) rescaling."""

    psi: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        for name in ("psi", "phi"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, v)


@dataclass(frozen=True, eq=False)
class PowerSpectrum:
    """Per-mode ``|F(k, l)|**2`` of a truth image, FFT-natural order."""

    power: np.ndarray

    def __post_init__(self):
        p = np.array(self.power, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise ValueError(f"expected a square power array, got {p.shape}")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise ValueError("power must be finite and non-negative")
        p.setflags(write=False)
        object.__setattr__(self, "power", p)

    @classmethod
    def from_field(cls, f):
        return cls(spectral.forward_dft(f).power())

    @property
    def size(self):
        return self.power.shape[0]

    def windowed(self, n):
        """Power on the modes of W(n), in signed order (n x n)."""
        if n > self.size:
            raise WindowTooLarge(f"window side n={n} exceeds lattice side N={self.size}")
        idx = spectral.window_labels(n) % self.size
        return self.power[np.ix_(idx, idx)]


@dataclass(frozen=True, eq=False)
class TrueModel:
    """Truth used for statistical averages: noise precision and truth spectrum."""

    beta_star: float
    truth_spectrum: PowerSpectrum

    def __post_init__(self):
        b = float(self.beta_star)
        if not (math.isfinite(b) and b > 0.0):
            raise ValueError(f"beta_star must be finite and > 0, got {b!r}")
        object.__setattr__(self, "beta_star", b)

    @classmethod
    def from_field(cls, f, beta_star):
        return cls(beta_star, PowerSpectrum.from_field(f))

    @property
    def size(self):
        return self.truth_spectrum.size


@dataclass(frozen=True, eq=False)
class ModeStats:
    """
    Per-mode sufficient statistics: eigenvalue ``lam`` and data power.

    Both arrays are flattened; their common length is the number of modes
    the objective sums over (``n**2`` for a window W(n)).
    """

    lam: np.ndarray
    power: np.ndarray

    def __post_init__(self):
        lam = np.array(self.lam, dtype=float).ravel()
        power = np.array(self.power, dtype=float).ravel()
        if lam.shape != power.shape or lam.size == 0:
            raise ValueError("lam and power must be non-empty and of equal size")
        if np.any(lam < 0) or np.any(power < 0):
            raise ValueError("lam and power must be non-negative")
        lam.setflags(write=False)
        power.setflags(write=False)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "power", power)

    @property
    def count(self):
        return self.lam.size

    @classmethod
    def from_window(cls, G: WindowedSpectrum):
        return cls(G.eigenvalues(), G.power())

    @classmethod
    def truth(cls, tm: TrueModel, n):
        """Truth power ``|F*|**2`` on W(n); pair with ``beta_star`` for expectations."""
        N = tm.size
        ks = spectral.window_labels(n)
        lam = spectral.lattice_eigenvalue(ks[:, None], ks[None, :], N)
        return cls(lam, tm.truth_spectrum.windowed(n))

    @classmethod
    def expected(cls, tm: TrueModel, n):
        """Expected data power ``|F*|**2 + 1/beta_star`` on W(n)."""
        base = cls.truth(tm, n)
        return cls(base.lam, base.power + 1.0 / tm.beta_star)


def prior_mode_variance(h: Hyperparams, lam):
    return 1.0 / (h.gamma + h.alpha * np.asarray(lam, dtype=float))


def marginal_mode_variance(h: Hyperparams, lam):
    return 1.0 / h.beta + prior_mode_variance(h, lam)


def wiener_gain(h: Hyperparams, lam):
    """Posterior-mean gain ``beta / (beta + gamma + alpha * lam)`` per mode."""
    return h.beta / (h.beta + h.gamma + h.alpha * np.asarray(lam, dtype=float))


def _per_mode_terms(h, stats):
    c = h.gamma + h.alpha * stats.lam
    # ln(c / (beta + c)) = -log1p(beta / c), accurate for beta << c and beta >> c
    return -np.log1p(h.beta / c), h.beta * c / (h.beta + c)


def _objective_from_stats(h: Hyperparams, stats: ModeStats, shift=0.0):
    logfrac, shrink = _per_mode_terms(h, stats)
    per_mode = logfrac - stats.power * shrink
    return shift - 0.5 * (LOG_2PI - math.log(h.beta)) + 0.5 * float(np.mean(per_mode))


def log_coordinate_derivatives(theta, lam, power, hessian=True):
    """
    Objective, gradient and Hessian in ``theta = ln(alpha, beta, gamma)``.

    Fused inner loop for the optimizer; ``lam`` and ``power`` are flat
    per-mode arrays (power already includes any noise expectation). The
    objective omits the ``phi`` constant.
    """
    x = np.exp(theta)
    a, b, g = x
    c = g + a * lam
    inv_c = 1.0 / c
    inv_s = 1.0 / (b + c)
    bs = b * inv_s
    cs = c * inv_s
    pbs = power * bs
    half_m = 0.5 / lam.size
    value = -0.5 * (LOG_2PI - math.log(b)) - half_m * (
        np.log1p(b * inv_c).sum() + pbs.dot(c))
    # first derivatives of the per-mode term in c and beta
    t_c = inv_c - inv_s - pbs * bs
    t_b = -inv_s - power * cs * cs
    grad = x * np.array([half_m * lam.dot(t_c), 0.5 / b + half_m * t_b.sum(),
                         half_m * t_c.sum()])
    if not hessian:
        return value, grad, None
    inv_s2 = inv_s * inv_s
    w = 2.0 * power * inv_s
    t_cc = inv_s2 - inv_c * inv_c + w * bs * bs
    t_bc = inv_s2 - w * bs * cs
    lt_cc = lam * t_cc
    h_ag = lt_cc.sum()
    h_ab = lam.dot(t_bc)
    h_bg = t_bc.sum()
    H = np.array([
        [lam.dot(lt_cc), h_ab, h_ag],
        [h_ab, (inv_s2 + w * cs * cs).sum() - 0.5 / (b * b * half_m), h_bg],
        [h_ag, h_bg, t_cc.sum()],
    ])
    # chain rule into log coordinates
    H *= half_m * x[:, None] * x[None, :]
    H[np.diag_indices(3)] += grad
    return value, grad, H


def _phi_shift(n, N, exponents):
    if exponents is None:
        return 0.0
    return exponents.phi * math.log(n / N)


def empirical_objective(h: Hyperparams, G: WindowedSpectrum, n, N, exponents=None):
    """
    Renormalized log marginal likelihood of windowed data, divided by ``n**2``.

    Parameters
    ----------
    h : Hyperparams
    G : WindowedSpectrum
        Data coefficients on W(n), as returned by ``select_window``.
    n, N : int
        Window side and lattice side; must agree with ``G``.
    exponents : ScaleExponents, optional
        Only ``phi`` enters, as the additive constant ``phi * ln(n/N)``.

    Returns
    -------
    float
    """
    if G.n != n or G.N != N:
        raise WindowMismatch(
            f"coefficients cover W({G.n}) of an N={G.N} lattice, expected W({n}) of N={N}"
        )
    return _objective_from_stats(h, ModeStats.from_window(G), _phi_shift(n, N, exponents))


def expected_objective(h: Hyperparams, tm: TrueModel, n, N, exponents=None):
    """
    Average of the renormalized log marginal likelihood over data drawn at truth.

    Evaluated term by term: the ``phi`` constant, the normalization, the
    log-determinant sum, the noise sum (weighted by ``1/beta_star``) and the
    truth-power sum, each over W(n).
    """
    if N != tm.size:
        raise ValueError(f"truth spectrum has size {tm.size}, expected N={N}")
    if n > N:
        raise WindowTooLarge(f"window side n={n} exceeds lattice side N={N}")
    stats = ModeStats.truth(tm, n)
    logfrac, shrink = _per_mode_terms(h, stats)
    m = stats.count
    return (
        _phi_shift(n, N, exponents)
        - 0.5 * (LOG_2PI - math.log(h.beta))
        + 0.5 * float(np.sum(logfrac)) / m
        - 0.5 * float(np.sum(shrink / tm.beta_star)) / m
        - 0.5 * float(np.sum(stats.power * shrink)) / m
    )


def objective_gradient(h: Hyperparams, stats: ModeStats, beta_star=None):
    """
    Analytic partial derivatives of the objective in (alpha, beta, gamma).

    Parameters
    ----------
    h : Hyperparams
    stats : ModeStats
        Per-mode eigenvalues and power. With ``beta_star=None`` the power is
        taken as observed ``|G|**2`` (empirical objective); otherwise it is
        truth power and ``1/beta_star`` is added (expected objective).
    beta_star : float, optional

    Returns
    -------
    ndarray, shape (3,)
    """
    power = stats.power if beta_star is None else stats.power + 1.0 / beta_star
    c = h.gamma + h.alpha * stats.lam
    s = h.beta + c
    inv_s = 1.0 / s
    # d/dc and d/dbeta of ln c - ln s - P beta c / s
    d_c = 1.0 / c - inv_s - power * (h.beta * inv_s) ** 2
    d_b = -inv_s - power * (c * inv_s) ** 2
    scale = 0.5 / stats.count
    return np.array([
        scale * float(np.sum(stats.lam * d_c)),
        0.5 / h.beta + scale * float(np.sum(d_b)),
        scale * float(np.sum(d_c)),
    ])
