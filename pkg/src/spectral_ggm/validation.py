"""
Self-checks run by ``spectral-ggm validate``.

Each suite pairs a spectral fast path with an independent route (dense
linear algebra, finite differences, direct DFT sums or Monte-Carlo) and
returns :class:`Check` rows. Functions are looked up through their modules
at call time so a patched implementation is what gets checked.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass

import numpy as np

from . import dense, estimator, evaluation, model, restoration, spectral, synthesis
from .model import Hyperparams, ModeStats, TrueModel

__all__ = ["Check", "SUITES", "run_all"]


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    passed: bool
    detail: str


def _rel(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b)) / max(float(np.max(np.abs(b))), 1e-300))


def random_hyperparams(rng):
    return Hyperparams(*np.exp(rng.uniform(np.log(1e-2), np.log(1e1), size=3)))


def direct_dft(f):
    """O(N^4) unitary DFT by explicit summation."""
    N = f.shape[0]
    x = np.arange(N)
    E = np.exp(-2j * np.pi * np.outer(x, x) / N)
    out = np.empty((N, N), dtype=complex)
    for k in range(N):
        for l in range(N):
            out[k, l] = np.sum(f * np.outer(E[k], E[l])) / N
    return out


def suite_parseval(seed=0):
    rng = np.random.default_rng(seed)
    checks = []
    f = rng.standard_normal((4, 4))
    F = spectral.forward_dft(f)
    err = _rel(F.coeffs, direct_dft(f))
    checks.append(Check("parseval", "fft matches direct DFT sum (4x4)", err <= 1e-12, f"rel err {err:.2e}"))
    par = abs(float(np.sum(F.power())) - float(np.sum(f * f))) / float(np.sum(f * f))
    checks.append(Check("parseval", "Parseval identity (4x4)", par <= 1e-12, f"rel err {par:.2e}"))
    g = rng.standard_normal((8, 8))
    back = spectral.inverse_dft(spectral.forward_dft(g))
    rt = float(np.max(np.abs(back - g)))
    checks.append(Check("parseval", "inverse(forward(f)) == f (8x8)", rt <= 1e-10, f"max abs err {rt:.2e}"))
    return checks


def suite_dense_oracle(seed=1, instances=20, N=8):
    rng = np.random.default_rng(seed)
    worst_ml = worst_pm = 0.0
    for _ in range(instances):
        h = random_hyperparams(rng)
        g = rng.normal(scale=3.0, size=(N, N)) + rng.normal()
        G = spectral.select_window(spectral.forward_dft(g), N)
        spec_ml = model.empirical_objective(h, G, N, N) * N * N
        worst_ml = max(worst_ml, abs(spec_ml - dense.log_marginal(g, h)) / abs(dense.log_marginal(g, h)))
        worst_pm = max(worst_pm, _rel(restoration.posterior_mean(g, h).restored,
                                      dense.posterior_mean_dense(g, h)))
    worst_eig = 0.0
    for n in range(1, N + 1):
        h = random_hyperparams(rng)
        C = dense.dense_precision(n, h)
        x = np.arange(n)
        E = np.exp(-2j * np.pi * np.outer(x, x) / n) / math.sqrt(n)
        U = np.kron(E, E)
        D = U @ C @ U.conj().T
        lam = spectral.eigenvalue_grid(n).ravel()
        target = h.gamma + h.alpha * lam
        worst_eig = max(worst_eig, float(np.max(np.abs(D - np.diag(target)))))
    return [
        Check("dense_oracle", f"log marginal likelihood vs dense ({instances} x {N}x{N})",
              worst_ml <= 1e-8, f"worst rel err {worst_ml:.2e}"),
        Check("dense_oracle", f"posterior mean vs dense solve ({instances} x {N}x{N})",
              worst_pm <= 1e-8, f"worst rel err {worst_pm:.2e}"),
        Check("dense_oracle", "DFT diagonalizes the prior precision (N<=8)",
              worst_eig <= 1e-10, f"worst abs err {worst_eig:.2e}"),
    ]


def finite_difference_gradient(h, stats, beta_star=None, rel_step=1e-6):
    """Central differences of the objective in (alpha, beta, gamma)."""
    x = h.as_array()
    out = np.empty(3)
    shift_stats = stats if beta_star is None else ModeStats(stats.lam, stats.power + 1.0 / beta_star)
    for i in range(3):
        step = rel_step * x[i]
        up, dn = x.copy(), x.copy()
        up[i] += step
        dn[i] -= step
        out[i] = (model._objective_from_stats(Hyperparams(*up), shift_stats)
                  - model._objective_from_stats(Hyperparams(*dn), shift_stats)) / (2 * step)
    return out


def suite_gradient(seed=2, instances=50):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(instances):
        h = random_hyperparams(rng)
        n = int(rng.integers(2, 12))
        N = int(rng.integers(n, 24))
        ks = spectral.window_labels(n)
        lam = spectral.lattice_eigenvalue(ks[:, None], ks[None, :], N)
        power = rng.exponential(scale=10.0, size=lam.shape)
        stats = ModeStats(lam, power)
        beta_star = None if i % 2 == 0 else float(np.exp(rng.uniform(-3, 2)))
        an = model.objective_gradient(h, stats, beta_star)
        fd = finite_difference_gradient(h, stats, beta_star)
        err = float(np.max(np.abs(an - fd) / np.maximum(np.abs(fd), 1e-3 * np.max(np.abs(fd)))))
        worst = max(worst, err)
    return [Check("gradient", f"analytic vs central differences ({instances} instances)",
                  worst <= 1e-5, f"worst rel err {worst:.2e}")]


def suite_expectation_identity(seed=3, instances=20):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(instances):
        N = int(rng.integers(2, 20))
        n = int(rng.integers(1, N + 1))
        f = rng.normal(scale=2.0, size=(N, N))
        beta_star = float(np.exp(rng.uniform(-2, 2)))
        h = random_hyperparams(rng)
        tm = TrueModel.from_field(f, beta_star)
        exps = model.ScaleExponents(psi=float(rng.normal()), phi=float(rng.normal()))
        F = spectral.forward_dft(f)
        G = spectral.select_window(F, n)
        # replace |G|^2 by |F*|^2 + 1/beta_star, keeping each mode's phase
        mag = np.sqrt(G.power() + 1.0 / beta_star)
        phase = np.exp(1j * np.angle(G.coeffs))
        Gx = spectral.WindowedSpectrum(mag * phase, N)
        a = model.empirical_objective(h, Gx, n, N, exps)
        b = model.expected_objective(h, tm, n, N, exps)
        worst = max(worst, abs(a - b))
    return [Check("expectation", f"empirical at expected power == expected objective ({instances})",
                  worst <= 1e-12, f"worst abs diff {worst:.2e}")]


def monte_carlo_risk(h, f, sigma, draws, seed):
    """Mean and standard error of ||f - f_hat||^2 / N^2 over seeded noise draws."""
    root = synthesis.SeededRng(seed)
    noise = synthesis.NoiseSpec(sigma)
    errs = np.empty(draws)
    for i in range(draws):
        g = synthesis.degrade(f, noise, root.derive(i))
        fhat = restoration.posterior_mean(g, h).restored
        errs[i] = float(np.mean((fhat - f) ** 2))
    return float(errs.mean()), float(errs.std(ddof=1) / math.sqrt(draws))


def monte_carlo_objective(h, f, sigma, n, draws, seed):
    """Mean and standard error of the empirical objective over seeded data draws."""
    root = synthesis.SeededRng(seed)
    noise = synthesis.NoiseSpec(sigma)
    N = f.shape[0]
    vals = np.empty(draws)
    for i in range(draws):
        g = synthesis.degrade(f, noise, root.derive(i))
        vals[i] = model.empirical_objective(h, spectral.select_window(spectral.forward_dft(g), n), n, N)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(draws))


def suite_monte_carlo(seed=4):
    checks = []
    h_true = Hyperparams(0.5, 1.0, 0.05)
    f = synthesis.sample_prior(h_true, 64, synthesis.SeededRng(seed))
    sigma = 1.5
    tm = TrueModel.from_field(f, 1.0 / sigma ** 2)
    h = Hyperparams(0.8, 0.4, 0.02)
    d_n = evaluation.closed_form_risk(h, tm).d_n
    mean, se = monte_carlo_risk(h, f, sigma, 200, seed + 1)
    z = abs(mean - d_n) / se
    checks.append(Check("monte_carlo", "closed-form risk vs MC MSE (N=64, 200 draws)",
                        z <= 3.0, f"D_n={d_n:.5g} MC={mean:.5g}+-{se:.2g} ({z:.2f} SE)"))
    f16 = f[:16, :16]
    tm16 = TrueModel.from_field(f16, 1.0 / sigma ** 2)
    n = 12
    target = model.expected_objective(h, tm16, n, 16)
    mean, se = monte_carlo_objective(h, f16, sigma, n, 500, seed + 2)
    z = abs(mean - target) / se
    checks.append(Check("monte_carlo", "expected objective vs MC mean (N=16, 500 draws)",
                        z <= 3.0, f"L_n={target:.6g} MC={mean:.6g}+-{se:.2g} ({z:.2f} SE)"))
    return checks


def suite_estimator(seed=5):
    """Estimator against a brute-force log-spaced grid on a 16x16 problem."""
    h_true = Hyperparams(2.0, 0.5, 0.05)
    f = synthesis.sample_prior(h_true, 16, synthesis.SeededRng(seed))
    g = synthesis.degrade(f, synthesis.NoiseSpec.from_beta(h_true.beta), synthesis.SeededRng(seed + 1))
    G = spectral.select_window(spectral.forward_dft(g), 16)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = estimator.estimate_empirical(G, 16, 16)
    best = grid_search(ModeStats.from_window(G))[1]
    ok = res.objective_value >= best - 1e-6
    return [Check("estimator", "optimum >= best of 20^3 log grid (N=16)", ok,
                  f"optimizer {res.objective_value:.8g} grid {best:.8g}")]


def grid_search(stats, lo=1e-6, hi=1e3, points=20):
    """Best (Hyperparams, value) over a log-spaced grid, vectorized over modes."""
    axis = np.geomspace(lo, hi, points)
    A, B, C = np.meshgrid(axis, axis, axis, indexing="ij")
    a, b, g = A.ravel()[:, None], B.ravel()[:, None], C.ravel()[:, None]
    c = g + a * stats.lam[None, :]
    per_mode = -np.log1p(b / c) - stats.power[None, :] * b * c / (b + c)
    vals = -0.5 * (model.LOG_2PI - np.log(b[:, 0])) + 0.5 * per_mode.mean(axis=1)
    i = int(np.argmax(vals))
    return Hyperparams(a[i, 0], b[i, 0], g[i, 0]), float(vals[i])


SUITES = {
    "parseval": suite_parseval,
    "dense_oracle": suite_dense_oracle,
    "gradient": suite_gradient,
    "expectation": suite_expectation_identity,
    "monte_carlo": suite_monte_carlo,
    "estimator": suite_estimator,
}


def run_all(names=None):
    """Run the named suites (all by default); returns (checks, seconds)."""
    t0 = time.perf_counter()
    checks = []
    for name in names or SUITES:
        try:
            checks.extend(SUITES[name]())
        except Exception as exc:  # a crash is a failed suite, not a crashed report
            checks.append(Check(name, "suite raised", False, f"{type(exc).__name__}: {exc}"))
    return checks, time.perf_counter() - t0
