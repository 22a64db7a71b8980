"""
Brute-force pixel-space references for small lattices.

Nothing here uses a Fourier transform: the precision matrix is assembled
from the per-site difference sum and every quantity comes from Cholesky
factorizations of N^2 x N^2 matrices.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import linalg

from .errors import SizeLimitExceeded
from .model import Hyperparams

__all__ = ["MAX_SIZE", "difference_form", "dense_precision", "log_marginal",
           "posterior_mean_dense"]

MAX_SIZE = 16


def _check(N):
    if N > MAX_SIZE:
        raise SizeLimitExceeded(f"dense reference limited to N <= {MAX_SIZE}, got N={N}")


def difference_form(N):
    """
    Matrix Q with ``f @ Q @ f = sum_{x,y} (f[x,y]-f[x+1,y])**2 + (f[x,y]-f[x,y+1])**2``.

    Sites are flattened row-major and neighbours wrap periodically. Each
    site's two terms are added literally, so for N = 2 a pair is visited twice.
    """
    _check(N)
    Q = np.zeros((N * N, N * N))
    for x in range(N):
        for y in range(N):
            i = x * N + y
            for j in (((x + 1) % N) * N + y, x * N + (y + 1) % N):
                Q[i, i] += 1.0
                Q[j, j] += 1.0
                Q[i, j] -= 1.0
                Q[j, i] -= 1.0
    return Q


def dense_precision(N, h: Hyperparams):
    """Prior precision ``gamma*I + alpha*Q`` of the flattened field."""
    return h.gamma * np.eye(N * N) + h.alpha * difference_form(N)


def _field(g):
    g = np.asarray(g, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise ValueError(f"expected a square field, got shape {g.shape}")
    _check(g.shape[0])
    return g


def log_marginal(g, h: Hyperparams):
    """
    ``ln p(g | alpha, beta, gamma)`` with the field integrated out.

    The data covariance is ``inv(C) + I/beta`` with C the prior precision.
    """
    g = _field(g)
    N = g.shape[0]
    C = dense_precision(N, h)
    cov = linalg.cho_solve(linalg.cho_factor(C), np.eye(N * N)) + np.eye(N * N) / h.beta
    cov = 0.5 * (cov + cov.T)
    L = linalg.cholesky(cov, lower=True)
    v = linalg.solve_triangular(L, g.ravel(), lower=True)
    logdet = 2.0 * float(np.sum(np.log(np.diag(L))))
    return -0.5 * (N * N * math.log(2.0 * math.pi) + logdet + float(v @ v))


def posterior_mean_dense(g, h: Hyperparams):
    """Solve ``(beta*I + C) f = beta*g`` by Cholesky."""
    g = _field(g)
    N = g.shape[0]
    A = h.beta * np.eye(N * N) + dense_precision(N, h)
    f = linalg.cho_solve(linalg.cho_factor(A), h.beta * g.ravel())
    return f.reshape(N, N)
