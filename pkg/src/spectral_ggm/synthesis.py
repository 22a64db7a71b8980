"""
Seeded sampling from the prior and the additive Gaussian noise channel.

Prior samples are drawn directly in the Fourier domain: self-conjugate
modes (DC and, for even N, the Nyquist lines) get a real Gaussian with
variance ``1/(gamma + alpha*lam)``; every other conjugate pair shares one
complex Gaussian whose real and imaginary parts each carry half of that
variance. The pixel field is then exactly real.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import model, spectral
from .model import Hyperparams

__all__ = ["RNG_ALGORITHM", "NoiseSpec", "SeededRng", "sample_prior", "degrade"]

RNG_ALGORITHM = "numpy.PCG64"


@dataclass(frozen=True)
class NoiseSpec:
    sigma: float

    def __post_init__(self):
        s = float(self.sigma)
        if not (math.isfinite(s) and s > 0.0):
            raise ValueError(f"sigma must be finite and > 0, got {s!r}")
        object.__setattr__(self, "sigma", s)

    @property
    def beta_star(self):
        return 1.0 / self.sigma ** 2

    @classmethod
    def from_beta(cls, beta):
        return cls(1.0 / math.sqrt(beta))


@dataclass(frozen=True)
class SeededRng:
    """A named generator and seed; :meth:`generator` always restarts the stream."""

    seed: int
    algorithm: str = RNG_ALGORITHM

    def __post_init__(self):
        seed = int(self.seed)
        if not 0 <= seed < 2 ** 64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        if self.algorithm != RNG_ALGORITHM:
            raise ValueError(f"unsupported RNG algorithm {self.algorithm!r}")
        object.__setattr__(self, "seed", seed)

    def generator(self):
        return np.random.Generator(np.random.PCG64(self.seed))

    def derive(self, index):
        """Independent stream for work item ``index`` (e.g. a Monte-Carlo draw)."""
        ss = np.random.SeedSequence([self.seed, int(index)])
        return SeededRng(int(ss.generate_state(1, dtype=np.uint64)[0]), self.algorithm)


def _as_generator(rng):
    if isinstance(rng, SeededRng):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    return SeededRng(rng).generator()


def sample_prior(h: Hyperparams, N, rng):
    """
    Draw an N x N field from the prior with precisions ``h.alpha``, ``h.gamma``.

    ``h.beta`` is ignored. ``rng`` is a SeededRng, an integer seed or a
    numpy Generator.
    """
    gen = _as_generator(rng)
    N = int(N)
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    var = model.prior_mode_variance(h, spectral.eigenvalue_grid(N))
    z = gen.standard_normal((2, N, N))
    k = np.arange(N)
    kk, ll = np.meshgrid(k, k, indexing="ij")
    pk, pl = (-kk) % N, (-ll) % N
    self_conj = (kk == pk) & (ll == pl)
    # canonical member of each conjugate pair: lexicographically smaller index
    canonical = (kk * N + ll) < (pk * N + pl)
    F = np.zeros((N, N), dtype=complex)
    half = np.sqrt(var / 2.0)
    F[canonical] = half[canonical] * (z[0][canonical] + 1j * z[1][canonical])
    F[pk[canonical], pl[canonical]] = np.conj(F[canonical])
    F[self_conj] = np.sqrt(var[self_conj]) * z[0][self_conj]
    # irfft2 returns an exactly real field from the Hermitian half-spectrum
    return np.fft.irfft2(F[:, : N // 2 + 1], s=(N, N), norm="ortho")


def degrade(f, noise: NoiseSpec, rng):
    """Add i.i.d. zero-mean Gaussian noise of standard deviation ``noise.sigma``."""
    f = spectral.as_field(f)
    gen = _as_generator(rng)
    return f + noise.sigma * gen.standard_normal(f.shape)
