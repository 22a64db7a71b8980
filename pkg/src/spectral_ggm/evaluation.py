"""Closed-form risk of the posterior-mean restorer and SNR reporting."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import model, spectral
from .errors import NonPositiveInput
from .model import Hyperparams, TrueModel

__all__ = ["RiskReport", "closed_form_risk", "snr_db", "variance_of"]


@dataclass(frozen=True)
class RiskReport:
    """
    Per-pixel expected squared error split into its two sources.

    ``variance_term`` is noise passed through the filter, ``bias_term`` is
    signal removed by it. ``snr_db`` is filled in only when the truth
    variance is known.
    """

    d_n: float
    variance_term: float
    bias_term: float
    snr_db: float | None = None


def closed_form_risk(h: Hyperparams, tm: TrueModel, var_truth=None) -> RiskReport:
    """
    Expected ``||f* - f_hat||**2 / N**2`` over data drawn at truth.

    Both sums run over every mode of the full N x N spectrum, whatever
    window the hyperparameters were estimated on.
    """
    N = tm.size
    gain = model.wiener_gain(h, spectral.eigenvalue_grid(N))
    m = N * N
    variance_term = float(np.sum(gain ** 2)) / (tm.beta_star * m)
    bias_term = float(np.sum(tm.truth_spectrum.power * (1.0 - gain) ** 2)) / m
    d_n = variance_term + bias_term
    snr = None if var_truth is None else snr_db(var_truth, d_n)
    return RiskReport(d_n, variance_term, bias_term, snr)


def snr_db(var_truth, d_n):
    """``10 log10(var_truth / d_n)``; both arguments must be positive."""
    if not (var_truth > 0 and d_n > 0):
        raise NonPositiveInput(f"snr_db needs positive inputs, got {var_truth!r}, {d_n!r}")
    return 10.0 * math.log10(var_truth / d_n)


def variance_of(f):
    """Population variance of a pixel field (divides by the pixel count)."""
    return float(np.var(np.asarray(f, dtype=float)))
