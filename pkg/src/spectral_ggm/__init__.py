"""
Spectral Gaussian graphical models on the periodic square lattice.

Hyperparameters (alpha, beta, gamma) are estimated by maximizing the
marginal likelihood restricted to a band-limited frequency window W(n),
images are restored by the posterior mean, and the expected per-pixel risk
of that pipeline is available in closed form.
"""

__version__ = "0.1.0"

from .errors import (DegenerateData, ImageFormatError, InvalidConfig, NonHermitianInput,
                     NonPositiveInput, NonSquareImage, NotConverged, SizeLimitExceeded,
                     WindowMismatch, WindowTooLarge)
from .estimator import EstimationResult, OptimizerConfig, estimate_empirical, estimate_expected
from .evaluation import RiskReport, closed_form_risk, snr_db, variance_of
from .model import (Hyperparams, ModeStats, PowerSpectrum, ScaleExponents, TrueModel,
                    empirical_objective, expected_objective, marginal_mode_variance,
                    objective_gradient, prior_mode_variance, wiener_gain)
from .restoration import RestorationOutput, posterior_mean
from .spectral import (FrequencyWindow, SpectralField, WindowedSpectrum, coarse_grain,
                       forward_dft, inverse_dft, lattice_eigenvalue, select_window, window)
from .sweep import SweepRecord, run_sweep
from .synthesis import NoiseSpec, SeededRng, degrade, sample_prior

__all__ = [
    "DegenerateData", "ImageFormatError", "InvalidConfig", "NonHermitianInput",
    "NonPositiveInput", "NonSquareImage", "NotConverged", "SizeLimitExceeded",
    "WindowMismatch", "WindowTooLarge",
    "EstimationResult", "OptimizerConfig", "estimate_empirical", "estimate_expected",
    "RiskReport", "closed_form_risk", "snr_db", "variance_of",
    "Hyperparams", "ModeStats", "PowerSpectrum", "ScaleExponents", "TrueModel",
    "empirical_objective", "expected_objective", "marginal_mode_variance",
    "objective_gradient", "prior_mode_variance", "wiener_gain",
    "RestorationOutput", "posterior_mean",
    "FrequencyWindow", "SpectralField", "WindowedSpectrum", "coarse_grain", "forward_dft",
    "inverse_dft", "lattice_eigenvalue", "select_window", "window",
    "SweepRecord", "run_sweep",
    "NoiseSpec", "SeededRng", "degrade", "sample_prior",
]
