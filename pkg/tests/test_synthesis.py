import numpy as np
import pytest

from spectral_ggm import model, spectral, synthesis
from spectral_ggm.model import Hyperparams


def test_same_seed_same_field():
    h = Hyperparams(1.0, 1.0, 0.01)
    a = synthesis.sample_prior(h, 16, synthesis.SeededRng(5))
    b = synthesis.sample_prior(h, 16, synthesis.SeededRng(5))
    c = synthesis.sample_prior(h, 16, synthesis.SeededRng(6))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


@pytest.mark.parametrize("N", [1, 2, 5, 8])
def test_sample_is_real_and_shaped(N):
    f = synthesis.sample_prior(Hyperparams(1.0, 1.0, 0.1), N, 3)
    assert f.shape == (N, N) and f.dtype == np.float64
    assert np.all(np.isfinite(f))


def test_mode_variances_match_prior():
    # average |F(k,l)|^2 over many draws against 1/(gamma + alpha*lam)
    h = Hyperparams(0.5, 1.0, 0.2)
    N, draws = 6, 4000
    root = synthesis.SeededRng(17)
    acc = np.zeros((N, N))
    for i in range(draws):
        acc += spectral.forward_dft(synthesis.sample_prior(h, N, root.derive(i))).power()
    ratio = (acc / draws) / model.prior_mode_variance(h, spectral.eigenvalue_grid(N))
    # self-conjugate modes are chi-square(1): relative SE sqrt(2/draws)
    assert np.max(np.abs(ratio - 1.0)) < 5 * np.sqrt(2.0 / draws)


def test_degrade_statistics():
    f = np.full((128, 128), 128.0)
    g = synthesis.degrade(f, synthesis.NoiseSpec(40.0), synthesis.SeededRng(1))
    assert abs(np.var(g) / 1600.0 - 1.0) < 0.05
    assert abs(np.mean(g) - 128.0) < 3 * 40.0 / 128


def test_tiny_sigma_is_identity(rng):
    f = rng.uniform(0, 255, (8, 8))
    g = synthesis.degrade(f, synthesis.NoiseSpec(1e-12), 0)
    np.testing.assert_allclose(g, f, atol=1e-9, rtol=0)


def test_noise_spec():
    assert synthesis.NoiseSpec(40.0).beta_star == pytest.approx(1 / 1600)
    assert synthesis.NoiseSpec.from_beta(1 / 1600).sigma == pytest.approx(40.0)
    with pytest.raises(ValueError):
        synthesis.NoiseSpec(0.0)


def test_seeded_rng_derive_and_validation():
    r = synthesis.SeededRng(3)
    assert r.derive(0) == r.derive(0)
    assert r.derive(0) != r.derive(1)
    assert r.algorithm == synthesis.RNG_ALGORITHM
    with pytest.raises(ValueError):
        synthesis.SeededRng(-1)
    with pytest.raises(ValueError):
        synthesis.SeededRng(1, algorithm="mt19937")
