import math

import numpy as np
import pytest

from genphase import (ConfigurationError, LinkModel, MeasurementSet,
                      SpectralMatrix, build_spectral_matrix, evaluate,
                      initial_vector, linear_subspace_prior, projected_power,
                      sample_measurements, shifted_matrix)

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


def _manual_set(sensing, y):
    sensing = np.asarray(sensing, dtype=float)
    y = np.asarray(y, dtype=float)
    n = sensing.shape[1]
    x = np.zeros(n)
    x[0] = 1.0
    return MeasurementSet(n=n, m=sensing.shape[0], signal=x, sensing=sensing,
                          observations=y, seed=0, link=LinkModel("linear"))


def test_build_all_zero_observations():
    data = _manual_set(np.random.default_rng(0).standard_normal((5, 3)), np.zeros(5))
    spec = build_spectral_matrix(data)
    assert np.array_equal(spec.v, np.zeros((3, 3)))
    assert spec.ybar == 0.0


def test_build_single_measurement_formula():
    # m=1, a=e1, y=2: shifted = 2 e1 e1^T, ybar=2, V = diag(0, -2)
    data = _manual_set([[1.0, 0.0]], [2.0])
    spec = build_spectral_matrix(data)
    assert np.array_equal(spec.v, np.diag([0.0, -2.0]))
    assert np.array_equal(spec.diag_shifted, np.array([2.0, 0.0]))
    assert spec.ybar == 2.0


def test_matrix_exactly_symmetric():
    x = np.zeros(8)
    x[0] = 1.0
    data = sample_measurements(LinkModel("abs-noise-out", 0.1), x, 500, seed=1)
    spec = build_spectral_matrix(data)
    assert np.array_equal(spec.v, spec.v.T)


def test_shifted_matrix_consistency():
    x = np.zeros(6)
    x[0] = 1.0
    data = sample_measurements(LinkModel("square-noise", 0.2), x, 300, seed=2)
    spec = build_spectral_matrix(data)
    full = shifted_matrix(spec)
    assert np.allclose(np.diag(full), spec.diag_shifted, atol=1e-12)
    assert np.allclose(full - spec.ybar * np.eye(6), spec.v, atol=1e-12)


def test_spectral_concentration_single_seed():
    # ||V - nu x x^T||_op small at m = 1e5, n = 10, abs link (nu = sqrt(2/pi))
    x = np.zeros(10)
    x[0] = 1.0
    data = sample_measurements(LinkModel("abs-noise-out", 0.0), x, 10**5, seed=7)
    spec = build_spectral_matrix(data)
    dev = np.linalg.norm(spec.v - SQRT_2_OVER_PI * np.outer(x, x), 2)
    assert dev <= 0.05


def test_initial_vector_argmax_column():
    shifted = np.array([[1.0, 0.5], [0.5, 3.0]])
    spec = SpectralMatrix(v=shifted - np.eye(2), m_used=1,
                          diag_shifted=np.diag(shifted).copy(), ybar=1.0)
    w0 = initial_vector(spec, shifted)
    expect = shifted[:, 1] / np.linalg.norm(shifted[:, 1])
    assert np.allclose(w0, expect, atol=1e-15)


def test_initial_vector_tie_breaks_low_index():
    shifted = np.array([[2.0, 0.0, 0.1], [0.0, 2.0, 0.0], [0.1, 0.0, 1.0]])
    spec = SpectralMatrix(v=shifted, m_used=1, diag_shifted=np.diag(shifted).copy(),
                          ybar=0.0)
    w0 = initial_vector(spec, shifted)
    expect = shifted[:, 0] / np.linalg.norm(shifted[:, 0])
    assert np.array_equal(w0, expect)


def test_initial_vector_zero_column_fallback():
    shifted = np.zeros((3, 3))
    spec = SpectralMatrix(v=shifted, m_used=1, diag_shifted=np.zeros(3), ybar=0.0)
    w0 = initial_vector(spec, shifted)
    assert np.array_equal(w0, np.array([1.0, 0.0, 0.0]))


def test_initial_vector_mean_correlation():
    # with x = e1 the top shifted-diagonal entry marks the signal coordinate
    x = np.zeros(20)
    x[0] = 1.0
    link = LinkModel("abs-noise-out", 0.0)
    corr = []
    for seed in range(20):
        data = sample_measurements(link, x, 5000, seed=100 + seed)
        spec = build_spectral_matrix(data)
        corr.append(x @ initial_vector(spec, shifted_matrix(spec)))
    assert np.mean(corr) >= 0.5


def _range_signal(prior, latent_seed=0):
    z = np.random.default_rng(latent_seed).standard_normal(prior.k)
    x = evaluate(prior, z)
    if x[int(np.argmax(np.abs(x)))] < 0:
        x = -x
    return x


def test_projected_power_rank_one_one_step():
    # exact rank-one V = nu x x^T with x in the range: one projected power
    # iteration from any positively-correlated start lands on x
    prior = linear_subspace_prior(5, 30, seed=1)
    x = _range_signal(prior, latent_seed=3)
    v = 0.8 * np.outer(x, x)
    spec = SpectralMatrix(v=v, m_used=1, diag_shifted=np.diag(v).copy(), ybar=0.0)
    w0 = x + 0.3 * np.random.default_rng(4).standard_normal(30)
    assert x @ w0 > 0
    states = projected_power(spec, prior, w0, 1, truth=x)
    assert np.linalg.norm(states[-1].iterate - x) <= 1e-9


def test_projected_power_identity_fixed_point():
    prior = linear_subspace_prior(5, 30, seed=1)
    x = _range_signal(prior, latent_seed=5)
    spec = SpectralMatrix(v=np.eye(30), m_used=1, diag_shifted=np.ones(30), ybar=0.0)
    states = projected_power(spec, prior, x, 3)
    for s in states:
        assert np.allclose(s.iterate, x, atol=1e-9)


def test_projected_power_trajectory_contract():
    prior = linear_subspace_prior(5, 100, seed=2)
    x = _range_signal(prior, latent_seed=1)
    data = sample_measurements(LinkModel("abs-noise-out", 0.0), x, 1000, seed=11)
    spec = build_spectral_matrix(data)
    w0 = initial_vector(spec, shifted_matrix(spec))
    states = projected_power(spec, prior, w0, 20, truth=x)
    assert len(states) == 21
    assert [s.t for s in states] == list(range(21))
    for s in states:
        assert np.linalg.norm(s.iterate) == pytest.approx(1.0, abs=1e-9)
        assert s.error == pytest.approx(np.linalg.norm(s.iterate - x), abs=1e-12)


def test_projected_power_determinism():
    prior = linear_subspace_prior(5, 50, seed=2)
    x = _range_signal(prior, latent_seed=2)
    data = sample_measurements(LinkModel("square-sin", 0.1), x, 500, seed=12)
    spec = build_spectral_matrix(data)
    w0 = initial_vector(spec, shifted_matrix(spec))
    a = projected_power(spec, prior, w0, 10, seed=3, truth=x)
    b = projected_power(spec, prior, w0, 10, seed=3, truth=x)
    for sa, sb in zip(a, b):
        assert np.array_equal(sa.iterate, sb.iterate)


def test_projected_power_rejects_zero_iterations():
    prior = linear_subspace_prior(5, 50, seed=2)
    spec = SpectralMatrix(v=np.eye(50), m_used=1, diag_shifted=np.ones(50), ybar=0.0)
    with pytest.raises(ConfigurationError):
        projected_power(spec, prior, np.ones(50), 0)


def test_frobenius_residual_decreases_with_m():
    # median over 10 seeds of ||V - nu x x^T||_F drops as m grows
    x = np.zeros(10)
    x[0] = 1.0
    link = LinkModel("abs-noise-out", 0.0)
    target = SQRT_2_OVER_PI * np.outer(x, x)
    medians = []
    for m in (1000, 10000, 100000):
        devs = []
        for seed in range(10):
            data = sample_measurements(link, x, m, seed=300 + seed)
            spec = build_spectral_matrix(data)
            devs.append(np.linalg.norm(spec.v - target))
        medians.append(np.median(devs))
    assert medians[0] > medians[1] > medians[2]


def test_projected_power_recovers_subspace_signal():
    # desk config with best-of-sign start: most seeds reach error <= 0.3
    prior = linear_subspace_prior(5, 100, seed=2)
    link = LinkModel("abs-noise-out", 0.0)
    hits = 0
    for seed in range(10):
        x = _range_signal(prior, latent_seed=seed)
        data = sample_measurements(link, x, 2000, seed=400 + seed)
        spec = build_spectral_matrix(data)
        w0 = initial_vector(spec, shifted_matrix(spec))
        best = min(projected_power(spec, prior, s * w0, 20, truth=x)[-1].error
                   for s in (1.0, -1.0))
        if best <= 0.3:
            hits += 1
    assert hits >= 8


def test_correlation_rarely_collapses_once_gained():
    # soft invariant: once |corr| >= 0.2 it does not drop below 0.1 next step
    prior = linear_subspace_prior(5, 100, seed=2)
    link = LinkModel("abs-noise-out", 0.0)
    ok = 0
    for seed in range(10):
        x = _range_signal(prior, latent_seed=seed)
        data = sample_measurements(link, x, 2000, seed=500 + seed)
        spec = build_spectral_matrix(data)
        w0 = initial_vector(spec, shifted_matrix(spec))
        states = projected_power(spec, prior, w0, 20, truth=x)
        corrs = [abs(s.correlation) for s in states]
        good = all(corrs[t + 1] >= 0.1 for t in range(len(corrs) - 1)
                   if corrs[t] >= 0.2)
        ok += good
    assert ok >= 9
