import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

import hpd
import sampling
from errors import ValidationError
from sampling import LogWeightSums, MhConfig, PolarIntegrand


def _flat(dim):
    return PolarIntegrand(
        dim=dim,
        log_g=lambda r: np.zeros(r.shape[0]),
        shift=np.zeros(dim),
        group_order=1,
        in_chamber=lambda r: np.ones(r.shape[0], dtype=bool),
    )


def test_metropolis_standard_normal():
    draws, diagnostics = sampling.metropolis(lambda x: -0.5 * np.sum(x * x, axis=1), 2, 20000, 1.0, seed=3)
    assert draws.shape == (20000, 2)
    assert_allclose(draws.mean(axis=0), 0.0, atol=0.05)
    assert_allclose(draws.var(axis=0), 1.0, atol=0.08)
    assert 0.1 < diagnostics.acceptance_rate < 0.9
    assert not diagnostics.flagged


def test_metropolis_zero_count():
    draws, diagnostics = sampling.metropolis(lambda x: np.zeros(x.shape[0]), 3, 0, 1.0, seed=1)
    assert draws.shape == (0, 3)
    assert diagnostics.draws == 0


def test_mh_config_validation():
    with pytest.raises(ValidationError):
        MhConfig(thinning=0)


def test_log_weight_sums_combine(rng):
    log_w = rng.normal(size=1000)
    moment = rng.normal(size=1000)
    whole = LogWeightSums.from_log_weights(log_w, moment)
    split = LogWeightSums.from_log_weights(log_w[:300], moment[:300]).combine(
        LogWeightSums.from_log_weights(log_w[300:], moment[300:])
    )
    assert split.count == whole.count
    assert_allclose(split.log_sum, whole.log_sum, rtol=1e-13)
    assert_allclose(split.log_sum_moment, whole.log_sum_moment, rtol=1e-13)


def test_polar_logz_gaussian_is_exact():
    sigmas = np.array([0.5, 1.0, 2.0])
    estimate = sampling.polar_logz(_flat(3), sigmas, 5000, seed=1, proposal="centred")
    assert_allclose(estimate.logz, 1.5 * np.log(2.0 * math.pi * sigmas**2), rtol=1e-12)
    assert_allclose(estimate.stderr, 0.0, atol=1e-6)
    assert_allclose(estimate.psi_prime, 3.0 * sigmas**2, rtol=0.05)


def test_polar_logz_independent_of_threads():
    integrand = hpd.hpd_polar_integrand(3)
    sigmas = np.array([0.4, 1.2])
    one = sampling.polar_logz(integrand, sigmas, 30000, seed=11, threads=1, chunk=7000)
    three = sampling.polar_logz(integrand, sigmas, 30000, seed=11, threads=3, chunk=7000)
    np.testing.assert_array_equal(one.logz, three.logz)
    np.testing.assert_array_equal(one.psi_prime, three.psi_prime)


def test_polar_logz_hpd2_matches_closed_form():
    sigmas = np.array([0.3, 0.7, 1.5])
    estimate = sampling.polar_logz(hpd.hpd_polar_integrand(2), sigmas, 200_000, seed=5)
    relative = np.abs(np.expm1(estimate.logz - hpd.hpd_logZ_closed_form_h2(sigmas)))
    assert np.all(relative < 0.02)
    assert_allclose(estimate.psi_prime, hpd.hpd_psi_prime_closed_form_h2(sigmas), rtol=0.03)


@pytest.mark.slow
def test_polar_logz_hpd2_million_draws():
    sigmas = np.array([0.1, 0.5, 1.0, 2.0, 3.0])
    estimate = sampling.polar_logz(hpd.hpd_polar_integrand(2), sigmas, 1_000_000, seed=9)
    relative = np.abs(np.expm1(estimate.logz - hpd.hpd_logZ_closed_form_h2(sigmas)))
    assert np.all(relative < 0.02)


def test_polar_logz_rejects_bad_input():
    with pytest.raises(ValidationError):
        sampling.polar_logz(_flat(1), np.array([0.0, 1.0]), 100)
    with pytest.raises(ValidationError):
        sampling.polar_logz(_flat(1), np.array([1.0]), 100, proposal="sideways")
