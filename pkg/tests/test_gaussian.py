import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

import gaussian
import hpd
import manifold
import toeplitz
import utils
import zinterp
from errors import DegenerateFitError, NumericalError, TableRangeError, ValidationError
from gaussian import GaussianParams, ZTable
from manifold import Dataset, ManifoldId


@pytest.fixture(scope="module")
def t4_table():
    return gaussian.build_ztable(ManifoldId.toeplitz(4))


def test_euclidean_table_inverts_square():
    z = gaussian.euclidean_ztable()
    for rho in [0.01, 0.3, 1.0, 4.0]:
        assert gaussian.phi(rho, z) == pytest.approx(math.sqrt(rho), rel=1e-8)


@pytest.mark.parametrize("spec", ["toeplitz:20", "hpd:2", "block:5x1"])
def test_analytic_tables_are_log_convex(spec):
    z = gaussian.build_ztable(ManifoldId.parse(spec))
    assert z.method == "analytic"
    eta = zinterp.sigma_to_eta(z.sigma_grid)
    slopes = np.diff(z.logz_knots) / np.diff(eta)
    assert np.all(np.diff(slopes) > 0)
    assert np.all(np.diff(z.psi_prime_knots) > 0)


def test_hpd2_table_matches_closed_form():
    z = gaussian.build_ztable(ManifoldId.hpd(2))
    sigma = np.array([0.1, 0.77, 2.5])
    assert_allclose(z.logz(sigma), hpd.hpd_logZ_closed_form_h2(sigma), rtol=1e-12)


def test_interpolated_table_tracks_closed_form():
    grid = utils.default_grid()
    exact = ZTable.from_knots(
        ManifoldId.hpd(2), grid, hpd.hpd_logZ_closed_form_h2(grid), hpd.hpd_psi_prime_closed_form_h2(grid), "montecarlo"
    )
    sigma = np.geomspace(0.06, 2.9, 37)
    assert_allclose(exact.logz(sigma), hpd.hpd_logZ_closed_form_h2(sigma), rtol=1e-4, atol=1e-4)
    assert_allclose(exact.psi_prime(zinterp.sigma_to_eta(sigma)), hpd.hpd_psi_prime_closed_form_h2(sigma), rtol=3e-2)


def test_monotone_slopes_track_closed_form():
    grid = utils.default_grid()
    slopes = zinterp.monotone_slopes(grid, hpd.hpd_logZ_closed_form_h2(grid))
    exact = hpd.hpd_psi_prime_closed_form_h2(grid)
    assert np.all(np.diff(slopes) > 0)
    assert_allclose(slopes[1:-1], exact[1:-1], rtol=1e-2)
    assert_allclose(slopes[[0, -1]], exact[[0, -1]], rtol=5e-2)


def test_montecarlo_slopes_come_from_log_z():
    grid = utils.log_grid(0.3, 1.5, 16)
    z = gaussian.build_ztable(ManifoldId.hpd(2), grid, mc_samples=200_000, seed=3, method="montecarlo")
    assert z.method == "montecarlo"
    assert_allclose(z.psi_prime_knots, zinterp.monotone_slopes(grid, z.logz_knots), rtol=1e-14)
    assert_allclose(z.psi_prime_knots[1:-1], hpd.hpd_psi_prime_closed_form_h2(grid)[1:-1], rtol=0.03)
    moments = hpd.hpd_z_montecarlo_grid(2, grid, 200_000, seed=3).psi_prime
    assert_allclose(moments[1:-1], z.psi_prime_knots[1:-1], rtol=0.05)


def test_table_rejects_non_convex_knots():
    grid = np.array([0.5, 1.0, 1.5, 2.0])
    logz = np.array([0.0, 1.5, 1.6, 1.65])
    with pytest.raises(NumericalError):
        ZTable.from_knots(ManifoldId.hpd(3), grid, logz, np.array([1.0, 2.0, 3.0, 4.0]), "montecarlo")


def test_table_rejects_out_of_range_sigma(t4_table):
    with pytest.raises(TableRangeError):
        t4_table.logz(10.0)


def test_analytic_method_needs_closed_form():
    with pytest.raises(ValidationError):
        gaussian.build_ztable(ManifoldId.hpd(3), method="analytic")
    with pytest.raises(ValidationError):
        gaussian.build_ztable(ManifoldId.toeplitz(3), method="montecarlo")


@pytest.mark.parametrize("sigma", [0.07, 0.4, 1.0, 2.7])
def test_phi_inverts_psi_prime(t4_table, sigma):
    rho = float(t4_table.psi_prime(zinterp.sigma_to_eta(sigma)))
    assert gaussian.phi(rho, t4_table) == pytest.approx(sigma, rel=1e-8)


def test_phi_range_errors(t4_table):
    lo, hi = t4_table.interp.rho_range
    with pytest.raises(DegenerateFitError):
        gaussian.phi(0.0, t4_table)
    with pytest.raises(TableRangeError):
        gaussian.phi(2.0 * hi, t4_table)
    assert gaussian.phi(lo, t4_table) == pytest.approx(t4_table.sigma_grid[0])


def test_entropy_and_legendre_dual(t4_table):
    sigmas = [0.2, 0.5, 1.0, 2.0]
    values = [gaussian.entropy(s, t4_table) for s in sigmas]
    # d psi*/d eta = eta psi''(eta) < 0
    assert np.all(np.diff(values) < 0)
    for s, h in zip(sigmas, values):
        eta = float(zinterp.sigma_to_eta(s))
        rho = float(t4_table.psi_prime(eta))
        assert h == pytest.approx(eta * rho - float(t4_table.psi(eta)), rel=1e-12)
        assert gaussian.legendre_dual(rho, t4_table) == pytest.approx(h, rel=1e-7, abs=1e-7)


@pytest.mark.parametrize("sigma", [0.1, 1.0, 2.5])
def test_euclidean_entropy_is_legendre_dual(sigma):
    z = gaussian.euclidean_ztable()
    assert gaussian.entropy(sigma, z) == pytest.approx(-0.5 - math.log(sigma), abs=1e-10)


def test_shifted_table_keeps_derivatives(t4_table):
    shifted = t4_table.shifted(3.5)
    assert float(shifted.logz(0.8)) == pytest.approx(float(t4_table.logz(0.8)) + 3.5)
    assert gaussian.phi(1.0, shifted) == pytest.approx(gaussian.phi(1.0, t4_table))


def test_log_pdf_peaks_at_centre(rng, random_toeplitz, t4_table):
    m = ManifoldId.toeplitz(4)
    centre = manifold.ManifoldPoint.create(m, random_toeplitz(4, rng))
    p = GaussianParams(centre, 0.5)
    data = Dataset.from_points([manifold.ManifoldPoint.create(m, random_toeplitz(4, rng)) for _ in range(5)])
    many = gaussian.log_pdf_many(data, p, t4_table)
    assert_allclose(many, [gaussian.log_pdf(x, p, t4_table) for x in data])
    assert np.all(many < gaussian.log_pdf(centre, p, t4_table))
    assert gaussian.log_likelihood(data, p, t4_table) == pytest.approx(float(np.sum(many)))


def test_log_pdf_rejects_other_table(rng, random_point):
    x = random_point(ManifoldId.hpd(2), rng)
    with pytest.raises(ValidationError):
        gaussian.log_pdf(x, GaussianParams(x, 1.0), gaussian.euclidean_ztable())


def test_params_validation():
    with pytest.raises(ValidationError):
        GaussianParams(manifold.identity_point(ManifoldId.hpd(2)), 0.0)


@pytest.mark.parametrize("spec", ["hpd:2", "toeplitz:3", "block:2x2"])
def test_sample_zero_count_is_empty(spec):
    m = ManifoldId.parse(spec)
    data = gaussian.sample(GaussianParams(manifold.identity_point(m), 0.5), 0, seed=1)
    assert len(data) == 0
    assert data.manifold == m


def test_sample_is_reproducible():
    p = GaussianParams(manifold.identity_point(ManifoldId.hpd(3)), 0.4)
    a = gaussian.sample(p, 50, seed=8)
    b = gaussian.sample(p, 50, seed=8)
    np.testing.assert_array_equal(a.payload, b.payload)


def test_mle_recovers_parameters(rng, random_toeplitz, t4_table):
    m = ManifoldId.toeplitz(4)
    centre = manifold.ManifoldPoint.create(m, random_toeplitz(4, rng, radius=0.5))
    data = gaussian.sample(GaussianParams(centre, 0.5), 2000, seed=rng)
    report = gaussian.mle_fit(data, t4_table)
    assert manifold.distance(report.params.center, centre) < 0.1
    assert report.params.sigma == pytest.approx(0.5, abs=0.05)
    assert report.gradient_norm < 1e-9
    assert report.eta_solver_residual < 1e-9
    assert report.dispersion == pytest.approx(float(toeplitz.toeplitz_psi_prime(4, report.params.sigma)), rel=1e-8)


def test_mle_on_identical_points_is_degenerate(t4_table):
    x = manifold.identity_point(ManifoldId.toeplitz(4))
    with pytest.raises(DegenerateFitError):
        gaussian.mle_fit(Dataset.from_points([x, x, x]), t4_table)


def test_mle_needs_two_points(t4_table):
    with pytest.raises(ValidationError):
        gaussian.mle_fit(Dataset.from_points([manifold.identity_point(ManifoldId.toeplitz(4))]), t4_table)


@pytest.mark.parametrize("sigma", [0.3, 0.8])
def test_hpd_sampler_matches_table(sigma):
    z = gaussian.build_ztable(ManifoldId.hpd(2))
    data = gaussian.sample(GaussianParams(manifold.identity_point(ManifoldId.hpd(2)), sigma), 20000, seed=6)
    d2 = manifold.distances2_to(data, manifold.identity_point(ManifoldId.hpd(2)))
    assert np.mean(d2) == pytest.approx(float(z.psi_prime(zinterp.sigma_to_eta(sigma))), rel=0.05)


@pytest.mark.slow
def test_montecarlo_hpd3_table():
    z = gaussian.build_ztable(ManifoldId.hpd(3), utils.log_grid(0.3, 1.5, 16), mc_samples=100_000, seed=4)
    assert z.method == "montecarlo"
    assert np.all(z.stderr < 0.1)
    data = gaussian.sample(GaussianParams(manifold.identity_point(ManifoldId.hpd(3)), 0.8), 20000, seed=5)
    d2 = manifold.distances2_to(data, manifold.identity_point(ManifoldId.hpd(3)))
    assert np.mean(d2) == pytest.approx(float(z.psi_prime(zinterp.sigma_to_eta(0.8))), rel=0.05)


@pytest.mark.slow
def test_composite_block_table():
    grid = utils.log_grid(0.1, 2.0, 20)
    z = gaussian.build_ztable(ManifoldId.block(3, 2), grid, mc_samples=100_000, seed=2)
    assert z.method == "composite"
    assert np.all(np.diff(z.psi_prime_knots) > 0)
    p = GaussianParams(manifold.identity_point(ManifoldId.block(3, 2)), 0.5)
    data = gaussian.sample(p, 4000, seed=3)
    report = gaussian.mle_fit(data, z)
    assert report.params.sigma == pytest.approx(0.5, abs=0.05)


def _convex_table(m: ManifoldId) -> ZTable:
    if m.kind.value == "toeplitz" or (m.kind.value == "hpd" and m.n <= 2) or (m.kind.value == "block" and m.N == 1):
        return gaussian.build_ztable(m)
    # Z cancels under an isometry, so any log-convex curve stands in for the Monte Carlo one.
    grid = utils.default_grid()
    logz, slopes = toeplitz.toeplitz_logZ(3, grid), toeplitz.toeplitz_psi_prime(3, grid)
    return ZTable.from_knots(m, grid, logz, slopes, "montecarlo")


@pytest.mark.parametrize("spec", ["hpd:2", "hpd:3", "toeplitz:4", "block:2x2", "block:3x1"])
def test_log_pdf_is_invariant_under_isometries(spec, rng, random_point):
    m = ManifoldId.parse(spec)
    z = _convex_table(m)
    for _ in range(20):
        x, centre = random_point(m, rng), random_point(m, rng)
        g = manifold.random_group_element(m, rng)
        before = gaussian.log_pdf(x, GaussianParams(centre, 0.5), z)
        after = gaussian.log_pdf(manifold.group_action(g, x), GaussianParams(manifold.group_action(g, centre), 0.5), z)
        assert after == pytest.approx(before, rel=1e-8, abs=1e-7)
