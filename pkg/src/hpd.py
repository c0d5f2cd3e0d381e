"""hpd.py - Hermitian positive definite matrices: geometry, polar density and Gaussian sampling.

Copyright (C) 2026 rsgauss developers

Points are complex covariance matrices of shape (..., n, n). Tangent vectors at X are stored whitened,
W = log(X^{-1/2} Y X^{-1/2}), so the Riemannian norm is the Frobenius norm of W.
"""
# -------------------------------------------------------------------------
# This program is free software; you can redistribute it and/or modify
# it under the terms of the GNU General Public License version 3 as published
# by the Free Software Foundation.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program; if not, write to the Free Software
# -------------------------------------------------------------------------

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

import constants
import matfun
import sampling
import utils
from errors import ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HpdPolar:
    """Spectral decomposition Y = U diag(e^r) U^H with r sorted descending."""

    r: np.ndarray
    u: np.ndarray

    def __post_init__(self) -> None:
        n = self.r.shape[-1]
        residual = np.max(np.abs(matfun.dagger(self.u) @ self.u - np.eye(n)), initial=0.0)
        if residual > constants.UNITARY_TOL * max(1, n):
            raise ValidationError(f"Polar factor is not unitary (residual {residual:.2e})")


def check_hpd(y: np.ndarray) -> np.ndarray:
    y = matfun.check_hermitian(np.asarray(y, dtype=complex))
    if np.any(np.linalg.eigvalsh(matfun.hermitian_part(y)) <= 0):
        raise ValidationError("Matrix is not positive definite")
    return y


def _check_pair(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if x.shape[-2:] != y.shape[-2:]:
        raise ValidationError(f"HPD dimension mismatch: {x.shape[-2:]} vs {y.shape[-2:]}")
    return x, y


def _cholesky(x: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(matfun.hermitian_part(x))
    except np.linalg.LinAlgError as e:
        raise ValidationError("Matrix is not positive definite") from e


def whiten(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """L^{-1} Y L^{-H} with X = L L^H; same spectrum as X^{-1/2} Y X^{-1/2}."""
    x, y = _check_pair(x, y)
    low = _cholesky(x)
    left = np.linalg.solve(low, y)
    return matfun.hermitian_part(np.linalg.solve(low, matfun.dagger(left)))


def hpd_log_eigenvalues(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    w = np.linalg.eigvalsh(whiten(x, y))
    if np.any(w <= 0):
        raise ValidationError("Matrix is not positive definite")
    return np.log(w)


def hpd_distance(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Affine-invariant distance sqrt(tr log^2(X^{-1/2} Y X^{-1/2}))."""
    return np.sqrt(np.sum(hpd_log_eigenvalues(x, y) ** 2, axis=-1))


def hpd_distance2(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.sum(hpd_log_eigenvalues(x, y) ** 2, axis=-1)


def hpd_log(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Whitened log map W = log(X^{-1/2} Y X^{-1/2})."""
    x, y = _check_pair(x, y)
    s = matfun.hermitian_invsqrt(x, check=False)
    return matfun.hermitian_log(s @ y @ s, check=False)


def hpd_exp(x: np.ndarray, w: np.ndarray) -> np.ndarray:
    s = matfun.hermitian_sqrt(x, check=False)
    return matfun.hermitian_part(s @ matfun.hermitian_exp(w, check=False) @ s)


def hpd_congruence(g: np.ndarray, y: np.ndarray) -> np.ndarray:
    """g . Y = g Y g^H."""
    g = matfun.check_square(np.asarray(g, dtype=complex), "group element")
    if np.any(np.abs(np.linalg.det(g)) == 0):
        raise ValidationError("Congruence matrix is singular")
    return matfun.hermitian_part(g @ y @ matfun.dagger(g))


def hpd_polar(y: np.ndarray) -> HpdPolar:
    w, u = np.linalg.eigh(matfun.hermitian_part(check_hpd(y)))
    return HpdPolar(np.log(w[..., ::-1]), u[..., ::-1])


def hpd_from_polar(p: HpdPolar) -> np.ndarray:
    return matfun.hermitian_part((p.u * np.exp(p.r)[..., None, :]) @ matfun.dagger(p.u))


def random_hpd(n: int, seed: utils.SeedLike = None, size: int | None = None, spread: float = 1.0) -> np.ndarray:
    rng = utils.as_generator(seed)
    u = matfun.sample_unitary(n, rng, size)
    r = spread * rng.standard_normal(u.shape[:-1])
    return matfun.hermitian_part((u * np.exp(r)[..., None, :]) @ matfun.dagger(u))


# Polar density and normalising factor


def _log_vandermonde(r: np.ndarray) -> np.ndarray:
    n = r.shape[-1]
    i, j = np.triu_indices(n, k=1)
    return 2.0 * np.sum(matfun.log_sinh(0.5 * np.abs(r[..., i] - r[..., j])), axis=-1)


def hpd_log_polar_density(r: np.ndarray | list[float], sigma: float) -> np.ndarray:
    """-|r|^2/2 sigma^2 + 2 sum_{i<j} log sinh(|r_i - r_j|/2); -inf when two entries coincide."""
    if sigma <= 0:
        raise ValidationError("sigma must be positive")
    r = np.asarray(r, dtype=float)
    return -np.sum(r * r, axis=-1) / (2.0 * sigma * sigma) + _log_vandermonde(r)


def hpd_polar_integrand(n: int) -> sampling.PolarIntegrand:
    """On the chamber r_1 > .. > r_n the log-weight grows like sum_k (n + 1 - 2k) r_k."""
    return sampling.PolarIntegrand(
        dim=n,
        log_g=_log_vandermonde,
        shift=np.arange(n - 1, -n, -2, dtype=float),
        group_order=math.factorial(n),
        in_chamber=lambda r: np.all(np.diff(r, axis=-1) < 0, axis=-1),
    )


def hpd_logZ_closed_form_h1(sigma: np.ndarray | float) -> np.ndarray:
    return np.log(math.sqrt(2.0 * math.pi) * np.asarray(sigma, dtype=float))


def hpd_logZ_closed_form_h2(sigma: np.ndarray | float) -> np.ndarray:
    """log(pi sigma^2 (e^{sigma^2} - 1)), the n = 2 integral in closed form."""
    s2 = np.asarray(sigma, dtype=float) ** 2
    return np.log(math.pi * s2 * np.expm1(s2))


def hpd_psi_prime_closed_form_h2(sigma: np.ndarray | float) -> np.ndarray:
    s2 = np.asarray(sigma, dtype=float) ** 2
    return 2.0 * s2 + 2.0 * s2 * s2 / -np.expm1(-s2)


def hpd_logZ_analytic(n: int, sigma: np.ndarray | float) -> np.ndarray:
    if np.any(np.asarray(sigma) <= 0):
        raise ValidationError("sigma must be positive")
    if n == 1:
        return hpd_logZ_closed_form_h1(sigma)
    if n == 2:
        return hpd_logZ_closed_form_h2(sigma)
    raise ValidationError(f"No closed form for HPD log Z with n={n}")


def hpd_psi_prime_analytic(n: int, sigma: np.ndarray | float) -> np.ndarray:
    if n == 1:
        return np.asarray(sigma, dtype=float) ** 2
    if n == 2:
        return hpd_psi_prime_closed_form_h2(sigma)
    raise ValidationError(f"No closed form for HPD psi' with n={n}")


def hpd_z_montecarlo_grid(
    n: int,
    sigmas: np.ndarray,
    samples: int,
    seed: utils.SeedLike = None,
    threads: int = 1,
    proposal: str = "auto",
) -> sampling.PolarEstimate:
    sigmas = np.atleast_1d(np.asarray(sigmas, dtype=float))
    if np.any(sigmas <= 0):
        raise ValidationError("sigma must be positive")
    if samples < 1000:
        raise ValidationError(f"Monte Carlo needs at least 1000 samples, got {samples}")
    if n == 1:
        return sampling.PolarEstimate(
            sigma=sigmas,
            logz=hpd_logZ_closed_form_h1(sigmas),
            stderr=np.zeros_like(sigmas),
            psi_prime=sigmas**2,
            samples=samples,
            proposal=["exact"] * sigmas.size,
        )
    logger.info(f"Monte Carlo log Z for H_{n} on {sigmas.size} sigma values ({samples} draws)")
    return sampling.polar_logz(hpd_polar_integrand(n), sigmas, samples, seed, threads, proposal)


def hpd_z_montecarlo(
    n: int, sigma: float, samples: int, seed: utils.SeedLike = None, threads: int = 1
) -> tuple[float, float]:
    """(log Z up to the constant C, standard error of the log estimate)."""
    estimate = hpd_z_montecarlo_grid(n, np.array([sigma]), samples, seed, threads)
    return float(estimate.logz[0]), float(estimate.stderr[0])


# Sampling


def hpd_sample_polar_r_many(
    n: int, sigma: float, count: int, seed: utils.SeedLike = None, mh_cfg: sampling.MhConfig | None = None
) -> tuple[np.ndarray, sampling.MhDiagnostics]:
    if sigma <= 0:
        raise ValidationError("sigma must be positive")
    rng = utils.as_generator(seed)
    if n == 1:
        return sigma * rng.standard_normal((count, 1)), sampling.MhDiagnostics(acceptance_rate=1.0, draws=count)
    r, diagnostics = sampling.metropolis(lambda x: hpd_log_polar_density(x, sigma), n, count, sigma, rng, mh_cfg)
    return -np.sort(-r, axis=-1), diagnostics


def hpd_sample_polar_r(
    n: int, sigma: float, seed: utils.SeedLike = None, mh_cfg: sampling.MhConfig | None = None
) -> np.ndarray:
    r, _ = hpd_sample_polar_r_many(n, sigma, 1, seed, mh_cfg)
    return r[0]


def hpd_sample_many(
    y_bar: np.ndarray,
    sigma: float,
    count: int,
    seed: utils.SeedLike = None,
    mh_cfg: sampling.MhConfig | None = None,
) -> np.ndarray:
    """Draws Y_bar^{1/2} U e^r U^H Y_bar^{1/2} with U Haar and r from the polar density."""
    y_bar = check_hpd(y_bar)
    n = y_bar.shape[-1]
    rng = utils.as_generator(seed)
    r, _ = hpd_sample_polar_r_many(n, sigma, count, rng, mh_cfg)
    u = matfun.sample_unitary(n, rng, count)
    y = hpd_from_polar(HpdPolar(r, u))
    root = matfun.hermitian_sqrt(y_bar, check=False)
    return matfun.hermitian_part(root @ y @ root)


def hpd_sample(
    y_bar: np.ndarray, sigma: float, seed: utils.SeedLike = None, mh_cfg: sampling.MhConfig | None = None
) -> np.ndarray:
    return hpd_sample_many(y_bar, sigma, 1, seed, mh_cfg)[0]
