"""gaussian.py - Gaussian distributions G(x_bar, sigma): Z-tables, Phi, density, sampling and MLE.

Copyright (C) 2026 rsgauss developers

All log Z values are known up to one additive constant per manifold. Tables record this with
`constant_dropped`; nothing here needs the absolute constant.
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
from collections.abc import Callable
from dataclasses import dataclass, field, replace

import numpy as np

import block_toeplitz
import constants
import hpd
import manifold
import sampling
import toeplitz
import utils
import zinterp
from errors import ConvergenceError, DegenerateFitError, TableRangeError, ValidationError
from manifold import Dataset, ManifoldId, ManifoldKind, ManifoldPoint

logger = logging.getLogger(__name__)

METHODS = ("analytic", "montecarlo", "composite")

CurveFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class GaussianParams:
    center: ManifoldPoint
    sigma: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise ValidationError(f"sigma must be positive, got {self.sigma}")
        if not self.center.manifold.has_points:
            raise ValidationError(f"{self.center.manifold} has no points to centre a Gaussian on")

    @property
    def manifold(self) -> ManifoldId:
        return self.center.manifold


def _closed_form(m: ManifoldId) -> tuple[CurveFn, CurveFn] | None:
    """(log Z, psi') as functions of sigma where they are known exactly."""
    if m.kind is ManifoldKind.TOEPLITZ or (m.kind is ManifoldKind.BLOCK_TOEPLITZ and m.N == 1):
        return (lambda s: toeplitz.toeplitz_logZ(m.n, s), lambda s: toeplitz.toeplitz_psi_prime(m.n, s))
    if m.kind is ManifoldKind.HPD and m.n <= 2:
        return (lambda s: hpd.hpd_logZ_analytic(m.n, s), lambda s: hpd.hpd_psi_prime_analytic(m.n, s))
    return None


@dataclass(frozen=True)
class ZTable:
    """log Z and psi' = d log Z / d eta on a sigma grid, eta = -1 / (2 sigma^2).

    Analytic tables evaluate their closed form anywhere inside the grid; other tables interpolate a cubic
    Hermite spline in eta through the knots, with the knot slopes.
    """

    manifold: ManifoldId
    sigma_grid: np.ndarray
    logz_knots: np.ndarray
    psi_prime_knots: np.ndarray
    method: str
    stderr: np.ndarray
    mc_samples: int = 0
    seed: int | None = None
    constant_dropped: bool = True
    offset: float = 0.0
    interp: zinterp.LogZInterpolant = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValidationError(f"Unknown Z-table method {self.method!r}")
        if self.method == "analytic" and _closed_form(self.manifold) is None:
            raise ValidationError(f"No closed form for {self.manifold}")
        zinterp.check_convexity(self.sigma_grid, self.logz_knots, self.stderr)
        object.__setattr__(
            self, "interp", zinterp.LogZInterpolant(self.sigma_grid, self.logz_knots, self.psi_prime_knots)
        )

    @classmethod
    def from_knots(
        cls,
        manifold_id: ManifoldId,
        sigma_grid: np.ndarray,
        logz: np.ndarray,
        psi_prime: np.ndarray,
        method: str,
        stderr: np.ndarray | None = None,
        mc_samples: int = 0,
        seed: int | None = None,
        constant_dropped: bool = True,
    ) -> ZTable:
        sigma_grid = np.asarray(sigma_grid, dtype=float)
        return cls(
            manifold=manifold_id,
            sigma_grid=sigma_grid,
            logz_knots=np.asarray(logz, dtype=float),
            psi_prime_knots=np.asarray(psi_prime, dtype=float),
            method=method,
            stderr=np.zeros_like(sigma_grid) if stderr is None else np.asarray(stderr, dtype=float),
            mc_samples=mc_samples,
            seed=seed,
            constant_dropped=constant_dropped,
        )

    def shifted(self, offset: float) -> ZTable:
        """The same table with another choice of the dropped additive constant."""
        return replace(self, logz_knots=self.logz_knots + offset, offset=self.offset + offset)

    @property
    def sigma_range(self) -> tuple[float, float]:
        return self.interp.sigma_range

    def logz(self, sigma: np.ndarray | float) -> np.ndarray:
        eta = zinterp.sigma_to_eta(sigma)
        self.interp.clamp_eta(eta)
        if self.method == "analytic":
            logz_fn, _ = _closed_form(self.manifold)  # type: ignore[misc]
            return logz_fn(np.asarray(sigma, dtype=float)) + self.offset
        return self.interp.psi(eta)

    def psi(self, eta: np.ndarray | float) -> np.ndarray:
        return self.logz(zinterp.eta_to_sigma(eta))

    def psi_prime(self, eta: np.ndarray | float) -> np.ndarray:
        eta = self.interp.clamp_eta(eta)
        if self.method == "analytic":
            _, psi_prime_fn = _closed_form(self.manifold)  # type: ignore[misc]
            return psi_prime_fn(zinterp.eta_to_sigma(eta))
        return self.interp.psi_prime(eta)

    def psi_second(self, eta: np.ndarray | float) -> np.ndarray:
        return self.interp.psi_second(eta)


def build_ztable(
    manifold_id: ManifoldId,
    grid: np.ndarray | None = None,
    mc_samples: int = constants.MC_SAMPLES,
    seed: int | None = constants.SEED,
    threads: int = 1,
    method: str = "auto",
) -> ZTable:
    """Tabulate log Z and psi' on a sigma grid.

    "auto" uses the closed form where one exists (Toeplitz, HPD with n <= 2) and Monte Carlo otherwise.
    Block-Toeplitz tables combine the analytic diagonal-block factor with tabulated Siegel factors.
    """
    grid = utils.default_grid() if grid is None else np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 3 or np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise ValidationError("Sigma grid must hold at least 3 strictly increasing positive values")
    closed = _closed_form(manifold_id)
    if method == "auto":
        method = "analytic" if closed is not None else "montecarlo"
    if method == "analytic":
        if closed is None:
            raise ValidationError(f"No closed form for {manifold_id}")
        logger.info(f"Building analytic Z-table for {manifold_id} on {grid.size} sigma values")
        return ZTable.from_knots(manifold_id, grid, closed[0](grid), closed[1](grid), "analytic")
    if method != "montecarlo":
        raise ValidationError(f"Unknown Z-table method {method!r}")

    m = manifold_id
    if m.kind is ManifoldKind.HPD:
        estimate = hpd.hpd_z_montecarlo_grid(m.n, grid, mc_samples, seed, threads)
        return _from_estimate(m, estimate, mc_samples, seed)
    if m.kind is ManifoldKind.SIEGEL:
        estimate = block_toeplitz.siegel_z_montecarlo_grid(m.n, grid, mc_samples, seed, threads)
        return _from_estimate(m, estimate, mc_samples, seed)
    if m.kind is ManifoldKind.TOEPLITZ:
        raise ValidationError("Toeplitz tables are analytic")
    siegel = block_toeplitz.siegel_ztable(m.N, block_toeplitz.siegel_grid_for(m.n, grid), mc_samples, seed, threads)
    stderr = np.zeros_like(grid)
    for weight in toeplitz.disc_weights(m.n):
        stderr = stderr + np.interp(np.log(grid / math.sqrt(weight)), np.log(siegel.sigma), siegel.stderr)
    logger.info(f"Building composite Z-table for {m} from the D_{m.N} factor table")
    return ZTable.from_knots(
        m,
        grid,
        block_toeplitz.block_toeplitz_logZ(m.n, m.N, grid, siegel),
        block_toeplitz.block_toeplitz_psi_prime(m.n, m.N, grid, siegel),
        "composite",
        stderr=stderr,
        mc_samples=mc_samples,
        seed=seed,
    )


def _from_estimate(m: ManifoldId, estimate: sampling.PolarEstimate, samples: int, seed: int | None) -> ZTable:
    if m.kind is ManifoldKind.HPD and m.n == 1:
        method, slopes = "analytic", estimate.psi_prime
    else:
        method, slopes = "montecarlo", zinterp.monotone_slopes(estimate.sigma, estimate.logz)
    return ZTable.from_knots(m, estimate.sigma, estimate.logz, slopes, method, estimate.stderr, samples, seed)


def euclidean_ztable(grid: np.ndarray | None = None) -> ZTable:
    """Table of a single Euclidean factor: log Z = log sigma, psi' = sigma^2."""
    return build_ztable(ManifoldId.toeplitz(1), grid)


def _check_table(m: ManifoldId, z: ZTable) -> None:
    if z.manifold != m:
        raise ValidationError(f"Z-table is for {z.manifold}, data is on {m}")


# Density


def log_pdf(x: ManifoldPoint, p: GaussianParams, z: ZTable) -> float:
    """-log Z(sigma) - d^2(x, x_bar) / 2 sigma^2."""
    _check_table(p.manifold, z)
    return -float(z.logz(p.sigma)) - manifold.distance2(x, p.center) / (2.0 * p.sigma**2)


def log_pdf_many(data: Dataset, p: GaussianParams, z: ZTable) -> np.ndarray:
    _check_table(p.manifold, z)
    return -float(z.logz(p.sigma)) - manifold.distances2_to(data, p.center) / (2.0 * p.sigma**2)


def log_likelihood(data: Dataset, p: GaussianParams, z: ZTable) -> float:
    return float(np.sum(log_pdf_many(data, p, z)))


def empirical_dispersion(data: Dataset, x: ManifoldPoint) -> float:
    """Mean squared distance from x."""
    if len(data) == 0:
        raise ValidationError("Dispersion of an empty dataset")
    return float(np.mean(manifold.distances2_to(data, x)))


# Phi and duality


def solve_eta(rho: float, z: ZTable) -> tuple[float, float]:
    """eta with psi'(eta) = rho by bracketing and a Newton polish; returns (eta, |psi'(eta) - rho|)."""
    lo, hi = z.interp.rho_range
    if not (math.isfinite(rho) and rho >= lo):
        raise DegenerateFitError(f"Dispersion {rho:.3e} is below the Z-table range (minimum {lo:.3e})")
    if rho > hi:
        raise TableRangeError(f"Dispersion {rho:.3e} exceeds the Z-table range (maximum {hi:.3e}); extend the grid")
    eta = z.interp.inverse_psi_prime(rho)
    eta_lo, eta_hi = float(z.interp.eta[0]), float(z.interp.eta[-1])
    tol = constants.PHI_TOL * max(1.0, rho)
    residual = float(z.psi_prime(eta)) - rho
    for _ in range(constants.PHI_MAX_ITER):
        if abs(residual) <= tol:
            return eta, abs(residual)
        slope = float(z.psi_second(eta))
        if not slope > 0:
            break
        eta = min(max(eta - residual / slope, eta_lo), eta_hi)
        residual = float(z.psi_prime(eta)) - rho
    if abs(residual) <= tol:
        return eta, abs(residual)
    raise ConvergenceError(f"Phi solver did not converge for rho={rho:g} (residual {residual:.3e})")


def phi(rho: float, z: ZTable) -> float:
    """sigma_hat = Phi(rho), the inverse of sigma -> psi'(eta(sigma))."""
    eta, _ = solve_eta(rho, z)
    return float(zinterp.eta_to_sigma(eta))


def legendre_dual(rho: float, z: ZTable) -> float:
    """psi*(rho) = eta rho - psi(eta) with psi'(eta) = rho."""
    eta, _ = solve_eta(rho, z)
    return eta * rho - float(z.psi(eta))


def entropy(sigma: float, z: ZTable) -> float:
    """psi*(rho_bar) = eta rho_bar - psi(eta) with rho_bar = psi'(eta), up to the dropped constant."""
    if sigma <= 0:
        raise ValidationError("sigma must be positive")
    eta = float(zinterp.sigma_to_eta(sigma))
    return eta * float(z.psi_prime(eta)) - float(z.psi(eta))


# Sampling and fitting


def sample(
    p: GaussianParams, count: int, seed: utils.SeedLike = None, mh_cfg: sampling.MhConfig | None = None
) -> Dataset:
    if count < 0:
        raise ValidationError(f"Sample count must be non-negative, got {count}")
    m = p.manifold
    if count == 0:
        return Dataset.empty(m)
    if m.kind is ManifoldKind.HPD:
        payload = hpd.hpd_sample_many(p.center.payload, p.sigma, count, seed, mh_cfg)
    elif m.kind is ManifoldKind.TOEPLITZ:
        payload = toeplitz.toeplitz_sample_many(p.center.payload, p.sigma, count, seed)
    else:
        payload = block_toeplitz.block_toeplitz_sample_many(p.center.payload, p.sigma, count, seed, mh_cfg)
    logger.debug(f"Drew {count} samples from G(x, {p.sigma:g}) on {m}")
    return Dataset(m, payload)


@dataclass(frozen=True)
class FitReport:
    params: GaussianParams
    dispersion: float
    iterations: int
    gradient_norm: float
    eta_solver_residual: float


def mle_fit(
    data: Dataset,
    z: ZTable,
    cfg: manifold.BarycentreConfig | None = None,
    init: ManifoldPoint | None = None,
) -> FitReport:
    """x_hat is the barycentre, sigma_hat = Phi(mean squared distance to x_hat)."""
    if len(data) < 2:
        raise ValidationError(f"MLE needs at least 2 samples, got {len(data)}")
    _check_table(data.manifold, z)
    result = manifold.solve_barycentre(data, cfg=cfg, init=init)
    rho = empirical_dispersion(data, result.point)
    eta, residual = solve_eta(rho, z)
    sigma = float(zinterp.eta_to_sigma(eta))
    logger.info(f"MLE on {data.manifold}: sigma={sigma:.6g}, dispersion={rho:.6g}, {result.iterations} iterations")
    return FitReport(GaussianParams(result.point, sigma), rho, result.iterations, result.gradient_norm, residual)
