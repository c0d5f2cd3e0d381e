"""zinterp.py - Interpolated log-normalising curves psi(eta) on a sigma grid.

Copyright (C) 2026 rsgauss developers
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

import numpy as np
from scipy.interpolate import CubicHermiteSpline, PchipInterpolator
from scipy.optimize import brentq

import constants
from errors import NumericalError, TableRangeError, ValidationError

logger = logging.getLogger(__name__)

_RANGE_SLACK = 1e-12


def sigma_to_eta(sigma: np.ndarray | float) -> np.ndarray:
    return -0.5 / np.asarray(sigma, dtype=float) ** 2


def eta_to_sigma(eta: np.ndarray | float) -> np.ndarray:
    return np.sqrt(-0.5 / np.asarray(eta, dtype=float))


def check_convexity(sigma: np.ndarray, logz: np.ndarray, stderr: np.ndarray | None = None) -> None:
    """Second divided differences of log Z in eta must be positive, up to CONVEXITY_SIGMAS standard errors."""
    eta = sigma_to_eta(sigma)
    if eta.size < 3:
        return
    err = np.zeros_like(logz) if stderr is None else np.asarray(stderr, dtype=float)
    h0 = eta[1:-1] - eta[:-2]
    h1 = eta[2:] - eta[1:-1]
    slope0 = (logz[1:-1] - logz[:-2]) / h0
    slope1 = (logz[2:] - logz[1:-1]) / h1
    second = 2.0 * (slope1 - slope0) / (h0 + h1)
    noise = 2.0 * (err[2:] / h1 + err[1:-1] * (1.0 / h0 + 1.0 / h1) + err[:-2] / h0) / (h0 + h1)
    rounding = 1e-9 * (np.abs(logz[:-2]) + 2.0 * np.abs(logz[1:-1]) + np.abs(logz[2:]) + 1.0) / (h0 * h1)
    bad = np.flatnonzero(second < -(constants.CONVEXITY_SIGMAS * noise + rounding))
    if bad.size:
        k = int(bad[0]) + 1
        raise NumericalError(
            f"log Z is not convex in eta near sigma={sigma[k]:g} (second difference {second[k - 1]:.3e})"
        )


def monotone_slopes(sigma: np.ndarray, logz: np.ndarray) -> np.ndarray:
    """psi' at the knots as the derivative of the monotone (PCHIP) cubic through (eta_k, log Z_k)."""
    eta = sigma_to_eta(sigma)
    return np.asarray(PchipInterpolator(eta, np.asarray(logz, dtype=float)).derivative()(eta), dtype=float)


class LogZInterpolant:
    """psi(eta) as a cubic Hermite spline through (eta_k, log Z_k) with slopes psi'_k.

    psi' itself is interpolated monotonically (PCHIP) so that it can be inverted.
    """

    def __init__(self, sigma: np.ndarray, logz: np.ndarray, psi_prime: np.ndarray) -> None:
        sigma = np.asarray(sigma, dtype=float)
        logz = np.asarray(logz, dtype=float)
        psi_prime = np.asarray(psi_prime, dtype=float)
        if sigma.ndim != 1 or sigma.size < 2 or logz.shape != sigma.shape or psi_prime.shape != sigma.shape:
            raise ValidationError("Z-table needs matching sigma, logz and psi' arrays of at least two knots")
        if not (np.all(np.isfinite(logz)) and np.all(np.isfinite(psi_prime))):
            raise NumericalError("Z-table knots contain non-finite values")
        if np.any(sigma <= 0) or np.any(np.diff(sigma) <= 0):
            raise ValidationError("Z-table sigma grid must be positive and strictly increasing")
        if np.any(np.diff(psi_prime) <= 0):
            k = int(np.flatnonzero(np.diff(psi_prime) <= 0)[0])
            raise NumericalError(f"psi' knots are not strictly increasing near sigma={sigma[k]:g}")
        self.sigma = sigma
        self.eta = sigma_to_eta(sigma)
        self.knot_logz = logz
        self.knot_psi_prime = psi_prime
        self._psi = CubicHermiteSpline(self.eta, logz, psi_prime, extrapolate=False)
        self._psi_prime = PchipInterpolator(self.eta, psi_prime, extrapolate=False)
        self._psi_second = self._psi_prime.derivative()

    @property
    def sigma_range(self) -> tuple[float, float]:
        return float(self.sigma[0]), float(self.sigma[-1])

    @property
    def rho_range(self) -> tuple[float, float]:
        return float(self.knot_psi_prime[0]), float(self.knot_psi_prime[-1])

    def clamp_eta(self, eta: np.ndarray | float) -> np.ndarray:
        eta = np.asarray(eta, dtype=float)
        lo, hi = self.eta[0], self.eta[-1]
        slack = _RANGE_SLACK * max(abs(lo), 1.0)
        if np.any(eta < lo - slack) or np.any(eta > hi + slack):
            lo_s, hi_s = self.sigma_range
            raise TableRangeError(f"sigma outside Z-table range [{lo_s:g}, {hi_s:g}]")
        return np.clip(eta, lo, hi)

    def psi(self, eta: np.ndarray | float) -> np.ndarray:
        return self._psi(self.clamp_eta(eta))

    def psi_prime(self, eta: np.ndarray | float) -> np.ndarray:
        return self._psi_prime(self.clamp_eta(eta))

    def psi_second(self, eta: np.ndarray | float) -> np.ndarray:
        return self._psi_second(self.clamp_eta(eta))

    def logz(self, sigma: np.ndarray | float) -> np.ndarray:
        return self.psi(sigma_to_eta(sigma))

    def psi_prime_sigma(self, sigma: np.ndarray | float) -> np.ndarray:
        return self.psi_prime(sigma_to_eta(sigma))

    def inverse_psi_prime(self, rho: float) -> float:
        """eta with psi'(eta) = rho; TableRangeError outside the tabulated psi' range."""
        lo, hi = self.rho_range
        if not lo <= rho <= hi:
            raise TableRangeError(f"rho={rho:g} outside tabulated psi' range [{lo:g}, {hi:g}]")
        if rho == lo:
            return float(self.eta[0])
        if rho == hi:
            return float(self.eta[-1])
        return float(
            brentq(
                lambda e: float(self._psi_prime(e)) - rho,
                self.eta[0],
                self.eta[-1],
                xtol=constants.PHI_TOL * max(1.0, abs(self.eta[0])),
                maxiter=constants.PHI_MAX_ITER * 4,
            )
        )
