"""matfun.py - Dense matrix functions, Takagi factorization and random unitaries.

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
from collections.abc import Callable

import numpy as np

import constants
import utils
from errors import NumericalError, ValidationError

logger = logging.getLogger(__name__)

# Mixing constants tried when diagonalising Re(Z) + c Im(Z) in the Takagi step.
_TAKAGI_MIX = (0.6180339887498949, 1.4142135623730951, 2.718281828459045, 0.3183098861837907)
_ZERO_SINGULAR = 1e-13


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def transpose(a: np.ndarray) -> np.ndarray:
    return np.swapaxes(a, -1, -2)


def hermitian_part(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + dagger(a))


def _relative_residual(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    scale = np.maximum(1.0, np.linalg.norm(a, axis=(-2, -1)))
    return np.linalg.norm(a - b, axis=(-2, -1)) / scale


def check_square(a: np.ndarray, what: str = "matrix") -> np.ndarray:
    a = np.asarray(a)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValidationError(f"{what} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{what} has non-finite entries")
    return a


def check_hermitian(a: np.ndarray, tol: float = constants.HERMITIAN_TOL) -> np.ndarray:
    a = check_square(a, "Hermitian matrix")
    residual = np.max(_relative_residual(a, dagger(a)), initial=0.0)
    if residual > tol:
        raise ValidationError(f"Matrix is not Hermitian (relative residual {residual:.3e})")
    return a


def check_symmetric(a: np.ndarray, tol: float = constants.SYMMETRIC_TOL) -> np.ndarray:
    a = check_square(a, "symmetric matrix")
    residual = np.max(_relative_residual(a, transpose(a)), initial=0.0)
    if residual > tol:
        raise ValidationError(f"Matrix is not complex symmetric (relative residual {residual:.3e})")
    return a


def hermitian_matfun(y: np.ndarray, f: Callable[[np.ndarray], np.ndarray], check: bool = True) -> np.ndarray:
    """Apply a real scalar function to a Hermitian matrix (or stack of them) through its spectrum.

    Returns U f(L) U^H from Y = U L U^H. Raises ValidationError if f is undefined on the spectrum.
    """
    if check:
        y = check_hermitian(y)
    w, u = np.linalg.eigh(hermitian_part(y))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        fw = np.asarray(f(w))
    if not np.all(np.isfinite(fw)):
        bad = w[~np.isfinite(fw)]
        raise ValidationError(f"Matrix function undefined at eigenvalue(s) {bad[:3]}")
    return (u * fw[..., None, :]) @ dagger(u)


def hermitian_sqrt(y: np.ndarray, check: bool = True) -> np.ndarray:
    return hermitian_matfun(y, np.sqrt, check)


def hermitian_invsqrt(y: np.ndarray, check: bool = True) -> np.ndarray:
    return hermitian_matfun(y, lambda w: 1.0 / np.sqrt(w), check)


def hermitian_log(y: np.ndarray, check: bool = True) -> np.ndarray:
    return hermitian_matfun(y, np.log, check)


def hermitian_exp(y: np.ndarray, check: bool = True) -> np.ndarray:
    return hermitian_matfun(y, np.exp, check)


def log_sinh(x: np.ndarray | float) -> np.ndarray:
    """log(sinh(x)) for x >= 0, -inf at 0, stable for large x."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        return x + np.log(-np.expm1(-2.0 * x)) - np.log(2.0)


def _symmetric_unitary_sqrt(z: np.ndarray) -> np.ndarray:
    """Symmetric unitary square root of a (stack of) symmetric unitary matrices.

    Re(Z) and Im(Z) are commuting real symmetric matrices, so one real orthogonal Q diagonalises both.
    """
    a, b = z.real, z.imag
    best_w = None
    best_residual = np.inf
    for c in _TAKAGI_MIX:
        _, q = np.linalg.eigh(0.5 * (a + transpose(a)) + c * 0.5 * (b + transpose(b)))
        d_full = transpose(q) @ z @ q
        d = np.diagonal(d_full, axis1=-2, axis2=-1)
        off = d_full - d[..., :, None] * np.eye(z.shape[-1])
        residual = float(np.max(np.abs(off), initial=0.0))
        d = d / np.abs(d)
        w = (q * np.sqrt(d)[..., None, :]) @ transpose(q)
        if residual < best_residual:
            best_w, best_residual = w, residual
        if residual < 1e-10:
            break
    if best_residual > 1e-6:
        logger.warning(f"Takagi phase step left off-diagonal residual {best_residual:.2e}")
    return best_w


def takagi_factor(omega: np.ndarray, check: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Takagi factorisation Omega = Theta diag(s) Theta^T of a complex symmetric matrix.

    Singular values s are returned in descending order, Theta is unitary. Works on stacks.
    """
    omega = np.asarray(omega, dtype=complex)
    if check:
        omega = check_symmetric(omega)
    n = omega.shape[-1]
    u, s, vh = np.linalg.svd(omega)
    # Omega = U S V^H = conj(V) S U^T, so Z = U^H conj(V) commutes with S and is symmetric.
    z = dagger(u) @ np.conj(dagger(vh))
    small = s <= _ZERO_SINGULAR * np.maximum(1.0, s[..., :1])
    if np.any(small):
        keep = ~small
        mask = keep[..., :, None] & keep[..., None, :]
        eye = np.broadcast_to(np.eye(n, dtype=complex), z.shape)
        z = np.where(mask, z, 0.0) + np.where(small[..., :, None] & small[..., None, :], eye, 0.0)
    z = 0.5 * (z + transpose(z))
    theta = u @ _symmetric_unitary_sqrt(z)
    return theta, s


def takagi(omega: np.ndarray, check: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Takagi factorisation in Siegel-disc polar form: Omega = Theta tanh(r) Theta^T, r >= 0 descending."""
    theta, s = takagi_factor(omega, check)
    if np.any(s >= 1.0):
        raise ValidationError(f"Point lies outside the Siegel disc (largest singular value {np.max(s):.6f})")
    return theta, np.arctanh(s)


def _batch_shape(size: int | tuple[int, ...] | None) -> tuple[int, ...]:
    if size is None:
        return ()
    return tuple(int(k) for k in np.atleast_1d(size))


def sample_unitary(n: int, seed: utils.SeedLike = None, size: int | tuple[int, ...] | None = None) -> np.ndarray:
    """Haar-distributed unitary matrices via QR of a complex Ginibre matrix with the diag(R) phase fix."""
    if n < 1:
        raise ValidationError(f"Unitary dimension must be >= 1, got {n}")
    rng = utils.as_generator(seed)
    shape = _batch_shape(size) + (n, n)
    for _ in range(10):
        g = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
        q, r = np.linalg.qr(g)
        d = np.diagonal(r, axis1=-2, axis2=-1)
        if np.all(np.abs(d) > 1e-300):
            return q * (d / np.abs(d))[..., None, :]
        logger.debug("Degenerate Ginibre draw, retrying")
    raise NumericalError("Could not draw a non-degenerate Ginibre matrix")


def sample_special_unitary(
    n: int, seed: utils.SeedLike = None, size: int | tuple[int, ...] | None = None
) -> np.ndarray:
    """Haar unitary rescaled by exp(-i arg(det)/n), which gives unit determinant."""
    if n == 1:
        return np.ones(_batch_shape(size) + (1, 1), dtype=complex)
    u = sample_unitary(n, seed, size)
    phase = np.exp(-1j * np.angle(np.linalg.det(u)) / n)
    return u * phase[..., None, None]


def exchange(n: int) -> np.ndarray:
    """The n x n exchange (anti-identity) matrix J."""
    return np.eye(n)[::-1]
