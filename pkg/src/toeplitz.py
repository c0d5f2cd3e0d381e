"""toeplitz.py - Toeplitz HPD matrices in reflection coordinates.

Copyright (C) 2026 rsgauss developers

A Toeplitz HPD matrix T with T[i, j] = r_{i-j} is parameterised by (r_0, alpha_1 .. alpha_{n-1}), r_0 > 0 and
|alpha_j| < 1. The distance treats log r_0 as a Euclidean factor of weight n and each alpha_j as a Poincare
disc factor of weight n - j.
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
import scipy.linalg
from scipy.special import erf
from scipy.stats import truncnorm

import constants
import matfun
import utils
from errors import NumericalError, ValidationError

logger = logging.getLogger(__name__)

LOG_2PI_32 = 1.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class ToeplitzCoords:
    """Reflection coordinates. `r` has the batch shape, `alphas` the batch shape plus (n - 1,)."""

    r: np.ndarray
    alphas: np.ndarray

    @classmethod
    def create(cls, r: float | np.ndarray, alphas: np.ndarray | list[complex] | None = None) -> ToeplitzCoords:
        r = np.asarray(r, dtype=float)
        alphas = np.zeros(r.shape + (0,), dtype=complex) if alphas is None else np.asarray(alphas, dtype=complex)
        if alphas.ndim == 0 or alphas.shape[:-1] != r.shape:
            raise ValidationError(f"alphas shape {alphas.shape} does not match r shape {r.shape}")
        coords = cls(r, alphas)
        coords.validate()
        return coords

    @classmethod
    def identity(cls, n: int) -> ToeplitzCoords:
        return cls(np.asarray(1.0), np.zeros(n - 1, dtype=complex))

    @property
    def n(self) -> int:
        return self.alphas.shape[-1] + 1

    @property
    def batch_shape(self) -> tuple[int, ...]:
        return self.r.shape

    def validate(self) -> None:
        if not (np.all(np.isfinite(self.r)) and np.all(np.isfinite(self.alphas))):
            raise ValidationError("Toeplitz coordinates contain non-finite values")
        if np.any(self.r <= 0):
            raise ValidationError("Toeplitz coordinate r must be positive")
        if np.any(np.abs(self.alphas) >= 1.0):
            raise ValidationError("Reflection coefficients must lie in the open unit disc")

    def __getitem__(self, index: int | slice | np.ndarray) -> ToeplitzCoords:
        return ToeplitzCoords(self.r[index], self.alphas[index])

    def __len__(self) -> int:
        return self.r.shape[0]


def stack_coords(items: list[ToeplitzCoords]) -> ToeplitzCoords:
    return ToeplitzCoords(np.stack([c.r for c in items]), np.stack([c.alphas for c in items]))


def check_same_size(c1: ToeplitzCoords, c2: ToeplitzCoords) -> None:
    if c1.n != c2.n:
        raise ValidationError(f"Toeplitz size mismatch: {c1.n} != {c2.n}")


# Poincare disc factor


def disc_translate(a: np.ndarray | complex, z: np.ndarray | complex) -> np.ndarray:
    """Mobius transvection u(a) . z = (z + a) / (1 + conj(a) z); maps 0 to a, inverse is u(-a)."""
    a = np.asarray(a, dtype=complex)
    z = np.asarray(z, dtype=complex)
    return (z + a) / (1.0 + np.conj(a) * z)


def su11_element(a: np.ndarray | complex) -> np.ndarray:
    """SU(1,1) matrix of the transvection u(a), shape (..., 2, 2)."""
    a = np.asarray(a, dtype=complex)
    scale = 1.0 / np.sqrt(1.0 - np.abs(a) ** 2)
    g = np.empty(a.shape + (2, 2), dtype=complex)
    g[..., 0, 0] = scale
    g[..., 0, 1] = a * scale
    g[..., 1, 0] = np.conj(a) * scale
    g[..., 1, 1] = scale
    return g


def su11_polar(rho: np.ndarray | float, theta: np.ndarray | float) -> np.ndarray:
    """SU(1,1) element with u . 0 = tanh(rho) e^{i theta}, in the half-angle form."""
    rho = np.asarray(rho, dtype=float)
    half = np.exp(0.5j * np.asarray(theta, dtype=float))
    g = np.empty(np.broadcast(rho, half).shape + (2, 2), dtype=complex)
    g[..., 0, 0] = half * np.cosh(rho)
    g[..., 0, 1] = half * np.sinh(rho)
    g[..., 1, 0] = np.conj(half) * np.sinh(rho)
    g[..., 1, 1] = np.conj(half) * np.cosh(rho)
    return g


def check_su11(g: np.ndarray, tol: float = constants.GROUP_TOL) -> np.ndarray:
    """Check u^T J u = J and u^H K u = K with J = [[0, -1], [1, 0]], K = diag(-1, 1)."""
    g = np.asarray(g, dtype=complex)
    if g.shape[-2:] != (2, 2):
        raise ValidationError(f"SU(1,1) element must be 2 x 2, got {g.shape}")
    j = np.array([[0.0, -1.0], [1.0, 0.0]])
    k = np.diag([-1.0, 1.0])
    symplectic = np.max(np.abs(matfun.transpose(g) @ j @ g - j), initial=0.0)
    pseudo_unitary = np.max(np.abs(matfun.dagger(g) @ k @ g - k), initial=0.0)
    tol = tol * max(1.0, float(np.max(np.abs(g), initial=0.0)) ** 2)
    if symplectic > tol or pseudo_unitary > tol:
        raise ValidationError(f"Matrix is not in SU(1,1) (residuals {symplectic:.2e}, {pseudo_unitary:.2e})")
    return g


def su11_act(g: np.ndarray, z: np.ndarray | complex) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    return (g[..., 0, 0] * z + g[..., 0, 1]) / (g[..., 1, 0] * z + g[..., 1, 1])


def random_su11(seed: utils.SeedLike = None, size: int | tuple[int, ...] | None = None) -> np.ndarray:
    rng = utils.as_generator(seed)
    t = rng.exponential(1.0, size)
    phi, psi = rng.uniform(0.0, 2.0 * np.pi, size), rng.uniform(0.0, 2.0 * np.pi, size)
    a = np.cosh(t) * np.exp(1j * phi)
    b = np.sinh(t) * np.exp(1j * psi)
    g = np.empty(np.shape(a) + (2, 2), dtype=complex)
    g[..., 0, 0], g[..., 0, 1], g[..., 1, 0], g[..., 1, 1] = a, b, np.conj(b), np.conj(a)
    return g


def cap_disc(z: np.ndarray) -> np.ndarray:
    modulus = np.abs(z)
    over = modulus > constants.DISC_CAP
    if np.any(over):
        z = np.where(over, z * (constants.DISC_CAP / np.where(over, modulus, 1.0)), z)
    return z


def disc_distance(a: np.ndarray | complex, b: np.ndarray | complex) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    ratio = np.abs((a - b) / (1.0 - np.conj(a) * b))
    return np.arctanh(np.minimum(ratio, constants.SIEGEL_CLIP))


def disc_log0(w: np.ndarray) -> np.ndarray:
    modulus = np.abs(w)
    safe = np.where(modulus > 0, modulus, 1.0)
    return np.where(modulus > 0, np.arctanh(np.minimum(modulus, constants.SIEGEL_CLIP)) * w / safe, 0.0)


def disc_exp0(v: np.ndarray) -> np.ndarray:
    modulus = np.abs(v)
    safe = np.where(modulus > 0, modulus, 1.0)
    return np.where(modulus > 0, np.tanh(modulus) * v / safe, 0.0)


def disc_log(base: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Log map in the frame transported from the origin by u(base)."""
    return disc_log0(disc_translate(-np.asarray(base), z))


def disc_exp(base: np.ndarray, v: np.ndarray) -> np.ndarray:
    z = disc_translate(base, disc_exp0(v))
    if np.any(np.abs(z) >= 1.0):
        raise NumericalError("Exponential map left the unit disc (tangent vector too long for double precision)")
    return z


def disc_weights(n: int) -> np.ndarray:
    """Metric weights n - j for j = 1 .. n - 1."""
    return np.arange(n - 1, 0, -1, dtype=float)


# Coordinates and matrices


def autocov_to_matrix(autocov: np.ndarray) -> np.ndarray:
    """Hermitian Toeplitz matrix with first column r_0 .. r_{n-1}; works on stacks."""
    autocov = np.asarray(autocov, dtype=complex)
    if autocov.ndim == 1:
        return scipy.linalg.toeplitz(autocov, np.conj(autocov))
    flat = autocov.reshape(-1, autocov.shape[-1])
    mats = np.stack([scipy.linalg.toeplitz(col, np.conj(col)) for col in flat])
    return mats.reshape(autocov.shape + (autocov.shape[-1],))


def coords_to_autocov(c: ToeplitzCoords) -> np.ndarray:
    """Inverse Levinson recursion: reflection coefficients to autocovariances r_0 .. r_{n-1}."""
    n = c.n
    batch = c.batch_shape
    autocov = np.zeros(batch + (n,), dtype=complex)
    autocov[..., 0] = c.r
    a = np.zeros(batch + (n,), dtype=complex)
    a[..., 0] = 1.0
    delta = np.array(c.r, dtype=float)
    for m in range(n - 1):
        alpha = c.alphas[..., m]
        # sum_{i=1..m} A_i conj(r_{m+1-i})
        tail = np.sum(a[..., 1 : m + 1] * np.conj(autocov[..., m:0:-1]), axis=-1)
        autocov[..., m + 1] = np.conj(alpha * delta - tail)
        backward = np.conj(a[..., m::-1])
        a[..., 1 : m + 2] -= alpha[..., None] * backward
        delta = delta * (1.0 - np.abs(alpha) ** 2)
    return autocov


def coords_to_matrix(c: ToeplitzCoords) -> np.ndarray:
    return autocov_to_matrix(coords_to_autocov(c))


def autocov_to_coords(autocov: np.ndarray) -> ToeplitzCoords:
    """Levinson recursion on autocovariances r_0 .. r_{n-1}; raises if a prediction error is not positive."""
    autocov = np.asarray(autocov, dtype=complex)
    n = autocov.shape[-1]
    batch = autocov.shape[:-1]
    r0 = autocov[..., 0].real
    if np.any(r0 <= 0):
        raise ValidationError("Toeplitz matrix is not positive definite (r_0 <= 0)")
    alphas = np.zeros(batch + (n - 1,), dtype=complex)
    a = np.zeros(batch + (n,), dtype=complex)
    a[..., 0] = 1.0
    delta = np.array(r0, dtype=float)
    for m in range(n - 1):
        big_delta = np.sum(a[..., : m + 1] * np.conj(autocov[..., m + 1 : 0 : -1]), axis=-1)
        alpha = big_delta / delta
        if np.any(np.abs(alpha) >= 1.0):
            raise ValidationError(f"Toeplitz matrix is not positive definite (|alpha_{m + 1}| >= 1)")
        alphas[..., m] = alpha
        backward = np.conj(a[..., m::-1])
        a[..., 1 : m + 2] -= alpha[..., None] * backward
        delta = delta * (1.0 - np.abs(alpha) ** 2)
    return ToeplitzCoords(np.array(r0), alphas)


def matrix_to_coords(t: np.ndarray, tol: float = constants.RECONSTRUCTION_TOL) -> ToeplitzCoords:
    t = matfun.check_hermitian(np.asarray(t, dtype=complex))
    n = t.shape[-1]
    autocov = t[..., :, 0]
    if np.max(np.abs(autocov_to_matrix(autocov) - t), initial=0.0) > tol * max(1.0, float(np.max(np.abs(t)))):
        raise ValidationError("Matrix is not Toeplitz")
    coords = autocov_to_coords(autocov)
    logger.debug(f"Converted {n}x{n} Toeplitz matrix to reflection coordinates")
    return coords


def toeplitz_log_det(c: ToeplitzCoords) -> np.ndarray:
    """log det T = n log r + sum_j (n - j) log(1 - |alpha_j|^2)."""
    return c.n * np.log(c.r) + np.sum(disc_weights(c.n) * np.log1p(-np.abs(c.alphas) ** 2), axis=-1)


# Geometry


def toeplitz_distance2(c1: ToeplitzCoords, c2: ToeplitzCoords) -> np.ndarray:
    check_same_size(c1, c2)
    scale = c1.n * (np.log(c2.r) - np.log(c1.r)) ** 2
    discs = np.sum(disc_weights(c1.n) * disc_distance(c1.alphas, c2.alphas) ** 2, axis=-1)
    return scale + discs


def toeplitz_distance(c1: ToeplitzCoords, c2: ToeplitzCoords) -> np.ndarray:
    return np.sqrt(toeplitz_distance2(c1, c2))


def toeplitz_act(scale: np.ndarray | float, discs: np.ndarray, c: ToeplitzCoords) -> ToeplitzCoords:
    """Group action (s, u_1 .. u_{n-1}) . (r, alpha) = (s r, u_j . alpha_j)."""
    return ToeplitzCoords(np.asarray(scale) * c.r, cap_disc(su11_act(discs, c.alphas)))


# Normalising factor


def disc_logZ(sigma: np.ndarray | float) -> np.ndarray:
    """log of (2 pi)^{3/2} sigma exp(sigma^2/2) erf(sigma/sqrt 2)."""
    sigma = np.asarray(sigma, dtype=float)
    return LOG_2PI_32 + np.log(sigma) + 0.5 * sigma**2 + np.log(erf(sigma / math.sqrt(2.0)))


def disc_psi_prime(sigma: np.ndarray | float) -> np.ndarray:
    """d/d eta of disc_logZ with eta = -1/(2 sigma^2); equals E[rho^2]."""
    sigma = np.asarray(sigma, dtype=float)
    ratio = math.sqrt(2.0 / math.pi) * np.exp(-0.5 * sigma**2) / erf(sigma / math.sqrt(2.0))
    return sigma**2 + sigma**4 + sigma**3 * ratio


def toeplitz_logZ(n: int, sigma: np.ndarray | float) -> np.ndarray:
    """log Z for T_n up to an additive constant."""
    sigma = np.asarray(sigma, dtype=float)
    if np.any(sigma <= 0):
        raise ValidationError("sigma must be positive")
    total = np.log(sigma / math.sqrt(n))
    for weight in disc_weights(n):
        total = total + disc_logZ(sigma / math.sqrt(weight))
    return total


def toeplitz_psi_prime(n: int, sigma: np.ndarray | float) -> np.ndarray:
    sigma = np.asarray(sigma, dtype=float)
    total = sigma**2
    for weight in disc_weights(n):
        total = total + weight * disc_psi_prime(sigma / math.sqrt(weight))
    return total


# Sampling


def toeplitz_sample_disc_radius(
    sigma: float, seed: utils.SeedLike = None, size: int | None = None
) -> np.ndarray | float:
    """Exact draws from p(rho) ~ exp(-rho^2 / 2 sigma^2) sinh|rho| on the real line.

    On rho > 0 the density is N(sigma^2, sigma^2) truncated to rho > 0 times (1 - e^{-2 rho}), so a truncated
    normal proposal accepted with probability 1 - e^{-2 rho} is exact. The sign is uniform.
    """
    if sigma <= 0:
        raise ValidationError("sigma must be positive")
    rng = utils.as_generator(seed)
    count = 1 if size is None else int(size)
    proposal = truncnorm(-sigma, np.inf, loc=sigma * sigma, scale=sigma)
    out = np.empty(count)
    filled = 0
    rate = max(1.0 - math.exp(-2.0 * sigma * sigma), 1e-4)
    while filled < count:
        batch = int(min(max(64, 1.5 * (count - filled) / rate), 2_000_000))
        rho = proposal.rvs(size=batch, random_state=rng)
        keep = rho[rng.random(batch) < -np.expm1(-2.0 * rho)]
        take = min(keep.size, count - filled)
        out[filled : filled + take] = keep[:take]
        filled += take
    out *= rng.choice((-1.0, 1.0), size=count)
    return float(out[0]) if size is None else out


def toeplitz_sample_many(
    c_bar: ToeplitzCoords, sigma: float, count: int, seed: utils.SeedLike = None
) -> ToeplitzCoords:
    if sigma <= 0:
        raise ValidationError("sigma must be positive")
    rng = utils.as_generator(seed)
    n = c_bar.n
    t = np.log(float(c_bar.r)) + (sigma / math.sqrt(n)) * rng.standard_normal(count)
    alphas = np.empty((count, n - 1), dtype=complex)
    for j, weight in enumerate(disc_weights(n)):
        theta = rng.uniform(0.0, 2.0 * np.pi, count)
        rho = np.asarray(toeplitz_sample_disc_radius(sigma / math.sqrt(weight), rng, count))
        w = np.tanh(rho) * np.exp(1j * theta)
        alphas[:, j] = cap_disc(disc_translate(c_bar.alphas[j], w))
    return ToeplitzCoords(np.exp(t), alphas)


def toeplitz_sample(c_bar: ToeplitzCoords, sigma: float, seed: utils.SeedLike = None) -> ToeplitzCoords:
    return toeplitz_sample_many(c_bar, sigma, 1, seed)[0]
