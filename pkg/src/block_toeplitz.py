"""block_toeplitz.py - Block-Toeplitz HPD matrices, the Siegel disc and their Gaussian distributions.

Copyright (C) 2026 rsgauss developers

An nN x nN block-Toeplitz HPD matrix with blocks R_{i-j} (R_{-k} = R_k^H) is parameterised by its N x N
Toeplitz diagonal block P = R_0 and n - 1 complex symmetric contractions Omega_j in the Siegel disc D_N.
Symmetric Omega_j correspond exactly to persymmetric blocks (J R_k J = R_k^T); for N <= 2 these are the
Toeplitz blocks, for N >= 3 the persymmetric ones.
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
import threading
from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np

import constants
import matfun
import sampling
import toeplitz
import utils
import zinterp
from errors import NumericalError, ValidationError
from toeplitz import ToeplitzCoords

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SiegelPoint:
    omega: np.ndarray

    @classmethod
    def create(cls, omega: np.ndarray | list[list[complex]]) -> SiegelPoint:
        return cls(check_siegel(np.asarray(omega, dtype=complex)))

    @property
    def N(self) -> int:
        return self.omega.shape[-1]


@dataclass(frozen=True)
class BlockToeplitzCoords:
    """p: ToeplitzCoords of size N; omegas: batch shape plus (n - 1, N, N)."""

    p: ToeplitzCoords
    omegas: np.ndarray

    @classmethod
    def create(cls, p: ToeplitzCoords, omegas: np.ndarray | None = None, n: int | None = None) -> BlockToeplitzCoords:
        if omegas is None:
            omegas = np.zeros(p.batch_shape + (max((n or 1) - 1, 0), p.n, p.n), dtype=complex)
        coords = cls(p, np.asarray(omegas, dtype=complex))
        coords.validate()
        return coords

    @classmethod
    def identity(cls, n: int, N: int) -> BlockToeplitzCoords:
        return cls(ToeplitzCoords.identity(N), np.zeros((n - 1, N, N), dtype=complex))

    @classmethod
    def from_toeplitz(cls, c: ToeplitzCoords) -> BlockToeplitzCoords:
        """The N = 1 embedding of Toeplitz coordinates."""
        return cls(ToeplitzCoords(c.r, np.zeros(c.batch_shape + (0,), dtype=complex)), c.alphas[..., None, None])

    def to_toeplitz(self) -> ToeplitzCoords:
        if self.N != 1:
            raise ValidationError(f"Only N = 1 block coordinates are scalar Toeplitz coordinates (N={self.N})")
        return ToeplitzCoords(self.p.r, self.omegas[..., 0, 0])

    @property
    def n(self) -> int:
        return self.omegas.shape[-3] + 1

    @property
    def N(self) -> int:
        return self.p.n

    @property
    def batch_shape(self) -> tuple[int, ...]:
        return self.p.batch_shape

    def validate(self) -> None:
        self.p.validate()
        if self.omegas.ndim < 3 or self.omegas.shape[-2:] != (self.N, self.N):
            raise ValidationError(f"omegas must have shape (..., n - 1, {self.N}, {self.N}), got {self.omegas.shape}")
        if self.omegas.shape[:-3] != self.batch_shape:
            raise ValidationError(f"omegas batch shape {self.omegas.shape[:-3]} != {self.batch_shape}")
        if self.omegas.shape[-3] > 0:
            check_siegel(self.omegas)

    def __getitem__(self, index: int | slice | np.ndarray) -> BlockToeplitzCoords:
        return BlockToeplitzCoords(self.p[index], self.omegas[index])

    def __len__(self) -> int:
        return len(self.p)


def stack_block_coords(items: list[BlockToeplitzCoords]) -> BlockToeplitzCoords:
    return BlockToeplitzCoords(toeplitz.stack_coords([c.p for c in items]), np.stack([c.omegas for c in items]))


def check_same_shape(c1: BlockToeplitzCoords, c2: BlockToeplitzCoords) -> None:
    if (c1.n, c1.N) != (c2.n, c2.N):
        raise ValidationError(f"Block-Toeplitz shape mismatch: {c1.n}x{c1.N} != {c2.n}x{c2.N}")


# Siegel disc


def _largest_singular(omega: np.ndarray) -> np.ndarray:
    return np.linalg.svd(omega, compute_uv=False)[..., 0]


def check_siegel(omega: np.ndarray) -> np.ndarray:
    omega = matfun.check_symmetric(np.asarray(omega, dtype=complex))
    if omega.size and np.any(_largest_singular(omega) >= 1.0):
        raise ValidationError("Matrix lies outside the Siegel disc (spectral norm >= 1)")
    return omega


def _left_root(omega: np.ndarray) -> np.ndarray:
    """(I - Omega conj(Omega))^{-1/2}."""
    n = omega.shape[-1]
    return matfun.hermitian_invsqrt(np.eye(n) - omega @ np.conj(omega), check=False)


def siegel_element(omega: np.ndarray) -> np.ndarray:
    """Transvection U(Omega) as a 2N x 2N matrix [[A, B], [C, D]]; U(Omega) . 0 = Omega, inverse U(-Omega)."""
    omega = np.asarray(omega, dtype=complex)
    n = omega.shape[-1]
    left = _left_root(omega)
    right = np.conj(left)
    g = np.empty(omega.shape[:-2] + (2 * n, 2 * n), dtype=complex)
    g[..., :n, :n] = left
    g[..., :n, n:] = omega @ right
    g[..., n:, :n] = np.conj(omega) @ left
    g[..., n:, n:] = right
    return g


def siegel_rotation(theta: np.ndarray) -> np.ndarray:
    """The isotropy element Z -> Theta Z Theta^T as [[Theta, 0], [0, conj(Theta)]]."""
    theta = np.asarray(theta, dtype=complex)
    n = theta.shape[-1]
    g = np.zeros(theta.shape[:-2] + (2 * n, 2 * n), dtype=complex)
    g[..., :n, :n] = theta
    g[..., n:, n:] = np.conj(theta)
    return g


def check_siegel_group(g: np.ndarray, tol: float = constants.GROUP_TOL) -> np.ndarray:
    """Check U^T J U = J and U^H K U = K with J = [[0, -I], [I, 0]], K = diag(-I, I)."""
    g = matfun.check_square(np.asarray(g, dtype=complex), "Siegel group element")
    if g.shape[-1] % 2:
        raise ValidationError(f"Siegel group element must be 2N x 2N, got {g.shape}")
    n = g.shape[-1] // 2
    eye = np.eye(n)
    zero = np.zeros((n, n))
    j = np.block([[zero, -eye], [eye, zero]])
    k = np.block([[-eye, zero], [zero, eye]])
    symplectic = np.max(np.abs(matfun.transpose(g) @ j @ g - j), initial=0.0)
    pseudo_unitary = np.max(np.abs(matfun.dagger(g) @ k @ g - k), initial=0.0)
    tol = tol * max(1.0, float(np.max(np.abs(g), initial=0.0)) ** 2)
    if symplectic > tol or pseudo_unitary > tol:
        raise ValidationError(
            f"Matrix is not in the Siegel disc group (residuals {symplectic:.2e}, {pseudo_unitary:.2e})"
        )
    return g


def siegel_act(g: np.ndarray, z: np.ndarray) -> np.ndarray:
    """(A Z + B)(C Z + D)^{-1}; raises NumericalError if rounding pushes the result out of the disc."""
    z = np.asarray(z, dtype=complex)
    n = z.shape[-1]
    a, b, c, d = g[..., :n, :n], g[..., :n, n:], g[..., n:, :n], g[..., n:, n:]
    num = a @ z + b
    den = c @ z + d
    w = matfun.transpose(np.linalg.solve(matfun.transpose(den), matfun.transpose(num)))
    w = 0.5 * (w + matfun.transpose(w))
    if w.size and np.any(_largest_singular(w) >= 1.0):
        raise NumericalError("Siegel disc action left the disc (point too close to the boundary)")
    return w


def siegel_translate(omega: np.ndarray, z: np.ndarray) -> np.ndarray:
    return siegel_act(siegel_element(omega), z)


def siegel_rotate(theta: np.ndarray, z: np.ndarray) -> np.ndarray:
    return theta @ z @ matfun.transpose(theta)


def random_siegel(
    N: int, seed: utils.SeedLike = None, size: int | tuple[int, ...] | None = None, spread: float = 0.7
) -> np.ndarray:
    rng = utils.as_generator(seed)
    theta = matfun.sample_unitary(N, rng, size)
    s = np.tanh(spread * np.abs(rng.standard_normal(theta.shape[:-1])))
    return (theta * s[..., None, :]) @ matfun.transpose(theta)


def random_siegel_group(N: int, seed: utils.SeedLike = None, size: int | tuple[int, ...] | None = None) -> np.ndarray:
    rng = utils.as_generator(seed)
    return siegel_element(random_siegel(N, rng, size)) @ siegel_rotation(matfun.sample_unitary(N, rng, size))


def _omega(z: np.ndarray | SiegelPoint) -> np.ndarray:
    return z.omega if isinstance(z, SiegelPoint) else np.asarray(z, dtype=complex)


def siegel_distance2(phi: np.ndarray | SiegelPoint, psi: np.ndarray | SiegelPoint) -> np.ndarray:
    """tr atanh^2(R^{1/2}) with R = X conj(X), X = (Psi - Phi)(I - conj(Phi) Psi)^{-1}.

    R is similar to a Hermitian PSD matrix; its eigenvalues come from a general eigensolver and are clipped
    below 1 before atanh. A breach beyond SIEGEL_BREACH_TOL is an error.
    """
    phi = _omega(phi)
    psi = _omega(psi)
    if phi.shape[-2:] != psi.shape[-2:]:
        raise ValidationError(f"Siegel size mismatch: {phi.shape[-2:]} vs {psi.shape[-2:]}")
    n = phi.shape[-1]
    if n == 1:
        return toeplitz.disc_distance(phi[..., 0, 0], psi[..., 0, 0]) ** 2
    den = np.eye(n) - np.conj(phi) @ psi
    x = matfun.transpose(np.linalg.solve(matfun.transpose(den), matfun.transpose(psi - phi)))
    lam = np.clip(np.linalg.eigvals(x @ np.conj(x)).real, 0.0, None)
    if np.any(lam > 1.0 + constants.SIEGEL_BREACH_TOL):
        raise NumericalError(f"Siegel distance eigenvalue {np.max(lam):.3e} breaches the disc boundary")
    over = lam > constants.SIEGEL_CLIP
    if np.any(over):
        logger.warning(f"Clipped {int(over.sum())} Siegel eigenvalue(s) at the disc boundary")
        lam = np.minimum(lam, constants.SIEGEL_CLIP)
    return np.sum(np.arctanh(np.sqrt(lam)) ** 2, axis=-1)


def siegel_distance(phi: np.ndarray | SiegelPoint, psi: np.ndarray | SiegelPoint) -> np.ndarray:
    return np.sqrt(siegel_distance2(phi, psi))


def siegel_log0(omega: np.ndarray) -> np.ndarray:
    """Log at the origin: Theta diag(atanh s) Theta^T, a symmetric matrix with Frobenius norm d(0, Omega)."""
    theta, r = matfun.takagi(omega)
    return (theta * r[..., None, :]) @ matfun.transpose(theta)


def siegel_exp0(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    theta, s = matfun.takagi_factor(0.5 * (v + matfun.transpose(v)), check=False)
    return (theta * np.tanh(s)[..., None, :]) @ matfun.transpose(theta)


def siegel_log(base: np.ndarray, z: np.ndarray) -> np.ndarray:
    return siegel_log0(siegel_translate(-np.asarray(base), z))


def siegel_exp(base: np.ndarray, v: np.ndarray) -> np.ndarray:
    w = siegel_exp0(v)
    if w.size and np.any(_largest_singular(w) >= 1.0):
        raise NumericalError("Exponential map left the Siegel disc (tangent vector too long for double precision)")
    return siegel_translate(base, w)


# Coordinates and matrices


def _whittle_step(
    a: np.ndarray, b: np.ndarray, p: np.ndarray, q: np.ndarray, delta: np.ndarray, m: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Extend forward/backward predictors of order m by one block."""
    k_fwd = delta @ np.linalg.inv(q)
    k_bwd = matfun.dagger(delta) @ np.linalg.inv(p)
    a_new = a.copy()
    a_new[..., 1 : m + 2, :, :] -= k_fwd[..., None, :, :] @ b[..., : m + 1, :, :]
    b_new = np.zeros_like(b)
    b_new[..., 1 : m + 2, :, :] = b[..., : m + 1, :, :]
    b_new[..., : m + 1, :, :] -= k_bwd[..., None, :, :] @ a[..., : m + 1, :, :]
    p_new = matfun.hermitian_part(p - k_fwd @ matfun.dagger(delta))
    q_new = matfun.hermitian_part(q - k_bwd @ delta)
    return a_new, b_new, p_new, q_new


def _predictors(batch: tuple[int, ...], n: int, N: int, r0: np.ndarray) -> tuple[np.ndarray, ...]:
    a = np.zeros(batch + (n, N, N), dtype=complex)
    b = np.zeros(batch + (n, N, N), dtype=complex)
    a[..., 0, :, :] = np.eye(N)
    b[..., 0, :, :] = np.eye(N)
    return a, b, r0.copy(), r0.copy()


def block_coords_to_blocks(c: BlockToeplitzCoords) -> np.ndarray:
    """Inverse multichannel Levinson recursion; returns R_0 .. R_{n-1} with shape (..., n, N, N)."""
    n, N = c.n, c.N
    jx = matfun.exchange(N)
    blocks = np.zeros(c.batch_shape + (n, N, N), dtype=complex)
    blocks[..., 0, :, :] = toeplitz.coords_to_matrix(c.p)
    a, b, p, q = _predictors(c.batch_shape, n, N, blocks[..., 0, :, :])
    for m in range(n - 1):
        root_p = matfun.hermitian_sqrt(p, check=False)
        delta = root_p @ c.omegas[..., m, :, :] @ jx @ matfun.hermitian_sqrt(q, check=False)
        # R_{m+1}^H = Delta - sum_{i=1..m} A_i R_{m+1-i}^H
        tail = np.sum(a[..., 1 : m + 1, :, :] @ matfun.dagger(blocks[..., m:0:-1, :, :]), axis=-3)
        blocks[..., m + 1, :, :] = matfun.dagger(delta - tail)
        a, b, p, q = _whittle_step(a, b, p, q, delta, m)
    return blocks


def blocks_to_matrix(blocks: np.ndarray) -> np.ndarray:
    n, N = blocks.shape[-3], blocks.shape[-1]
    t = np.empty(blocks.shape[:-3] + (n * N, n * N), dtype=complex)
    for i in range(n):
        for j in range(n):
            block = blocks[..., i - j, :, :] if i >= j else matfun.dagger(blocks[..., j - i, :, :])
            t[..., i * N : (i + 1) * N, j * N : (j + 1) * N] = block
    return t


def block_coords_to_matrix(c: BlockToeplitzCoords) -> np.ndarray:
    return blocks_to_matrix(block_coords_to_blocks(c))


def _check_persymmetric(blocks: np.ndarray) -> None:
    jx = matfun.exchange(blocks.shape[-1])
    flipped = jx @ blocks @ jx
    scale = max(1.0, float(np.max(np.abs(blocks), initial=0.0)))
    residual = float(np.max(np.abs(flipped - matfun.transpose(blocks)), initial=0.0))
    if residual > constants.PERSYMMETRIC_TOL * scale:
        raise ValidationError(f"Off-diagonal blocks are not persymmetric (residual {residual:.2e})")


def block_matrix_to_coords(t: np.ndarray, N: int, tol: float = constants.RECONSTRUCTION_TOL) -> BlockToeplitzCoords:
    """Multichannel Levinson recursion on an nN x nN block-Toeplitz HPD matrix with N x N blocks."""
    t = matfun.check_hermitian(np.asarray(t, dtype=complex))
    size = t.shape[-1]
    if N < 1 or size % N:
        raise ValidationError(f"Matrix size {size} is not a multiple of the block size {N}")
    n = size // N
    batch = t.shape[:-2]
    blocks = np.stack([t[..., k * N : (k + 1) * N, :N] for k in range(n)], axis=-3)
    if np.max(np.abs(blocks_to_matrix(blocks) - t), initial=0.0) > tol * max(1.0, float(np.max(np.abs(t)))):
        raise ValidationError("Matrix is not block-Toeplitz")
    p_coords = toeplitz.matrix_to_coords(blocks[..., 0, :, :])
    if n > 1:
        _check_persymmetric(blocks[..., 1:, :, :])
    jx = matfun.exchange(N)
    omegas = np.zeros(batch + (n - 1, N, N), dtype=complex)
    a, b, p, q = _predictors(batch, n, N, blocks[..., 0, :, :])
    for m in range(n - 1):
        # Delta = sum_{i=0..m} A_i R_{m+1-i}^H
        delta = np.sum(a[..., : m + 1, :, :] @ matfun.dagger(blocks[..., m + 1 : 0 : -1, :, :]), axis=-3)
        try:
            omega = (
                matfun.hermitian_invsqrt(p, check=False) @ delta @ matfun.hermitian_invsqrt(q, check=False) @ jx
            )
        except ValidationError as e:
            raise ValidationError(f"Block-Toeplitz matrix is not positive definite (order {m + 1})") from e
        try:
            omega = matfun.check_symmetric(omega, tol=constants.PERSYMMETRIC_TOL)
        except ValidationError as e:
            raise ValidationError(f"Reflection coefficient {m + 1} is not symmetric") from e
        omega = 0.5 * (omega + matfun.transpose(omega))
        if np.any(_largest_singular(omega) >= 1.0):
            raise ValidationError(f"Reflection coefficient {m + 1} is not contractive (matrix not positive definite)")
        omegas[..., m, :, :] = omega
        a, b, p, q = _whittle_step(a, b, p, q, delta, m)
    logger.debug(f"Converted {n}x{n} block-Toeplitz matrix with {N}x{N} blocks to reflection coordinates")
    return BlockToeplitzCoords(p_coords, omegas)


def block_log_det(c: BlockToeplitzCoords) -> np.ndarray:
    """log det T = n log det T_0 + sum_j (n - j) log det(I - Omega_j^H Omega_j)."""
    total = c.n * toeplitz.toeplitz_log_det(c.p)
    if c.n > 1:
        eye = np.eye(c.N)
        _, logdet = np.linalg.slogdet(eye - matfun.dagger(c.omegas) @ c.omegas)
        total = total + np.sum(toeplitz.disc_weights(c.n) * logdet, axis=-1)
    return total


# Geometry


def block_toeplitz_distance2(c1: BlockToeplitzCoords, c2: BlockToeplitzCoords) -> np.ndarray:
    check_same_shape(c1, c2)
    total = c1.n * toeplitz.toeplitz_distance2(c1.p, c2.p)
    if c1.n > 1:
        total = total + np.sum(toeplitz.disc_weights(c1.n) * siegel_distance2(c1.omegas, c2.omegas), axis=-1)
    return total


def block_toeplitz_distance(c1: BlockToeplitzCoords, c2: BlockToeplitzCoords) -> np.ndarray:
    return np.sqrt(block_toeplitz_distance2(c1, c2))


def block_toeplitz_act(
    scale: float, discs: np.ndarray, siegel: np.ndarray, c: BlockToeplitzCoords
) -> BlockToeplitzCoords:
    """(s, u_1 .. u_{N-1}, U_1 .. U_{n-1}) . (P, Omega) = (s, u) . P, U_j . Omega_j."""
    p = toeplitz.toeplitz_act(scale, discs, c.p)
    omegas = siegel_act(siegel, c.omegas) if c.n > 1 else c.omegas
    return BlockToeplitzCoords(p, omegas)


# Polar density and normalising factor


def _log_siegel_weight(r: np.ndarray) -> np.ndarray:
    n = r.shape[-1]
    i, j = np.triu_indices(n, k=1)
    ii, jj = np.triu_indices(n, k=0)
    diff = np.sum(matfun.log_sinh(np.abs(r[..., i] - r[..., j])), axis=-1)
    total = np.sum(matfun.log_sinh(np.abs(r[..., ii] + r[..., jj])), axis=-1)
    return diff + total


def siegel_logdensity_polar(r: np.ndarray | list[float], sigma: float) -> np.ndarray:
    """-|r|^2/2 sigma^2 + sum_{i<j} log sinh|r_i - r_j| + sum_{i<=j} log sinh|r_i + r_j|."""
    if sigma <= 0:
        raise ValidationError("sigma must be positive")
    r = np.asarray(r, dtype=float)
    return -np.sum(r * r, axis=-1) / (2.0 * sigma * sigma) + _log_siegel_weight(r)


def siegel_polar_integrand(N: int) -> sampling.PolarIntegrand:
    """Chamber r_1 > .. > r_N > 0, Weyl group of order 2^N N!, asymptotic slope 2N + 2 - 2k."""
    return sampling.PolarIntegrand(
        dim=N,
        log_g=_log_siegel_weight,
        shift=np.arange(2 * N, 0, -2, dtype=float),
        group_order=2**N * math.factorial(N),
        in_chamber=lambda r: np.all(np.diff(r, axis=-1) < 0, axis=-1) & (r[..., -1] > 0),
    )


def siegel_z_montecarlo_grid(
    N: int,
    sigmas: np.ndarray,
    samples: int,
    seed: utils.SeedLike = None,
    threads: int = 1,
    proposal: str = "auto",
) -> sampling.PolarEstimate:
    logger.info(f"Monte Carlo log Z for D_{N} on {np.size(sigmas)} sigma values ({samples} draws)")
    return sampling.polar_logz(siegel_polar_integrand(N), sigmas, samples, seed, threads, proposal)


def siegel_z_montecarlo(
    N: int, sigma: float, samples: int, seed: utils.SeedLike = None, threads: int = 1
) -> tuple[float, float]:
    estimate = siegel_z_montecarlo_grid(N, np.array([sigma]), samples, seed, threads)
    return float(estimate.logz[0]), float(estimate.stderr[0])


@dataclass(frozen=True)
class SiegelTable:
    """Tabulated log Z and psi' of the D_N factor on a sigma grid."""

    N: int
    sigma: np.ndarray
    logz: np.ndarray
    psi_prime: np.ndarray
    stderr: np.ndarray
    samples: int
    seed: int | None
    interp: zinterp.LogZInterpolant = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        zinterp.check_convexity(self.sigma, self.logz, self.stderr)
        object.__setattr__(self, "interp", zinterp.LogZInterpolant(self.sigma, self.logz, self.psi_prime))


_siegel_tables: OrderedDict[tuple[int, float, float, int, int, int | None], SiegelTable] = OrderedDict()
_siegel_lock = threading.Lock()


def siegel_ztable(
    N: int,
    grid: np.ndarray | None = None,
    samples: int = constants.MC_SAMPLES,
    seed: int | None = constants.SEED,
    threads: int = 1,
) -> SiegelTable:
    """Monte Carlo table of log Z_{D_N}, cached per (N, grid, samples, seed)."""
    grid = utils.default_grid() if grid is None else np.asarray(grid, dtype=float)
    key = (N, float(grid[0]), float(grid[-1]), int(grid.size), samples, seed)
    with _siegel_lock:
        table = _siegel_tables.get(key)
        if table is None:
            estimate = siegel_z_montecarlo_grid(N, grid, samples, seed, threads)
            slopes = zinterp.monotone_slopes(grid, estimate.logz)
            table = SiegelTable(N, grid, estimate.logz, slopes, estimate.stderr, samples, seed)
            _siegel_tables[key] = table
            while len(_siegel_tables) > constants.SIEGEL_CACHE_SIZE:
                dropped, _ = _siegel_tables.popitem(last=False)
                logger.debug(f"Dropping cached D_{dropped[0]} table")
        else:
            _siegel_tables.move_to_end(key)
            logger.debug(f"Reusing cached D_{N} table")
    return table


def siegel_grid_for(n: int, grid: np.ndarray) -> np.ndarray:
    """Sigma grid covering every rescaled factor sigma / sqrt(n - j) of a block-Toeplitz grid."""
    if n <= 2:
        return np.asarray(grid, dtype=float)
    ratio = grid[1] / grid[0]
    extra = int(math.ceil(0.5 * math.log(n - 1) / math.log(ratio)))
    return utils.log_grid(float(grid[0]) / math.sqrt(n - 1), float(grid[-1]), int(grid.size) + extra)


def _default_table(n: int, N: int) -> SiegelTable:
    return siegel_ztable(N, siegel_grid_for(n, utils.default_grid()))


def block_toeplitz_logZ(n: int, N: int, sigma: np.ndarray | float, table: SiegelTable | None = None) -> np.ndarray:
    """log Z_{T_N}(sigma / sqrt n) + sum_j log Z_{D_N}(sigma / sqrt(n - j)), up to a constant."""
    sigma = np.asarray(sigma, dtype=float)
    if np.any(sigma <= 0):
        raise ValidationError("sigma must be positive")
    if N == 1:
        return toeplitz.toeplitz_logZ(n, sigma)
    total = toeplitz.toeplitz_logZ(N, sigma / math.sqrt(n))
    if n > 1:
        table = table or _default_table(n, N)
        for weight in toeplitz.disc_weights(n):
            total = total + table.interp.logz(sigma / math.sqrt(weight))
    return total


def block_toeplitz_psi_prime(
    n: int, N: int, sigma: np.ndarray | float, table: SiegelTable | None = None
) -> np.ndarray:
    sigma = np.asarray(sigma, dtype=float)
    if N == 1:
        return toeplitz.toeplitz_psi_prime(n, sigma)
    total = n * toeplitz.toeplitz_psi_prime(N, sigma / math.sqrt(n))
    if n > 1:
        table = table or _default_table(n, N)
        for weight in toeplitz.disc_weights(n):
            total = total + weight * table.interp.psi_prime_sigma(sigma / math.sqrt(weight))
    return total


# Sampling


def siegel_sample_polar_r_many(
    N: int, sigma: float, count: int, seed: utils.SeedLike = None, mh_cfg: sampling.MhConfig | None = None
) -> tuple[np.ndarray, sampling.MhDiagnostics]:
    """Chamber representatives |r| sorted descending; the density is invariant under signs and permutations."""
    if sigma <= 0:
        raise ValidationError("sigma must be positive")
    r, diagnostics = sampling.metropolis(
        lambda x: siegel_logdensity_polar(x, sigma), N, count, sigma, utils.as_generator(seed), mh_cfg
    )
    return -np.sort(-np.abs(r), axis=-1), diagnostics


def siegel_sample_origin(
    N: int, sigma: float, count: int, seed: utils.SeedLike = None, mh_cfg: sampling.MhConfig | None = None
) -> np.ndarray:
    """Draws Theta tanh(r) Theta^T centred at 0.

    Theta is a special unitary times a uniform phase, which makes it Haar on U(N); with Theta restricted to
    SU(N) alone det(Omega) would always be real.
    """
    rng = utils.as_generator(seed)
    r, _ = siegel_sample_polar_r_many(N, sigma, count, rng, mh_cfg)
    theta = matfun.sample_special_unitary(N, rng, count)
    theta = theta * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, count))[:, None, None]
    s = np.minimum(np.tanh(r), constants.DISC_CAP)
    return (theta * s[:, None, :]) @ matfun.transpose(theta)


def block_toeplitz_sample_many(
    c_bar: BlockToeplitzCoords,
    sigma: float,
    count: int,
    seed: utils.SeedLike = None,
    mh_cfg: sampling.MhConfig | None = None,
) -> BlockToeplitzCoords:
    if sigma <= 0:
        raise ValidationError("sigma must be positive")
    rng = utils.as_generator(seed)
    n, N = c_bar.n, c_bar.N
    if N == 1:
        return BlockToeplitzCoords.from_toeplitz(toeplitz.toeplitz_sample_many(c_bar.to_toeplitz(), sigma, count, rng))
    p = toeplitz.toeplitz_sample_many(c_bar.p, sigma / math.sqrt(n), count, rng)
    omegas = np.empty((count, n - 1, N, N), dtype=complex)
    for j, weight in enumerate(toeplitz.disc_weights(n)):
        w = siegel_sample_origin(N, sigma / math.sqrt(weight), count, rng, mh_cfg)
        omegas[:, j] = siegel_translate(c_bar.omegas[j], w)
    return BlockToeplitzCoords(p, omegas)


def block_toeplitz_sample(
    c_bar: BlockToeplitzCoords, sigma: float, seed: utils.SeedLike = None, mh_cfg: sampling.MhConfig | None = None
) -> BlockToeplitzCoords:
    return block_toeplitz_sample_many(c_bar, sigma, 1, seed, mh_cfg)[0]
