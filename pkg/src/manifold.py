"""manifold.py - Points, distances, tangent maps, group actions and barycentres on the three spaces.

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
import math
import re
from collections.abc import Iterator
from dataclasses import dataclass
from enum import Enum
from typing import Any, Union

import numpy as np

import block_toeplitz
import constants
import hpd
import matfun
import toeplitz
import utils
from block_toeplitz import BlockToeplitzCoords
from errors import ConvergenceError, ValidationError
from toeplitz import ToeplitzCoords

logger = logging.getLogger(__name__)

Payload = Union[np.ndarray, ToeplitzCoords, BlockToeplitzCoords]


class ManifoldKind(Enum):
    HPD = "hpd"
    TOEPLITZ = "toeplitz"
    BLOCK_TOEPLITZ = "block"
    # Standalone Siegel disc factor; only its normalising curve is tabulated.
    SIEGEL = "siegel"


@dataclass(frozen=True)
class ManifoldId:
    kind: ManifoldKind
    n: int
    N: int = 1

    def __post_init__(self) -> None:
        if self.n < 1 or self.N < 1:
            raise ValidationError(f"Manifold sizes must be >= 1, got n={self.n}, N={self.N}")
        if self.kind in (ManifoldKind.HPD, ManifoldKind.TOEPLITZ, ManifoldKind.SIEGEL) and self.N != 1:
            raise ValidationError(f"{self.kind.value} manifolds take a single size")

    @classmethod
    def hpd(cls, n: int) -> ManifoldId:
        return cls(ManifoldKind.HPD, n)

    @classmethod
    def toeplitz(cls, n: int) -> ManifoldId:
        return cls(ManifoldKind.TOEPLITZ, n)

    @classmethod
    def block(cls, n: int, N: int) -> ManifoldId:
        return cls(ManifoldKind.BLOCK_TOEPLITZ, n, N)

    @classmethod
    def siegel(cls, N: int) -> ManifoldId:
        return cls(ManifoldKind.SIEGEL, N)

    @classmethod
    def parse(cls, text: str) -> ManifoldId:
        """Parse "hpd:3", "toeplitz:20", "block:3x2" or "siegel:2"."""
        match = re.fullmatch(r"\s*(hpd|toeplitz|block|siegel)\s*:\s*(\d+)(?:\s*x\s*(\d+))?\s*", text)
        if match is None:
            raise ValidationError(f"Unknown manifold spec {text!r}")
        kind = ManifoldKind(match.group(1))
        n = int(match.group(2))
        if kind is ManifoldKind.BLOCK_TOEPLITZ:
            if match.group(3) is None:
                raise ValidationError(f"Block-Toeplitz spec needs nxN, got {text!r}")
            return cls(kind, n, int(match.group(3)))
        if match.group(3) is not None:
            raise ValidationError(f"Manifold spec {text!r} takes a single size")
        return cls(kind, n)

    def __str__(self) -> str:
        if self.kind is ManifoldKind.BLOCK_TOEPLITZ:
            return f"block:{self.n}x{self.N}"
        return f"{self.kind.value}:{self.n}"

    @property
    def has_points(self) -> bool:
        return self.kind is not ManifoldKind.SIEGEL


def dimension(m: ManifoldId) -> int:
    """Real dimension of the manifold."""
    if m.kind is ManifoldKind.HPD:
        return m.n * m.n
    if m.kind is ManifoldKind.TOEPLITZ:
        return 2 * m.n - 1
    if m.kind is ManifoldKind.BLOCK_TOEPLITZ:
        return 2 * m.N - 1 + (m.n - 1) * (m.N * m.N + m.N)
    return m.n * m.n + m.n


def _require_points(m: ManifoldId) -> None:
    if not m.has_points:
        raise ValidationError(f"Manifold {m} only supports normalising-factor tables")


def _check_payload(m: ManifoldId, payload: Payload, batched: bool) -> Payload:
    _require_points(m)
    if m.kind is ManifoldKind.HPD:
        if not isinstance(payload, np.ndarray):
            raise ValidationError(f"{m} points must be matrices")
        payload = np.asarray(payload, dtype=complex)
        if payload.ndim != (3 if batched else 2) or payload.shape[-2:] != (m.n, m.n):
            raise ValidationError(f"{m} payload has shape {payload.shape}")
        return hpd.check_hpd(payload) if payload.size else payload
    if m.kind is ManifoldKind.TOEPLITZ:
        if not isinstance(payload, ToeplitzCoords):
            raise ValidationError(f"{m} points must be ToeplitzCoords")
        if payload.n != m.n or len(payload.batch_shape) != int(batched):
            raise ValidationError(f"{m} payload does not match (n={payload.n}, batch={payload.batch_shape})")
        payload.validate()
        return payload
    if not isinstance(payload, BlockToeplitzCoords):
        raise ValidationError(f"{m} points must be BlockToeplitzCoords")
    if (payload.n, payload.N) != (m.n, m.N) or len(payload.batch_shape) != int(batched):
        raise ValidationError(f"{m} payload does not match (n={payload.n}, N={payload.N})")
    payload.validate()
    return payload


@dataclass(frozen=True)
class ManifoldPoint:
    manifold: ManifoldId
    payload: Payload

    @classmethod
    def create(cls, manifold: ManifoldId, payload: Payload) -> ManifoldPoint:
        return cls(manifold, _check_payload(manifold, payload, batched=False))


def identity_point(m: ManifoldId) -> ManifoldPoint:
    """The origin: I, (1, 0, ..) or (I, 0, ..)."""
    _require_points(m)
    if m.kind is ManifoldKind.HPD:
        return ManifoldPoint(m, np.eye(m.n, dtype=complex))
    if m.kind is ManifoldKind.TOEPLITZ:
        return ManifoldPoint(m, ToeplitzCoords.identity(m.n))
    return ManifoldPoint(m, BlockToeplitzCoords.identity(m.n, m.N))


@dataclass(frozen=True)
class Dataset:
    """An ordered set of points stored as one stacked payload, with optional integer labels."""

    manifold: ManifoldId
    payload: Payload
    labels: np.ndarray | None = None

    @classmethod
    def create(cls, manifold: ManifoldId, payload: Payload, labels: Any = None) -> Dataset:
        payload = _check_payload(manifold, payload, batched=True)
        data = cls(manifold, payload, None if labels is None else np.asarray(labels, dtype=int))
        if data.labels is not None and data.labels.shape != (len(data),):
            raise ValidationError(f"Got {data.labels.size} labels for {len(data)} points")
        return data

    @classmethod
    def empty(cls, manifold: ManifoldId) -> Dataset:
        _require_points(manifold)
        if manifold.kind is ManifoldKind.HPD:
            return cls(manifold, np.zeros((0, manifold.n, manifold.n), dtype=complex))
        size = manifold.N if manifold.kind is ManifoldKind.BLOCK_TOEPLITZ else manifold.n
        p = ToeplitzCoords(np.zeros(0), np.zeros((0, size - 1), dtype=complex))
        if manifold.kind is ManifoldKind.TOEPLITZ:
            return cls(manifold, p)
        omegas = np.zeros((0, manifold.n - 1, manifold.N, manifold.N), dtype=complex)
        return cls(manifold, BlockToeplitzCoords(p, omegas))

    @classmethod
    def from_points(cls, points: list[ManifoldPoint], labels: Any = None) -> Dataset:
        if not points:
            raise ValidationError("Cannot infer the manifold of an empty point list")
        manifold = points[0].manifold
        if any(p.manifold != manifold for p in points):
            raise ValidationError("Dataset points lie on different manifolds")
        if manifold.kind is ManifoldKind.HPD:
            payload: Payload = np.stack([p.payload for p in points])
        elif manifold.kind is ManifoldKind.TOEPLITZ:
            payload = toeplitz.stack_coords([p.payload for p in points])
        else:
            payload = block_toeplitz.stack_block_coords([p.payload for p in points])
        return cls.create(manifold, payload, labels)

    def __len__(self) -> int:
        if isinstance(self.payload, np.ndarray):
            return self.payload.shape[0]
        return len(self.payload)

    def __getitem__(self, index: int) -> ManifoldPoint:
        return ManifoldPoint(self.manifold, self.payload[index])

    def __iter__(self) -> Iterator[ManifoldPoint]:
        return (self[i] for i in range(len(self)))

    def stack(self) -> Payload:
        return self.payload

    def subset(self, index: np.ndarray | list[int] | slice) -> Dataset:
        if not isinstance(index, slice):
            index = np.asarray(index)
            if index.dtype == bool:
                index = np.flatnonzero(index)
        labels = None if self.labels is None else self.labels[index]
        return Dataset(self.manifold, self.payload[index], labels)

    def with_labels(self, labels: Any) -> Dataset:
        return Dataset.create(self.manifold, self.payload, labels)


def _check_same(x: ManifoldPoint | Dataset, y: ManifoldPoint | Dataset) -> None:
    if x.manifold != y.manifold:
        raise ValidationError(f"Manifold mismatch: {x.manifold} vs {y.manifold}")


def _distance2(m: ManifoldId, a: Payload, b: Payload) -> np.ndarray:
    if m.kind is ManifoldKind.HPD:
        return hpd.hpd_distance2(a, b)
    if m.kind is ManifoldKind.TOEPLITZ:
        return toeplitz.toeplitz_distance2(a, b)
    return block_toeplitz.block_toeplitz_distance2(a, b)


def distance2(x: ManifoldPoint, y: ManifoldPoint) -> float:
    _check_same(x, y)
    return float(_distance2(x.manifold, x.payload, y.payload))


def distance(x: ManifoldPoint, y: ManifoldPoint) -> float:
    return math.sqrt(distance2(x, y))


def distances2_to(data: Dataset, x: ManifoldPoint) -> np.ndarray:
    """Squared distances from every point of `data` to x, shape (len(data),)."""
    _check_same(data, x)
    if len(data) == 0:
        return np.zeros(0)
    d2 = np.asarray(_distance2(data.manifold, x.payload, data.payload), dtype=float)
    if not np.all(np.isfinite(d2)):
        raise ValidationError("Non-finite distance")
    return d2


# Tangent vectors


@dataclass(frozen=True)
class TangentVector:
    """Tangent vector in the frame transported from the origin to `base`.

    Components: HPD (W,) with W Hermitian and whitened; Toeplitz (t, v) with t the log-scale part and v the disc
    parts; block-Toeplitz (t, v, V) with (t, v) for the diagonal block and V the Siegel parts.
    """

    base: ManifoldPoint
    components: tuple[np.ndarray, ...]

    def __add__(self, other: TangentVector) -> TangentVector:
        _check_same(self.base, other.base)
        return TangentVector(self.base, tuple(a + b for a, b in zip(self.components, other.components)))

    def __mul__(self, c: float) -> TangentVector:
        return TangentVector(self.base, tuple(c * a for a in self.components))

    __rmul__ = __mul__


def zero_vector(x: ManifoldPoint) -> TangentVector:
    m = x.manifold
    if m.kind is ManifoldKind.HPD:
        return TangentVector(x, (np.zeros((m.n, m.n), dtype=complex),))
    if m.kind is ManifoldKind.TOEPLITZ:
        return TangentVector(x, (np.zeros(()), np.zeros(m.n - 1, dtype=complex)))
    return TangentVector(
        x, (np.zeros(()), np.zeros(m.N - 1, dtype=complex), np.zeros((m.n - 1, m.N, m.N), dtype=complex))
    )


def _toeplitz_inner(n: int, t1: np.ndarray, v1: np.ndarray, t2: np.ndarray, v2: np.ndarray) -> float:
    return float(n * t1 * t2 + np.sum(toeplitz.disc_weights(n) * np.real(np.conj(v1) * v2)))


def inner(v: TangentVector, w: TangentVector) -> float:
    """Riemannian inner product; factor weights n and n - j."""
    _check_same(v.base, w.base)
    m = v.base.manifold
    if m.kind is ManifoldKind.HPD:
        return float(np.real(np.sum(np.conj(v.components[0]) * w.components[0])))
    if m.kind is ManifoldKind.TOEPLITZ:
        return _toeplitz_inner(m.n, *v.components, *w.components)
    scale = m.n * _toeplitz_inner(m.N, v.components[0], v.components[1], w.components[0], w.components[1])
    siegel = np.real(np.sum(np.conj(v.components[2]) * w.components[2], axis=(-2, -1)))
    return float(scale + np.sum(toeplitz.disc_weights(m.n) * siegel))


def norm(v: TangentVector) -> float:
    return math.sqrt(max(inner(v, v), 0.0))


def _toeplitz_log(base: ToeplitzCoords, c: ToeplitzCoords) -> tuple[np.ndarray, np.ndarray]:
    return np.log(c.r) - np.log(base.r), toeplitz.disc_log(base.alphas, c.alphas)


def _toeplitz_exp(base: ToeplitzCoords, t: np.ndarray, v: np.ndarray) -> ToeplitzCoords:
    return ToeplitzCoords(base.r * np.exp(t), toeplitz.disc_exp(base.alphas, v))


def log_map(x: ManifoldPoint, y: ManifoldPoint) -> TangentVector:
    _check_same(x, y)
    m = x.manifold
    if m.kind is ManifoldKind.HPD:
        return TangentVector(x, (hpd.hpd_log(x.payload, y.payload),))
    if m.kind is ManifoldKind.TOEPLITZ:
        return TangentVector(x, _toeplitz_log(x.payload, y.payload))
    t, v = _toeplitz_log(x.payload.p, y.payload.p)
    if m.n == 1:
        return TangentVector(x, (t, v, np.zeros((0, m.N, m.N), dtype=complex)))
    return TangentVector(x, (t, v, block_toeplitz.siegel_log(x.payload.omegas, y.payload.omegas)))


def exp_map(x: ManifoldPoint, v: TangentVector) -> ManifoldPoint:
    if v.base.manifold != x.manifold:
        raise ValidationError("Tangent vector is based on another manifold")
    m = x.manifold
    if m.kind is ManifoldKind.HPD:
        return ManifoldPoint(m, hpd.hpd_exp(x.payload, v.components[0]))
    if m.kind is ManifoldKind.TOEPLITZ:
        return ManifoldPoint(m, _toeplitz_exp(x.payload, *v.components))
    p = _toeplitz_exp(x.payload.p, v.components[0], v.components[1])
    omegas = block_toeplitz.siegel_exp(x.payload.omegas, v.components[2]) if m.n > 1 else x.payload.omegas
    return ManifoldPoint(m, BlockToeplitzCoords(p, omegas))


# Group actions


@dataclass(frozen=True)
class GroupElement:
    """An isometry. parts: HPD (g,); Toeplitz (scale, su11 stack); block (toeplitz element parts, siegel stack)."""

    manifold: ManifoldId
    parts: tuple[Any, ...]

    @classmethod
    def congruence(cls, g: np.ndarray) -> GroupElement:
        g = matfun.check_square(np.asarray(g, dtype=complex), "congruence matrix")
        if abs(np.linalg.det(g)) == 0:
            raise ValidationError("Congruence matrix is singular")
        return cls(ManifoldId.hpd(g.shape[-1]), (g,))

    @classmethod
    def toeplitz(cls, scale: float, discs: np.ndarray) -> GroupElement:
        if not scale > 0:
            raise ValidationError("Toeplitz group scale must be positive")
        discs = np.asarray(discs, dtype=complex).reshape(-1, 2, 2)
        if discs.shape[0]:
            toeplitz.check_su11(discs)
        return cls(ManifoldId.toeplitz(discs.shape[0] + 1), (float(scale), discs))

    @classmethod
    def block(cls, p_elem: GroupElement, siegel: np.ndarray) -> GroupElement:
        if p_elem.manifold.kind is not ManifoldKind.TOEPLITZ:
            raise ValidationError("Block group element needs a Toeplitz element for the diagonal block")
        N = p_elem.manifold.n
        siegel = np.asarray(siegel, dtype=complex).reshape(-1, 2 * N, 2 * N)
        if siegel.shape[0]:
            block_toeplitz.check_siegel_group(siegel)
        return cls(ManifoldId.block(siegel.shape[0] + 1, N), (p_elem, siegel))

    @classmethod
    def identity(cls, m: ManifoldId) -> GroupElement:
        return cls.translation(identity_point(m))

    @classmethod
    def translation(cls, x: ManifoldPoint) -> GroupElement:
        """An element with g . o = x."""
        m = x.manifold
        if m.kind is ManifoldKind.HPD:
            return cls(m, (matfun.hermitian_sqrt(x.payload),))
        if m.kind is ManifoldKind.TOEPLITZ:
            return cls(m, (float(x.payload.r), toeplitz.su11_element(x.payload.alphas)))
        p = cls.translation(ManifoldPoint(ManifoldId.toeplitz(m.N), x.payload.p))
        if m.n == 1:
            return cls(m, (p, np.zeros((0, 2 * m.N, 2 * m.N), dtype=complex)))
        return cls(m, (p, block_toeplitz.siegel_element(x.payload.omegas)))

    def inverse(self) -> GroupElement:
        m = self.manifold
        if m.kind is ManifoldKind.HPD:
            return GroupElement(m, (np.linalg.inv(self.parts[0]),))
        if m.kind is ManifoldKind.TOEPLITZ:
            return GroupElement(m, (1.0 / self.parts[0], _inverse_stack(self.parts[1])))
        return GroupElement(m, (self.parts[0].inverse(), _inverse_stack(self.parts[1])))

    def act(self, x: ManifoldPoint) -> ManifoldPoint:
        return group_action(self, x)


def _inverse_stack(g: np.ndarray) -> np.ndarray:
    return np.linalg.inv(g) if g.shape[0] else g


def random_group_element(m: ManifoldId, seed: utils.SeedLike = None) -> GroupElement:
    _require_points(m)
    rng = utils.as_generator(seed)
    if m.kind is ManifoldKind.HPD:
        g = (rng.standard_normal((m.n, m.n)) + 1j * rng.standard_normal((m.n, m.n))) / math.sqrt(2.0)
        return GroupElement.congruence(g + 0.5 * np.eye(m.n))
    if m.kind is ManifoldKind.TOEPLITZ:
        return GroupElement.toeplitz(math.exp(rng.normal()), toeplitz.random_su11(rng, m.n - 1))
    p = random_group_element(ManifoldId.toeplitz(m.N), rng)
    if m.n == 1:
        return GroupElement.block(p, np.zeros((0, 2 * m.N, 2 * m.N), dtype=complex))
    return GroupElement.block(p, block_toeplitz.random_siegel_group(m.N, rng, m.n - 1))


def _act_payload(g: GroupElement, m: ManifoldId, payload: Payload) -> Payload:
    if m.kind is ManifoldKind.HPD:
        return hpd.hpd_congruence(g.parts[0], payload)
    if m.kind is ManifoldKind.TOEPLITZ:
        return toeplitz.toeplitz_act(g.parts[0], g.parts[1], payload)
    p_elem, siegel = g.parts
    return block_toeplitz.block_toeplitz_act(p_elem.parts[0], p_elem.parts[1], siegel, payload)


def group_action(g: GroupElement, x: ManifoldPoint) -> ManifoldPoint:
    if g.manifold != x.manifold:
        raise ValidationError(f"Group element for {g.manifold} cannot act on {x.manifold}")
    return ManifoldPoint(x.manifold, _act_payload(g, x.manifold, x.payload))


def act_dataset(g: GroupElement, data: Dataset) -> Dataset:
    if g.manifold != data.manifold:
        raise ValidationError(f"Group element for {g.manifold} cannot act on {data.manifold}")
    return Dataset(data.manifold, _act_payload(g, data.manifold, data.payload), data.labels)


# Barycentre


@dataclass(frozen=True)
class BarycentreConfig:
    step: float = constants.BARYCENTRE_STEP
    tol: float = constants.BARYCENTRE_TOL
    max_iter: int = constants.BARYCENTRE_MAX_ITER

    def __post_init__(self) -> None:
        if not (self.step > 0 and self.tol > 0 and self.max_iter >= 1):
            raise ValidationError(f"Invalid barycentre configuration: {self}")


@dataclass(frozen=True)
class BarycentreResult:
    point: ManifoldPoint
    iterations: int
    gradient_norm: float


def _normalise_weights(weights: np.ndarray | None, count: int) -> np.ndarray:
    if weights is None:
        return np.full(count, 1.0 / count)
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (count,):
        raise ValidationError(f"Expected {count} weights, got shape {weights.shape}")
    if np.any(weights < 0) or not np.all(np.isfinite(weights)):
        raise ValidationError("Weights must be finite and non-negative")
    if abs(weights.sum() - 1.0) > max(constants.WEIGHT_SUM_TOL, 16 * count * np.finfo(float).eps):
        raise ValidationError(f"Weights sum to {weights.sum():.15g}, not 1")
    return weights


def variance(data: Dataset, weights: np.ndarray | None, x: ManifoldPoint) -> float:
    """Empirical variance function sum_i w_i d^2(x, x_i)."""
    w = _normalise_weights(weights, len(data))
    return float(np.sum(w * distances2_to(data, x)))


def _initial_point(data: Dataset, weights: np.ndarray) -> ManifoldPoint:
    best, best_value = 0, np.inf
    for i in np.flatnonzero(weights > 0):
        value = float(np.sum(weights * distances2_to(data, data[int(i)])))
        if value < best_value:
            best, best_value = int(i), value
    return data[best]


def _weighted_sum(weights: np.ndarray, values: np.ndarray) -> np.ndarray:
    return np.tensordot(weights, values, axes=(0, 0))


def _gradient(data: Dataset, weights: np.ndarray, x: ManifoldPoint) -> TangentVector:
    """sum_i w_i Log_x(x_i), computed for all points at once."""
    m = x.manifold
    if m.kind is ManifoldKind.HPD:
        return TangentVector(x, (_weighted_sum(weights, hpd.hpd_log(x.payload, data.payload)),))
    if m.kind is ManifoldKind.TOEPLITZ:
        t, v = _toeplitz_log(x.payload, data.payload)
        return TangentVector(x, (_weighted_sum(weights, t), _weighted_sum(weights, v)))
    t, v = _toeplitz_log(x.payload.p, data.payload.p)
    if m.n > 1:
        big_v = _weighted_sum(weights, block_toeplitz.siegel_log(x.payload.omegas, data.payload.omegas))
    else:
        big_v = np.zeros((0, m.N, m.N), dtype=complex)
    return TangentVector(x, (_weighted_sum(weights, t), _weighted_sum(weights, v), big_v))


def solve_barycentre(
    data: Dataset,
    weights: np.ndarray | None = None,
    cfg: BarycentreConfig | None = None,
    init: ManifoldPoint | None = None,
) -> BarycentreResult:
    """Weighted Riemannian barycentre by gradient iteration x <- Exp_x(step * sum_i w_i Log_x(x_i)).

    The Log sum is one vectorised call over the whole dataset, evaluated in a fixed order on the calling thread.

    The variance splits over the product factors, and every factor is updated by the same rule. The log-scale
    factor of Toeplitz coordinates is a Euclidean mean and is exact after one step. The step is halved whenever
    the gradient norm grows.
    """
    cfg = cfg or BarycentreConfig()
    if len(data) == 0:
        raise ValidationError("Barycentre of an empty dataset")
    w = _normalise_weights(weights, len(data))
    if init is not None:
        _check_same(data, init)
        x = init
    else:
        x = _initial_point(data, w)
    step = cfg.step
    previous = np.inf
    grad_norm = np.inf
    for iteration in range(cfg.max_iter + 1):
        grad = _gradient(data, w, x)
        grad_norm = norm(grad)
        if grad_norm < cfg.tol:
            logger.debug(f"Barycentre on {data.manifold} converged in {iteration} iterations")
            return BarycentreResult(x, iteration, grad_norm)
        if iteration == cfg.max_iter:
            break
        if grad_norm > previous:
            step *= 0.5
            logger.debug(f"Barycentre step halved to {step:g} at iteration {iteration}")
        previous = grad_norm
        x = exp_map(x, step * grad)
    raise ConvergenceError(
        f"Barycentre did not converge in {cfg.max_iter} iterations (gradient norm {grad_norm:.3e})",
        iterations=cfg.max_iter,
        gradient_norm=grad_norm,
    )


def barycentre(
    data: Dataset,
    weights: np.ndarray | None = None,
    cfg: BarycentreConfig | None = None,
    init: ManifoldPoint | None = None,
) -> ManifoldPoint:
    return solve_barycentre(data, weights, cfg, init).point
