"""mixture.py - Finite mixtures of Gaussians: EM estimation, BIC order selection and classification.

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
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

import constants
import gaussian
import manifold
import utils
from errors import DegenerateFitError, NumericalError, RsgaussError, ValidationError
from gaussian import GaussianParams, ZTable
from manifold import BarycentreConfig, Dataset, ManifoldId, ManifoldPoint

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MixtureModel:
    manifold: ManifoldId
    weights: np.ndarray
    components: tuple[GaussianParams, ...]

    def __post_init__(self) -> None:
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "components", tuple(self.components))
        if len(self.components) < 1:
            raise ValidationError("A mixture needs at least one component")
        if weights.shape != (len(self.components),):
            raise ValidationError(f"Got {weights.size} weights for {len(self.components)} components")
        if np.any(weights <= 0) or not np.all(np.isfinite(weights)):
            raise ValidationError("Mixture weights must be positive")
        if abs(weights.sum() - 1.0) > constants.WEIGHT_SUM_TOL:
            raise ValidationError(f"Mixture weights sum to {weights.sum():.15g}, not 1")
        if any(c.manifold != self.manifold for c in self.components):
            raise ValidationError(f"All mixture components must lie on {self.manifold}")

    @property
    def K(self) -> int:
        return len(self.components)

    @property
    def centers(self) -> list[ManifoldPoint]:
        return [c.center for c in self.components]

    @property
    def sigmas(self) -> np.ndarray:
        return np.array([c.sigma for c in self.components])


@dataclass(frozen=True)
class Responsibilities:
    """pi_k(x_n): posterior component probabilities, one row per datum."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        matrix = np.asarray(self.matrix, dtype=float)
        object.__setattr__(self, "matrix", matrix)
        if matrix.ndim != 2 or matrix.shape[1] < 1:
            raise ValidationError(f"Responsibilities must be an N x K matrix, got shape {matrix.shape}")
        if np.any(matrix < 0) or np.any(matrix > 1):
            raise ValidationError("Responsibilities must lie in [0, 1]")
        if matrix.shape[0] and np.max(np.abs(matrix.sum(axis=1) - 1.0)) > constants.WEIGHT_SUM_TOL:
            raise ValidationError("Responsibility rows must sum to 1")

    @property
    def counts(self) -> np.ndarray:
        return self.matrix.sum(axis=0)


def _check_model(data: Dataset, m: MixtureModel, z: ZTable) -> None:
    if data.manifold != m.manifold:
        raise ValidationError(f"Data lies on {data.manifold}, model on {m.manifold}")
    if z.manifold != m.manifold:
        raise ValidationError(f"Z-table is for {z.manifold}, model on {m.manifold}")


# Densities


def component_log_densities(data: Dataset, m: MixtureModel, z: ZTable) -> np.ndarray:
    """log w_k + log p(x_n | x_k, sigma_k) as an N x K matrix."""
    _check_model(data, m, z)
    columns = [math.log(w) + gaussian.log_pdf_many(data, c, z) for w, c in zip(m.weights, m.components)]
    log_joint = np.stack(columns, axis=-1) if columns[0].size else np.zeros((0, m.K))
    if not np.all(np.isfinite(log_joint)):
        raise NumericalError("Non-finite component density; a distance overflowed")
    return log_joint


def _normalise_rows(log_joint: np.ndarray) -> tuple[Responsibilities, np.ndarray]:
    log_density = logsumexp(log_joint, axis=1)
    resp = np.exp(log_joint - log_density[:, None])
    resp /= resp.sum(axis=1, keepdims=True)
    return Responsibilities(resp), log_density


def mixture_log_density_many(data: Dataset, m: MixtureModel, z: ZTable) -> np.ndarray:
    return logsumexp(component_log_densities(data, m, z), axis=1)


def mixture_log_density(x: ManifoldPoint, m: MixtureModel, z: ZTable) -> float:
    return float(mixture_log_density_many(Dataset.from_points([x]), m, z)[0])


def mixture_log_likelihood(data: Dataset, m: MixtureModel, z: ZTable) -> float:
    return float(np.sum(mixture_log_density_many(data, m, z)))


def e_step(data: Dataset, m: MixtureModel, z: ZTable) -> Responsibilities:
    resp, _ = _normalise_rows(component_log_densities(data, m, z))
    return resp


def posterior(x: ManifoldPoint, m: MixtureModel, z: ZTable) -> np.ndarray:
    """P(k | x) for every component."""
    return e_step(Dataset.from_points([x]), m, z).matrix[0]


def error_probability(x: ManifoldPoint, m: MixtureModel, z: ZTable) -> float:
    """Posterior probability that the Bayes rule misclassifies x."""
    return float(1.0 - np.max(posterior(x, m, z)))


# M-step


def _m_step(
    data: Dataset,
    resp: Responsibilities,
    z: ZTable,
    bary_cfg: BarycentreConfig | None,
    prev: MixtureModel | None,
) -> tuple[MixtureModel, list[int]]:
    count = len(data)
    if resp.matrix.shape[0] != count:
        raise ValidationError(f"Got {resp.matrix.shape[0]} responsibility rows for {count} points")
    K = resp.matrix.shape[1]
    if prev is not None and prev.K != K:
        raise ValidationError(f"Previous model has {prev.K} components, responsibilities {K}")
    n_k = resp.counts
    empty = [k for k in range(K) if n_k[k] < constants.EM_EMPTY_COMPONENT * count]
    if len(empty) == K:
        raise NumericalError("Every mixture component is empty")

    components: list[GaussianParams | None] = [None] * K
    for k in range(K):
        if k in empty:
            continue
        w = resp.matrix[:, k] / n_k[k]
        w = w / w.sum()
        init = None if prev is None else prev.components[k].center
        center = manifold.solve_barycentre(data, w, bary_cfg, init).point
        rho = manifold.variance(data, w, center)
        try:
            sigma = gaussian.phi(rho, z)
        except DegenerateFitError as e:
            raise DegenerateFitError(f"Component {k}: {e}", component=k) from e
        components[k] = GaussianParams(center, sigma)

    weights = n_k / count
    if empty:
        if prev is not None:
            density = mixture_log_density_many(data, prev, z)
        else:
            density = -resp.matrix[:, empty[0]]
        order = np.argsort(density, kind="stable")
        fitted = [c.sigma for c in components if c is not None]
        for slot, k in enumerate(empty):
            index = int(order[slot % count])
            sigma = prev.components[k].sigma if prev is not None else float(np.mean(fitted))
            components[k] = GaussianParams(data[index], sigma)
            weights[k] = 1.0 / count
            logger.warning(f"Mixture component {k} is empty; reseeded at datum {index}")
    weights = weights / weights.sum()
    return MixtureModel(data.manifold, weights, tuple(components)), empty  # type: ignore[arg-type]


def m_step(
    data: Dataset,
    resp: Responsibilities,
    z: ZTable,
    bary_cfg: BarycentreConfig | None = None,
    prev: MixtureModel | None = None,
) -> MixtureModel:
    """w_k = N_k / N, x_k the weighted barycentre, sigma_k = Phi(weighted dispersion about x_k).

    Components with N_k below EM_EMPTY_COMPONENT * N are reseeded at the datum of lowest mixture density
    under `prev`, keeping their previous sigma.
    """
    model, _ = _m_step(data, resp, z, bary_cfg, prev)
    return model


# EM


@dataclass(frozen=True)
class EmConfig:
    restarts: int = constants.EM_RESTARTS
    tol: float = constants.EM_TOL
    max_iter: int = constants.EM_MAX_ITER
    slack: float = constants.EM_SLACK
    seed: utils.SeedLike = constants.SEED
    threads: int = constants.THREADS
    barycentre: BarycentreConfig = field(default_factory=BarycentreConfig)

    def __post_init__(self) -> None:
        if self.restarts < 1 or self.max_iter < 1 or self.threads < 1:
            raise ValidationError(f"Invalid EM configuration: {self}")
        if not (self.tol > 0 and self.slack >= 0):
            raise ValidationError(f"Invalid EM tolerances: tol={self.tol}, slack={self.slack}")


@dataclass(frozen=True)
class EmRun:
    model: MixtureModel
    trace: list[float]


def _kmeanspp(data: Dataset, K: int, rng: np.random.Generator) -> list[int]:
    """k-means++ seeding with squared Riemannian distances."""
    count = len(data)
    chosen = [int(rng.integers(count))]
    nearest = manifold.distances2_to(data, data[chosen[0]])
    while len(chosen) < K:
        total = float(nearest.sum())
        if total > 0:
            index = int(rng.choice(count, p=nearest / total))
        else:
            index = int(rng.choice(np.setdiff1d(np.arange(count), chosen)))
        chosen.append(index)
        nearest = np.minimum(nearest, manifold.distances2_to(data, data[index]))
    return chosen


def initial_model(data: Dataset, K: int, z: ZTable, seed: utils.SeedLike = None) -> MixtureModel:
    """k-means++ centres, uniform weights and a common sigma from the mean squared distance to the nearest centre."""
    rng = utils.as_generator(seed)
    chosen = _kmeanspp(data, K, rng)
    nearest = np.min(np.stack([manifold.distances2_to(data, data[i]) for i in chosen]), axis=0)
    lo, hi = z.interp.rho_range
    rho = float(np.clip(np.mean(nearest), lo, hi))
    sigma0 = gaussian.phi(rho, z)
    components = tuple(GaussianParams(data[i], sigma0) for i in chosen)
    return MixtureModel(data.manifold, np.full(K, 1.0 / K), components)


def _em_run(data: Dataset, K: int, z: ZTable, cfg: EmConfig, rng: np.random.Generator) -> EmRun:
    model = initial_model(data, K, z, rng)
    resp, log_density = _normalise_rows(component_log_densities(data, model, z))
    trace = [float(np.sum(log_density))]
    for iteration in range(1, cfg.max_iter + 1):
        model, reseeded = _m_step(data, resp, z, cfg.barycentre, model)
        resp, log_density = _normalise_rows(component_log_densities(data, model, z))
        current = float(np.sum(log_density))
        previous = trace[-1]
        trace.append(current)
        if reseeded:
            continue
        scale = max(1.0, abs(previous))
        if current < previous - cfg.slack * scale:
            raise NumericalError(
                f"EM log-likelihood decreased at iteration {iteration}: {previous:.12g} -> {current:.12g}"
            )
        if (current - previous) / scale < cfg.tol:
            logger.debug(f"EM with K={K} converged after {iteration} iterations, log-likelihood {current:.6f}")
            return EmRun(model, trace)
    logger.warning(f"EM with K={K} stopped at max_iter={cfg.max_iter} (log-likelihood {trace[-1]:.6f})")
    return EmRun(model, trace)


def em_fit(data: Dataset, K: int, z: ZTable, cfg: EmConfig | None = None) -> tuple[MixtureModel, list[float]]:
    """Best of cfg.restarts EM runs by final log-likelihood; returns (model, log-likelihood trace)."""
    cfg = cfg or EmConfig()
    if not 1 <= K <= len(data):
        raise ValidationError(f"Need 1 <= K <= N, got K={K}, N={len(data)}")
    if z.manifold != data.manifold:
        raise ValidationError(f"Z-table is for {z.manifold}, data is on {data.manifold}")

    def attempt(item: tuple[int, np.random.Generator]) -> EmRun | RsgaussError:
        restart, rng = item
        try:
            return _em_run(data, K, z, cfg, rng)
        except (NumericalError, ValidationError) as e:
            logger.warning(f"EM restart {restart} with K={K} failed: {e}")
            return e

    rngs = utils.spawn_generators(cfg.seed, cfg.restarts)
    outcomes = utils.ordered_map(attempt, list(enumerate(rngs)), cfg.threads)
    runs = [o for o in outcomes if isinstance(o, EmRun)]
    if not runs:
        raise next(o for o in outcomes if isinstance(o, RsgaussError))
    best = max(runs, key=lambda run: run.trace[-1])
    logger.info(f"EM K={K}: best log-likelihood {best.trace[-1]:.6f} over {len(runs)}/{cfg.restarts} restarts")
    return best.model, best.trace


# Order selection and classification


def degrees_of_freedom(m: ManifoldId, K: int) -> int:
    return K * (2 + manifold.dimension(m)) - 1


def bic(data: Dataset, m: MixtureModel, z: ZTable) -> float:
    """log-likelihood - DF/2 log N; larger is better."""
    count = len(data)
    if count < 1:
        raise ValidationError("BIC of an empty dataset")
    return mixture_log_likelihood(data, m, z) - 0.5 * degrees_of_freedom(m.manifold, m.K) * math.log(count)


@dataclass(frozen=True)
class OrderSelection:
    best_k: int
    models: list[MixtureModel | None]
    bics: np.ndarray
    traces: list[list[float]]

    @property
    def best_model(self) -> MixtureModel:
        model = self.models[self.best_k - 1]
        assert model is not None
        return model


def select_order(data: Dataset, k_max: int, z: ZTable, cfg: EmConfig | None = None) -> OrderSelection:
    """Exhaustive BIC search over K = 1 .. k_max."""
    if not 1 <= k_max <= len(data):
        raise ValidationError(f"Need 1 <= k_max <= N, got k_max={k_max}, N={len(data)}")
    models: list[MixtureModel | None] = []
    traces: list[list[float]] = []
    bics = np.full(k_max, -np.inf)
    for K in range(1, k_max + 1):
        try:
            model, trace = em_fit(data, K, z, cfg)
        except NumericalError as e:
            if K == 1:
                raise
            logger.warning(f"No mixture with K={K}: {e}")
            models.append(None)
            traces.append([])
            continue
        models.append(model)
        traces.append(trace)
        bics[K - 1] = bic(data, model, z)
        logger.info(f"K={K}: BIC {bics[K - 1]:.6f}")
    best_k = int(np.argmax(bics)) + 1
    return OrderSelection(best_k, models, bics, traces)


def classify_many(data: Dataset, m: MixtureModel, z: ZTable) -> np.ndarray:
    """argmin_k -log w_k + log Z(sigma_k) + d^2(x, x_k) / 2 sigma_k^2, lowest index on ties."""
    if len(data) == 0:
        return np.zeros(0, dtype=int)
    return np.argmin(-component_log_densities(data, m, z), axis=1)


def classify(x: ManifoldPoint, m: MixtureModel, z: ZTable) -> int:
    return int(classify_many(Dataset.from_points([x]), m, z)[0])


def relabel(m: MixtureModel, order: Sequence[int]) -> MixtureModel:
    """Component k of the result is component order[k] of m."""
    order = [int(k) for k in order]
    if sorted(order) != list(range(m.K)):
        raise ValidationError(f"{order} is not a permutation of 0..{m.K - 1}")
    return MixtureModel(m.manifold, m.weights[order], tuple(m.components[k] for k in order))


def confusion_matrix(truth: np.ndarray, predicted: np.ndarray, size: int | None = None) -> np.ndarray:
    truth = np.asarray(truth, dtype=int)
    predicted = np.asarray(predicted, dtype=int)
    if truth.shape != predicted.shape:
        raise ValidationError("Truth and predicted labels differ in length")
    if np.any(truth < 0) or np.any(predicted < 0):
        raise ValidationError("Labels must be non-negative")
    size = size or int(max(truth.max(initial=-1), predicted.max(initial=-1)) + 1)
    table = np.zeros((size, size), dtype=int)
    np.add.at(table, (truth, predicted), 1)
    return table
