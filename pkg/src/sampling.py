"""sampling.py - Random-walk Metropolis and importance-sampling estimators for polar densities.

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
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

import constants
import utils
from errors import NumericalError, ValidationError

logger = logging.getLogger(__name__)

LogDensity = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class MhConfig:
    proposal_scale: float = constants.MH_PROPOSAL_SCALE
    burn_in: int = constants.MH_BURN_IN
    thinning: int = constants.MH_THINNING
    chains: int = constants.MH_CHAINS
    adapt: bool = True

    def __post_init__(self) -> None:
        if self.proposal_scale <= 0 or self.burn_in < 0 or self.thinning < 1 or self.chains < 1:
            raise ValidationError(f"Invalid Metropolis configuration: {self}")


@dataclass
class MhDiagnostics:
    acceptance_rate: float = float("nan")
    step: float = float("nan")
    flagged: bool = False
    draws: int = 0


def metropolis(
    log_density: LogDensity,
    dim: int,
    count: int,
    sigma: float,
    seed: utils.SeedLike = None,
    cfg: MhConfig | None = None,
) -> tuple[np.ndarray, MhDiagnostics]:
    """Random-walk Metropolis over `cfg.chains` parallel chains.

    log_density takes an (chains, dim) array and returns (chains,) log values (unnormalised, -inf allowed).
    Returns `count` thinned post-burn-in states of shape (count, dim) and the run diagnostics.
    """
    cfg = cfg or MhConfig()
    rng = utils.as_generator(seed)
    diagnostics = MhDiagnostics()
    if count == 0:
        return np.zeros((0, dim)), diagnostics
    chains = min(cfg.chains, count)
    step = cfg.proposal_scale * sigma

    state = rng.normal(0.0, sigma, size=(chains, dim))
    current = log_density(state)
    # Coincident starting points have zero density; redraw until every chain is finite.
    for _ in range(100):
        bad = ~np.isfinite(current)
        if not np.any(bad):
            break
        state[bad] = rng.normal(0.0, sigma, size=(int(bad.sum()), dim))
        current[bad] = log_density(state[bad])
    else:
        raise NumericalError("Metropolis sampler could not find a starting point with positive density")

    def advance(state: np.ndarray, current: np.ndarray, step: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        proposal = state + rng.normal(0.0, step, size=state.shape)
        proposed = log_density(proposal)
        with np.errstate(invalid="ignore"):
            accept = np.log(rng.random(chains)) < proposed - current
        state = np.where(accept[:, None], proposal, state)
        current = np.where(accept, proposed, current)
        return state, current, accept

    window = 50
    accepted = 0
    for i in range(cfg.burn_in):
        state, current, accept = advance(state, current, step)
        accepted += int(accept.sum())
        if cfg.adapt and (i + 1) % window == 0:
            rate = accepted / (window * chains)
            step *= math.exp(rate - 0.3)
            accepted = 0

    rounds = -(-count // chains)
    samples = np.empty((rounds, chains, dim))
    accepted = 0
    for k in range(rounds):
        for _ in range(cfg.thinning):
            state, current, accept = advance(state, current, step)
            accepted += int(accept.sum())
        samples[k] = state

    diagnostics.acceptance_rate = accepted / (rounds * cfg.thinning * chains)
    diagnostics.step = step
    diagnostics.draws = count
    if not constants.MH_ACCEPT_LOW <= diagnostics.acceptance_rate <= constants.MH_ACCEPT_HIGH:
        diagnostics.flagged = True
        logger.warning(
            f"Metropolis acceptance rate {diagnostics.acceptance_rate:.3f} outside "
            f"[{constants.MH_ACCEPT_LOW}, {constants.MH_ACCEPT_HIGH}] (dim={dim}, sigma={sigma:g})"
        )
    return samples.reshape(rounds * chains, dim)[:count], diagnostics


@dataclass(frozen=True)
class LogWeightSums:
    """Streaming sums of importance weights kept in log space."""

    count: int = 0
    log_sum: float = -np.inf
    log_sum_sq: float = -np.inf
    log_sum_moment: float = -np.inf

    @classmethod
    def from_log_weights(cls, log_w: np.ndarray, log_moment: np.ndarray) -> LogWeightSums:
        return cls(
            count=int(log_w.size),
            log_sum=float(logsumexp(log_w)),
            log_sum_sq=float(logsumexp(2.0 * log_w)),
            log_sum_moment=float(logsumexp(log_w + log_moment)),
        )

    def combine(self, other: LogWeightSums) -> LogWeightSums:
        return LogWeightSums(
            count=self.count + other.count,
            log_sum=float(np.logaddexp(self.log_sum, other.log_sum)),
            log_sum_sq=float(np.logaddexp(self.log_sum_sq, other.log_sum_sq)),
            log_sum_moment=float(np.logaddexp(self.log_sum_moment, other.log_sum_moment)),
        )

    def log_mean(self) -> float:
        return self.log_sum - math.log(self.count)

    def stderr_log(self) -> float:
        """Delta-method standard error of log(mean weight)."""
        if not np.isfinite(self.log_sum):
            return float("inf")
        ratio = math.exp(self.log_sum_sq - 2.0 * self.log_sum + math.log(self.count))
        return math.sqrt(max(ratio - 1.0, 0.0) / self.count)

    def moment(self) -> float:
        """Self-normalised estimate of E[|r|^2] under the target."""
        return math.exp(self.log_sum_moment - self.log_sum)


@dataclass(frozen=True)
class PolarIntegrand:
    """exp(-|r|^2 / 2 sigma^2) * g(r) on R^dim, with g invariant under a finite reflection group W.

    `log_g` evaluates log g on (m, dim) arrays. On the chamber, log g(r) = <shift, r> + bounded terms,
    which is what the shifted proposal exploits. `group_order` is |W| and `in_chamber` tests membership.
    """

    dim: int
    log_g: LogDensity
    shift: np.ndarray
    group_order: int
    in_chamber: Callable[[np.ndarray], np.ndarray]


@dataclass
class PolarEstimate:
    sigma: np.ndarray
    logz: np.ndarray
    stderr: np.ndarray
    psi_prime: np.ndarray
    samples: int
    proposal: list[str] = field(default_factory=list)


def _chunk_sums(
    integrand: PolarIntegrand, sigmas: np.ndarray, size: int, rng: np.random.Generator, proposals: tuple[str, ...]
) -> dict[str, list[LogWeightSums]]:
    z = rng.standard_normal((size, integrand.dim))
    with np.errstate(divide="ignore", invalid="ignore"):
        return _weigh(integrand, sigmas, z, proposals)


def _weigh(
    integrand: PolarIntegrand, sigmas: np.ndarray, z: np.ndarray, proposals: tuple[str, ...]
) -> dict[str, list[LogWeightSums]]:
    half_z2 = 0.5 * np.sum(z * z, axis=1)
    out: dict[str, list[LogWeightSums]] = {p: [] for p in proposals}
    for sigma in sigmas:
        log_norm = 0.5 * integrand.dim * math.log(2.0 * math.pi * sigma * sigma)
        if "centred" in proposals:
            x = sigma * z
            log_w = integrand.log_g(x) + log_norm
            out["centred"].append(LogWeightSums.from_log_weights(log_w, np.log(np.sum(x * x, axis=1))))
        if "shifted" in proposals:
            x = sigma * z + sigma * sigma * integrand.shift
            log_w = integrand.log_g(x) - np.sum(x * x, axis=1) / (2.0 * sigma * sigma) + half_z2 + log_norm
            log_w = np.where(integrand.in_chamber(x), log_w + math.log(integrand.group_order), -np.inf)
            out["shifted"].append(LogWeightSums.from_log_weights(log_w, np.log(np.sum(x * x, axis=1))))
    return out


def polar_logz(
    integrand: PolarIntegrand,
    sigmas: np.ndarray,
    samples: int,
    seed: utils.SeedLike = None,
    threads: int = 1,
    proposal: str = "auto",
    chunk: int = constants.MC_CHUNK,
    max_rel_stderr: float = constants.MC_MAX_REL_STDERR,
) -> PolarEstimate:
    """Importance-sampling estimate of log of int exp(-|r|^2/2 sigma^2) g(r) dr on a sigma grid.

    "centred" draws r ~ N(0, sigma^2 I); "shifted" draws N(sigma^2 shift, sigma^2 I) and keeps the chamber.
    "auto" runs both on common random numbers and keeps, per sigma, the one with the smaller stderr.
    Draws are split into fixed chunks seeded from one SeedSequence, so the result does not depend on `threads`.
    """
    sigmas = np.atleast_1d(np.asarray(sigmas, dtype=float))
    if np.any(sigmas <= 0):
        raise ValidationError("sigma must be positive")
    if samples < 1:
        raise ValidationError(f"Sample count must be positive, got {samples}")
    proposals = ("centred", "shifted") if proposal == "auto" else (proposal,)
    if any(p not in ("centred", "shifted") for p in proposals):
        raise ValidationError(f"Unknown proposal {proposal!r}")

    sizes = [chunk] * (samples // chunk)
    if samples % chunk:
        sizes.append(samples % chunk)
    generators = utils.spawn_generators(seed, len(sizes))
    results = utils.ordered_map(
        lambda job: _chunk_sums(integrand, sigmas, job[0], job[1], proposals),
        list(zip(sizes, generators)),
        threads,
    )

    estimate = PolarEstimate(
        sigma=sigmas,
        logz=np.empty_like(sigmas),
        stderr=np.empty_like(sigmas),
        psi_prime=np.empty_like(sigmas),
        samples=samples,
    )
    for k in range(sigmas.size):
        best: tuple[str, LogWeightSums] | None = None
        for p in proposals:
            total = LogWeightSums()
            for part in results:
                total = total.combine(part[p][k])
            if best is None or total.stderr_log() < best[1].stderr_log():
                best = (p, total)
        assert best is not None
        name, total = best
        estimate.logz[k] = total.log_mean()
        estimate.stderr[k] = total.stderr_log()
        estimate.psi_prime[k] = total.moment()
        estimate.proposal.append(name)
        if not estimate.stderr[k] <= max_rel_stderr:
            raise NumericalError(
                f"Monte Carlo relative stderr {estimate.stderr[k]:.3f} exceeds {max_rel_stderr:.2f} "
                f"at sigma={sigmas[k]:g} (dim={integrand.dim}, samples={samples})"
            )
    logger.debug(f"Polar integral estimated on {sigmas.size} sigma values with {samples} draws")
    return estimate
