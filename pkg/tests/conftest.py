"""Shared fixtures: seeded generators and random points on each manifold."""

from __future__ import annotations

from collections.abc import Callable

import numpy as np
import pytest

import block_toeplitz
import hpd
from block_toeplitz import BlockToeplitzCoords
from manifold import Dataset, ManifoldId, ManifoldPoint
from toeplitz import ToeplitzCoords


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)


def _disc(rng: np.random.Generator, shape: tuple[int, ...], radius: float) -> np.ndarray:
    modulus = radius * np.sqrt(rng.random(shape))
    return modulus * np.exp(2j * np.pi * rng.random(shape))


@pytest.fixture
def random_toeplitz() -> Callable[..., ToeplitzCoords]:
    def make(n: int, rng: np.random.Generator, size: int | None = None, radius: float = 0.7) -> ToeplitzCoords:
        batch = () if size is None else (size,)
        return ToeplitzCoords.create(np.exp(rng.normal(size=batch)), _disc(rng, batch + (n - 1,), radius))

    return make


@pytest.fixture
def random_block() -> Callable[..., BlockToeplitzCoords]:
    def make(
        n: int, N: int, rng: np.random.Generator, size: int | None = None, spread: float = 0.4
    ) -> BlockToeplitzCoords:
        batch = () if size is None else (size,)
        p = ToeplitzCoords.create(np.exp(rng.normal(size=batch)), _disc(rng, batch + (N - 1,), 0.6))
        if n == 1:
            return BlockToeplitzCoords.create(p, n=1)
        omegas = block_toeplitz.random_siegel(N, rng, batch + (n - 1,), spread=spread)
        return BlockToeplitzCoords.create(p, omegas)

    return make


@pytest.fixture
def random_point(random_toeplitz, random_block) -> Callable[[ManifoldId, np.random.Generator], ManifoldPoint]:
    def make(m: ManifoldId, rng: np.random.Generator) -> ManifoldPoint:
        if m.kind.value == "hpd":
            return ManifoldPoint.create(m, hpd.random_hpd(m.n, rng, spread=0.7))
        if m.kind.value == "toeplitz":
            return ManifoldPoint.create(m, random_toeplitz(m.n, rng))
        return ManifoldPoint.create(m, random_block(m.n, m.N, rng))

    return make


@pytest.fixture
def random_dataset(random_point) -> Callable[[ManifoldId, int, np.random.Generator], Dataset]:
    def make(m: ManifoldId, count: int, rng: np.random.Generator) -> Dataset:
        return Dataset.from_points([random_point(m, rng) for _ in range(count)])

    return make
