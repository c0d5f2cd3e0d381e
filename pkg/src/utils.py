"""utils.py - rsgauss utilities module.

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

import json
import logging
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import Any, TypeVar, Union

import numpy as np

import constants
from errors import ValidationError

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator, None]


def as_generator(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def as_seed_sequence(seed: SeedLike) -> np.random.SeedSequence:
    """Seed sequence from any seed-like value; a Generator contributes fresh entropy drawn from itself."""
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if isinstance(seed, np.random.Generator):
        return np.random.SeedSequence(int(seed.integers(0, 2**63 - 1)))
    return np.random.SeedSequence(seed)


def spawn_generators(seed: SeedLike, count: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in as_seed_sequence(seed).spawn(count)]


def ordered_map(func: Callable[[T], R], items: Sequence[T], threads: int = 1) -> list[R]:
    """Map preserving input order. threads <= 1 runs inline."""
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(func, items))


def log_grid(lo: float, hi: float, count: int) -> np.ndarray:
    if not (0 < lo < hi) or count < 2:
        raise ValidationError(f"Invalid sigma grid {lo}:{hi}:{count}")
    return np.geomspace(lo, hi, count)


def default_grid() -> np.ndarray:
    return log_grid(constants.SIGMA_GRID_MIN, constants.SIGMA_GRID_MAX, constants.SIGMA_GRID_COUNT)


def parse_grid(spec: str) -> np.ndarray:
    """Parse "lo:hi:count" into a log-spaced sigma grid."""
    try:
        lo, hi, count = spec.split(":")
        return log_grid(float(lo), float(hi), int(count))
    except ValueError as e:
        if isinstance(e, ValidationError):
            raise
        raise ValidationError(f"Grid spec must be lo:hi:count, got {spec!r}") from e


def encode_complex(value: Any) -> Any:
    """Recursively turn complex arrays/scalars into [re, im] pairs, real arrays into lists."""
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            return np.stack([value.real, value.imag], axis=-1).tolist()
        return value.tolist()
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def decode_complex(value: Any) -> np.ndarray:
    """Inverse of encode_complex for complex payloads: trailing axis of length 2."""
    arr = np.asarray(value, dtype=float)
    if arr.shape[-1:] != (2,):
        raise ValidationError(f"Complex payload must end in [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def dumps_canonical(document: dict[str, Any]) -> str:
    return json.dumps(document, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_canonical(path: str, document: dict[str, Any]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps_canonical(document))
