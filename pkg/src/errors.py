"""errors.py - Exception hierarchy.

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

import constants


class RsgaussError(Exception):
    exit_code = constants.EXIT_NUMERICAL


class ValidationError(RsgaussError, ValueError):
    """Bad input: shapes, manifold mismatch, broken invariants, unknown schema."""

    exit_code = constants.EXIT_VALIDATION


class TableRangeError(ValidationError):
    """A sigma or dispersion value falls outside what a Z-table covers."""


class NumericalError(RsgaussError, ArithmeticError):
    exit_code = constants.EXIT_NUMERICAL


class ConvergenceError(NumericalError):
    def __init__(self, message: str, iterations: int = 0, gradient_norm: float = float("nan")) -> None:
        super().__init__(message)
        self.iterations = iterations
        self.gradient_norm = gradient_norm


class DegenerateFitError(NumericalError):
    """Dispersion is below the range Phi can invert (e.g. all samples identical)."""

    def __init__(self, message: str, component: int | None = None) -> None:
        super().__init__(message)
        self.component = component


class ArtifactError(RsgaussError, OSError):
    exit_code = constants.EXIT_IO
