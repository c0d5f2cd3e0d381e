"""datafile.py - Versioned JSON artifacts and CSV outputs.

Copyright (C) 2026 rsgauss developers

Artifacts are canonical JSON (sorted keys, two-space indent, trailing newline) carrying `schema_version` and
`kind`. Complex numbers are [re, im] pairs and matrices are nested row-major lists. Toeplitz and block-Toeplitz
points are stored in reflection coordinates, HPD points as raw Hermitian matrices.
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

import csv
import json
import logging
import math
from collections.abc import Iterable, Sequence
from typing import Any

import numpy as np

import constants
import utils
import zinterp
from block_toeplitz import BlockToeplitzCoords
from errors import ArtifactError, ValidationError
from gaussian import FitReport, GaussianParams, ZTable
from manifold import Dataset, ManifoldId, ManifoldKind, ManifoldPoint
from mixture import MixtureModel, OrderSelection, degrees_of_freedom
from toeplitz import ToeplitzCoords

logger = logging.getLogger(__name__)


# Files


def read_document(path: str, kind: str) -> dict[str, Any]:
    try:
        with open(path, encoding="utf-8") as f:
            document = json.load(f)
    except OSError as e:
        raise ArtifactError(f"Cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ArtifactError(f"{path} is not valid JSON: {e}") from e
    check_header(document, kind, path)
    return document


def write_document(path: str, document: dict[str, Any]) -> None:
    try:
        utils.write_canonical(path, document)
    except OSError as e:
        raise ArtifactError(f"Cannot write {path}: {e}") from e
    logger.debug(f"Wrote {document.get('kind')} artifact {path}")


def header(kind: str) -> dict[str, Any]:
    return {"schema_version": constants.SCHEMA_VERSION, "kind": kind}


def check_header(document: Any, kind: str, source: str = "artifact") -> None:
    if not isinstance(document, dict):
        raise ArtifactError(f"{source}: top level must be a JSON object")
    version = document.get("schema_version")
    if not isinstance(version, str):
        raise ArtifactError(f"{source}: missing schema_version")
    major, _, minor = version.partition(".")
    if not (major.isdigit() and minor.isdigit()):
        raise ArtifactError(f"{source}: malformed schema_version {version!r}")
    if int(major) != constants.SCHEMA_MAJOR:
        raise ValidationError(f"{source}: unsupported schema version {version} (expected {constants.SCHEMA_MAJOR}.x)")
    if document.get("kind") != kind:
        raise ValidationError(f"{source}: expected a {kind} artifact, got {document.get('kind')!r}")


def _field(document: dict[str, Any], key: str) -> Any:
    try:
        return document[key]
    except (KeyError, TypeError) as e:
        raise ArtifactError(f"Artifact is missing field {key!r}") from e


def _complex(value: Any, shape: tuple[int, ...]) -> np.ndarray:
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as e:
        raise ArtifactError(f"Expected nested [re, im] pairs of shape {shape}") from e
    if arr.size != 2 * math.prod(shape):
        raise ArtifactError(f"Expected complex values of shape {shape}, got {arr.size // 2} pairs")
    return utils.decode_complex(arr.reshape(shape + (2,)))


def _floats(value: Any) -> np.ndarray:
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as e:
        raise ArtifactError("Expected a list of numbers") from e
    if arr.ndim != 1:
        raise ArtifactError("Expected a flat list of numbers")
    return arr


def _manifold(document: dict[str, Any]) -> ManifoldId:
    return ManifoldId.parse(str(_field(document, "manifold")))


# Points and datasets


def encode_point(m: ManifoldId, payload: Any) -> dict[str, Any]:
    if m.kind is ManifoldKind.HPD:
        return {"matrix": utils.encode_complex(np.asarray(payload, dtype=complex))}
    if m.kind is ManifoldKind.TOEPLITZ:
        return {"r": float(payload.r), "alphas": utils.encode_complex(np.asarray(payload.alphas, dtype=complex))}
    return {
        "r": float(payload.p.r),
        "alphas": utils.encode_complex(np.asarray(payload.p.alphas, dtype=complex)),
        "omegas": utils.encode_complex(np.asarray(payload.omegas, dtype=complex)),
    }


def decode_point(m: ManifoldId, document: Any) -> ManifoldPoint:
    if not isinstance(document, dict):
        raise ArtifactError("Each point must be a JSON object")
    if m.kind is ManifoldKind.HPD:
        return ManifoldPoint.create(m, _complex(_field(document, "matrix"), (m.n, m.n)))
    size = m.N if m.kind is ManifoldKind.BLOCK_TOEPLITZ else m.n
    p = ToeplitzCoords(np.asarray(float(_field(document, "r"))), _complex(_field(document, "alphas"), (size - 1,)))
    if m.kind is ManifoldKind.TOEPLITZ:
        return ManifoldPoint.create(m, p)
    omegas = _complex(_field(document, "omegas"), (m.n - 1, m.N, m.N))
    return ManifoldPoint.create(m, BlockToeplitzCoords(p, omegas))


def dataset_document(data: Dataset) -> dict[str, Any]:
    document = header("dataset")
    document["manifold"] = str(data.manifold)
    document["points"] = [encode_point(data.manifold, x.payload) for x in data]
    document["labels"] = None if data.labels is None else [int(v) for v in data.labels]
    return document


def dataset_from_document(document: dict[str, Any]) -> Dataset:
    m = _manifold(document)
    points = _field(document, "points")
    if not isinstance(points, list):
        raise ArtifactError("Dataset points must be a list")
    labels = document.get("labels")
    if not points:
        if labels:
            raise ValidationError("Empty dataset carries labels")
        return Dataset.empty(m)
    return Dataset.from_points([decode_point(m, p) for p in points], labels)


def save_dataset(path: str, data: Dataset) -> None:
    write_document(path, dataset_document(data))


def load_dataset(path: str) -> Dataset:
    data = dataset_from_document(read_document(path, "dataset"))
    logger.info(f"Loaded {len(data)} points on {data.manifold} from {path}")
    return data


def read_matrices(path: str, size: int | None = None) -> np.ndarray:
    """A JSON list of square matrices, real or as [re, im] pairs."""
    try:
        with open(path, encoding="utf-8") as f:
            value = json.load(f)
        arr = np.asarray(value, dtype=float)
    except OSError as e:
        raise ArtifactError(f"Cannot read {path}: {e}") from e
    except (json.JSONDecodeError, TypeError, ValueError) as e:
        raise ArtifactError(f"{path} does not hold a list of numeric matrices: {e}") from e
    if arr.size == 0 and size is not None:
        return np.zeros((0, size, size), dtype=complex)
    if arr.ndim == 4 and arr.shape[-1] == 2:
        arr = utils.decode_complex(arr)
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
        raise ArtifactError(f"{path}: expected a list of square matrices, got shape {arr.shape}")
    if size is not None and arr.shape[1] != size:
        raise ValidationError(f"{path}: expected {size}x{size} matrices, got {arr.shape[1]}x{arr.shape[2]}")
    return arr.astype(complex)


def read_label_column(path: str) -> list[int]:
    """The `label` column of a CSV file such as the one write_labels produces."""
    try:
        with open(path, newline="", encoding="utf-8") as f:
            return [int(row["label"]) for row in csv.DictReader(f)]
    except OSError as e:
        raise ArtifactError(f"Cannot read {path}: {e}") from e
    except (KeyError, TypeError, ValueError) as e:
        raise ArtifactError(f"{path} has no integer label column: {e}") from e


# Parameters, tables, reports and models


def params_document(p: GaussianParams) -> dict[str, Any]:
    document = header("params")
    document.update(_params_fields(p))
    return document


def _params_fields(p: GaussianParams) -> dict[str, Any]:
    return {"manifold": str(p.manifold), "center": encode_point(p.manifold, p.center.payload), "sigma": p.sigma}


def _params_from_fields(document: dict[str, Any]) -> GaussianParams:
    m = _manifold(document)
    return GaussianParams(decode_point(m, _field(document, "center")), float(_field(document, "sigma")))


def save_params(path: str, p: GaussianParams) -> None:
    write_document(path, params_document(p))


def load_params(path: str) -> GaussianParams:
    return _params_from_fields(read_document(path, "params"))


def ztable_document(z: ZTable) -> dict[str, Any]:
    document = header("ztable")
    document.update(
        {
            "manifold": str(z.manifold),
            "method": z.method,
            "sigma": z.sigma_grid.tolist(),
            "logz": z.logz_knots.tolist(),
            "psi_prime": z.psi_prime_knots.tolist(),
            "stderr": z.stderr.tolist(),
            "mc_samples": z.mc_samples,
            "seed": z.seed,
            "constant_dropped": z.constant_dropped,
            "offset": z.offset,
        }
    )
    return document


def ztable_from_document(document: dict[str, Any]) -> ZTable:
    seed = document.get("seed")
    return ZTable(
        manifold=_manifold(document),
        sigma_grid=_floats(_field(document, "sigma")),
        logz_knots=_floats(_field(document, "logz")),
        psi_prime_knots=_floats(_field(document, "psi_prime")),
        method=str(_field(document, "method")),
        stderr=_floats(_field(document, "stderr")),
        mc_samples=int(document.get("mc_samples", 0)),
        seed=None if seed is None else int(seed),
        constant_dropped=bool(document.get("constant_dropped", True)),
        offset=float(document.get("offset", 0.0)),
    )


def save_ztable(path: str, z: ZTable) -> None:
    write_document(path, ztable_document(z))


def load_ztable(path: str) -> ZTable:
    z = ztable_from_document(read_document(path, "ztable"))
    logger.info(f"Loaded {z.method} Z-table for {z.manifold} from {path}")
    return z


def fit_report_document(report: FitReport) -> dict[str, Any]:
    document = header("fit_report")
    document.update(
        {
            "params": _params_fields(report.params),
            "dispersion": report.dispersion,
            "iterations": report.iterations,
            "gradient_norm": report.gradient_norm,
            "eta_solver_residual": report.eta_solver_residual,
        }
    )
    return document


def save_fit_report(path: str, report: FitReport) -> None:
    write_document(path, fit_report_document(report))


def load_fit_report(path: str) -> FitReport:
    document = read_document(path, "fit_report")
    return FitReport(
        params=_params_from_fields(_field(document, "params")),
        dispersion=float(_field(document, "dispersion")),
        iterations=int(_field(document, "iterations")),
        gradient_norm=float(_field(document, "gradient_norm")),
        eta_solver_residual=float(_field(document, "eta_solver_residual")),
    )


def ztable_reference(z: ZTable, path: str | None = None) -> dict[str, Any]:
    lo, hi = z.sigma_range
    return {
        "path": path,
        "manifold": str(z.manifold),
        "method": z.method,
        "sigma_min": lo,
        "sigma_max": hi,
        "knots": int(z.sigma_grid.size),
        "mc_samples": z.mc_samples,
        "seed": z.seed,
        "offset": z.offset,
    }


def model_document(
    model: MixtureModel, z: ZTable | None = None, ztable_path: str | None = None, bic: float | None = None
) -> dict[str, Any]:
    document = header("model")
    document.update(
        {
            "manifold": str(model.manifold),
            "weights": model.weights.tolist(),
            "components": [
                {"center": encode_point(model.manifold, c.center.payload), "sigma": c.sigma} for c in model.components
            ],
            "ztable": None if z is None else ztable_reference(z, ztable_path),
            "bic": bic,
        }
    )
    return document


def model_from_document(document: dict[str, Any]) -> MixtureModel:
    m = _manifold(document)
    components = _field(document, "components")
    if not isinstance(components, list) or not components:
        raise ArtifactError("Model components must be a non-empty list")
    params = tuple(
        GaussianParams(decode_point(m, _field(c, "center")), float(_field(c, "sigma"))) for c in components
    )
    return MixtureModel(m, _floats(_field(document, "weights")), params)


def save_model(
    path: str, model: MixtureModel, z: ZTable | None = None, ztable_path: str | None = None, bic: float | None = None
) -> None:
    write_document(path, model_document(model, z, ztable_path, bic))


def load_model(path: str) -> MixtureModel:
    return model_from_document(read_document(path, "model"))


# CSV


def _write_rows(path: str, head: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    try:
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(head)
            writer.writerows(rows)
    except OSError as e:
        raise ArtifactError(f"Cannot write {path}: {e}") from e
    logger.debug(f"Wrote {path}")


def curve_rows(z: ZTable) -> list[tuple[float, float, float, float]]:
    """(sigma, eta, log Z, rho = psi'(eta)) at every knot."""
    sigma = z.sigma_grid
    eta = zinterp.sigma_to_eta(sigma)
    logz = z.logz(sigma)
    rho = z.psi_prime(eta)
    return [(float(s), float(e), float(lz), float(r)) for s, e, lz, r in zip(sigma, eta, logz, rho)]


def write_curve(path: str, z: ZTable) -> None:
    _write_rows(path, ("sigma", "eta", "logz", "rho"), [tuple(repr(v) for v in row) for row in curve_rows(z)])


def write_labels(path: str, labels: np.ndarray) -> None:
    _write_rows(path, ("index", "label"), [(i, int(label)) for i, label in enumerate(labels)])


def write_confusion(path: str, table: np.ndarray) -> None:
    size = table.shape[0]
    head = ["truth"] + [f"predicted_{j}" for j in range(size)]
    _write_rows(path, head, [[i] + [int(v) for v in table[i]] for i in range(size)])


def write_bic_table(path: str, selection: OrderSelection, manifold_id: ManifoldId, count: int) -> None:
    """One row per K: BIC, final log-likelihood and degrees of freedom."""
    rows = []
    for k, (value, trace) in enumerate(zip(selection.bics, selection.traces), start=1):
        loglik = trace[-1] if trace else float("nan")
        rows.append((k, repr(float(value)), repr(float(loglik)), degrees_of_freedom(manifold_id, k), count))
    _write_rows(path, ("k", "bic", "loglik", "df", "n"), rows)
