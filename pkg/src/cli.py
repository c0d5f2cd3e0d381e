"""cli.py - Batch commands: Z-tables, sampling, fitting, mixtures, classification and raw-matrix import.

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
import os.path
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

import numpy as np

import block_toeplitz
import constants
import datafile
import gaussian
import manifold
import mixture
import toeplitz
import utils
from errors import RsgaussError, ValidationError
from gaussian import FitReport, GaussianParams, ZTable
from manifold import BarycentreConfig, Dataset, ManifoldId, ManifoldKind
from preferences import Preferences
from sampling import MhConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    seed: int = constants.SEED
    threads: int = constants.THREADS
    mc_samples: int = constants.MC_SAMPLES
    grid: np.ndarray = field(default_factory=utils.default_grid)
    mh: MhConfig = field(default_factory=MhConfig)
    barycentre: BarycentreConfig = field(default_factory=BarycentreConfig)
    em: mixture.EmConfig = field(default_factory=mixture.EmConfig)

    def __post_init__(self) -> None:
        if self.threads < 1 or self.mc_samples < 1:
            raise ValidationError(f"threads and mc_samples must be positive (got {self.threads}, {self.mc_samples})")

    @classmethod
    def from_preferences(
        cls,
        prefs: Preferences | None = None,
        seed: int | None = None,
        threads: int | None = None,
        mc_samples: int | None = None,
        grid: str | None = None,
    ) -> RunConfig:
        """Flags override preferences, preferences override the built-in defaults."""
        if prefs is None:
            prefs = Preferences()
        seed = prefs.get_int("seed") if seed is None else seed
        threads = prefs.get_int("threads") if threads is None else threads
        bary = BarycentreConfig(
            tol=prefs.get_float("barycentre_tol"), max_iter=prefs.get_int("barycentre_max_iter")
        )
        return cls(
            seed=seed,
            threads=threads,
            mc_samples=prefs.get_int("mc_samples") if mc_samples is None else mc_samples,
            grid=prefs.get_grid() if grid is None else utils.parse_grid(grid),
            mh=MhConfig(
                proposal_scale=prefs.get_float("mh_proposal_scale"),
                burn_in=prefs.get_int("mh_burn_in"),
                thinning=prefs.get_int("mh_thinning"),
                chains=prefs.get_int("mh_chains"),
            ),
            barycentre=bary,
            em=mixture.EmConfig(
                restarts=prefs.get_int("em_restarts"),
                tol=prefs.get_float("em_tol"),
                max_iter=prefs.get_int("em_max_iter"),
                seed=seed,
                threads=threads,
                barycentre=bary,
            ),
        )


def execute(command: Callable[..., Any], *args: Any, **kwargs: Any) -> int:
    """Run a command and map library errors to exit codes."""
    try:
        command(*args, **kwargs)
    except RsgaussError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    return constants.EXIT_OK


def sibling_path(out: str, suffix: str) -> str:
    root, _ = os.path.splitext(out)
    return root + suffix


def cmd_ztable(manifold_spec: str, out: str, cfg: RunConfig | None = None, method: str = "auto") -> ZTable:
    """Build a Z-table, write it as JSON and its (sigma, eta, log Z, rho) curve next to it as CSV."""
    cfg = cfg or RunConfig()
    m = ManifoldId.parse(manifold_spec)
    z = gaussian.build_ztable(m, cfg.grid, cfg.mc_samples, cfg.seed, cfg.threads, method)
    datafile.save_ztable(out, z)
    datafile.write_curve(sibling_path(out, ".csv"), z)
    logger.info(f"Z-table for {m} ({z.method}) written to {out}")
    return z


def cmd_sample(
    out: str,
    count: int,
    cfg: RunConfig | None = None,
    params_path: str | None = None,
    manifold_spec: str | None = None,
    sigma: float | None = None,
) -> Dataset:
    """Sample from a params file, or from G(o, sigma) on an inline manifold."""
    cfg = cfg or RunConfig()
    if count < 0:
        raise ValidationError(f"Sample count must be non-negative, got {count}")
    if params_path is not None:
        params = datafile.load_params(params_path)
    elif manifold_spec is not None and sigma is not None:
        m = ManifoldId.parse(manifold_spec)
        params = GaussianParams(manifold.identity_point(m), sigma)
    else:
        raise ValidationError("sample needs --params or both --manifold and --sigma")
    data = gaussian.sample(params, count, cfg.seed, cfg.mh)
    datafile.save_dataset(out, data)
    logger.info(f"Wrote {count} samples on {params.manifold} to {out}")
    return data


def cmd_fit(dataset_path: str, ztable_path: str, out: str, cfg: RunConfig | None = None) -> FitReport:
    cfg = cfg or RunConfig()
    data = datafile.load_dataset(dataset_path)
    z = datafile.load_ztable(ztable_path)
    report = gaussian.mle_fit(data, z, cfg.barycentre)
    datafile.save_fit_report(out, report)
    return report


def cmd_mixture(
    dataset_path: str, k_max: int, ztable_path: str, out: str, cfg: RunConfig | None = None
) -> mixture.OrderSelection:
    """BIC search over K = 1 .. k_max; writes the selected model and a BIC table (<out>_bic.csv)."""
    cfg = cfg or RunConfig()
    data = datafile.load_dataset(dataset_path)
    z = datafile.load_ztable(ztable_path)
    selection = mixture.select_order(data, k_max, z, cfg.em)
    best = selection.best_model
    datafile.save_model(out, best, z, ztable_path, float(selection.bics[selection.best_k - 1]))
    datafile.write_bic_table(sibling_path(out, "_bic.csv"), selection, data.manifold, len(data))
    logger.info(f"Selected K={selection.best_k} for {dataset_path}")
    return selection


def cmd_classify(
    dataset_path: str,
    model_path: str,
    out: str,
    ztable_path: str | None = None,
    cfg: RunConfig | None = None,
) -> np.ndarray:
    """Labels CSV, plus <out>_confusion.csv when the dataset carries labels.

    Without an explicit Z-table the one referenced by the model is used, or a fresh one is built.
    """
    cfg = cfg or RunConfig()
    data = datafile.load_dataset(dataset_path)
    document = datafile.read_document(model_path, "model")
    model = datafile.model_from_document(document)
    reference = document.get("ztable") or {}
    if ztable_path is None and reference.get("path") and os.path.exists(reference["path"]):
        ztable_path = reference["path"]
    if ztable_path is not None:
        z = datafile.load_ztable(ztable_path)
    else:
        logger.info(f"No Z-table given for {model.manifold}; building one")
        z = gaussian.build_ztable(model.manifold, cfg.grid, cfg.mc_samples, cfg.seed, cfg.threads)
    labels = mixture.classify_many(data, model, z)
    datafile.write_labels(out, labels)
    if data.labels is not None:
        table = mixture.confusion_matrix(data.labels, labels, max(model.K, int(data.labels.max(initial=-1)) + 1))
        datafile.write_confusion(sibling_path(out, "_confusion.csv"), table)
        logger.info(f"Diagonal agreement {np.trace(table) / max(len(data), 1):.4f}")
    return labels


def cmd_import(
    matrices_path: str, manifold_spec: str, out: str, labels_path: str | None = None
) -> Dataset:
    """Raw matrices to a dataset; Toeplitz kinds go through the Levinson recursions with PD validation."""
    m = ManifoldId.parse(manifold_spec)
    size = m.n * m.N
    matrices = datafile.read_matrices(matrices_path, size)
    labels = None
    if labels_path is not None:
        labels = datafile.read_label_column(labels_path)
    if matrices.shape[0] == 0:
        data = Dataset.empty(m)
        datafile.save_dataset(out, data)
        return data
    if m.kind is ManifoldKind.HPD:
        payload: Any = matrices
    elif m.kind is ManifoldKind.TOEPLITZ:
        payload = toeplitz.matrix_to_coords(matrices)
    elif m.kind is ManifoldKind.BLOCK_TOEPLITZ:
        payload = block_toeplitz.block_matrix_to_coords(matrices, m.N)
    else:
        raise ValidationError(f"Cannot import points on {m}")
    data = Dataset.create(m, payload, labels)
    datafile.save_dataset(out, data)
    logger.info(f"Imported {len(data)} matrices on {m} into {out}")
    return data
