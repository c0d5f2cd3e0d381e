#!/usr/bin/env python
"""rsgauss - Gaussian distributions on spaces of structured covariance matrices

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

import getopt
import logging
import sys

import cli
import constants
from errors import RsgaussError, ValidationError
from preferences import Preferences

logger = logging.getLogger("rsgauss")

VERBS = ("ztable", "sample", "fit", "mixture", "classify", "import")


def print_help() -> None:
    print("")
    print("Usage:")
    print("  rsgauss [OPTION...] VERB")
    print("")
    print("Verbs:")
    print("  ztable    -m MANIFOLD -o TABLE.json [--method auto|analytic|montecarlo]")
    print("  sample    (--params PARAMS.json | -m MANIFOLD --sigma S) -n COUNT -o DATA.json")
    print("  fit       -d DATA.json -z TABLE.json -o REPORT.json")
    print("  mixture   -d DATA.json -z TABLE.json -k KMAX -o MODEL.json")
    print("  classify  -d DATA.json --model MODEL.json [-z TABLE.json] -o LABELS.csv")
    print("  import    -i MATRICES.json -m MANIFOLD [--labels LABELS.csv] -o DATA.json")
    print("")
    print("Options:")
    print("  -h, --help                Show this help and exit.")
    print("  -v, --verbose             Debug logging")
    print("  -s [seed], --seed         Random seed")
    print("  -t [count], --threads     Worker threads (1 is bit-reproducible)")
    print("  --mc-samples [count]      Monte Carlo samples per Z-table")
    print("  -g [lo:hi:count], --grid  Log-spaced sigma grid")
    print("  -p [path], --preferences  Preferences file")
    print("")
    print("Manifolds: hpd:n, toeplitz:n, block:nxN, siegel:N (tables only)")
    print("")
    print("Example:")
    print("  rsgauss -s 7 ztable -m toeplitz:4 -o t4.json")
    print("")


def _int(value: str, name: str) -> int:
    try:
        return int(value)
    except ValueError as e:
        raise ValidationError(f"--{name} expects an integer, got {value!r}") from e


def _float(value: str, name: str) -> float:
    try:
        return float(value)
    except ValueError as e:
        raise ValidationError(f"--{name} expects a number, got {value!r}") from e


def _require(options: dict[str, str], *names: str) -> list[str]:
    missing = [name for name in names if name not in options]
    if missing:
        raise ValidationError(f"Missing option(s): {', '.join('--' + m for m in missing)}")
    return [options[name] for name in names]


def dispatch(verb: str, options: dict[str, str], cfg: cli.RunConfig) -> None:
    if verb == "ztable":
        manifold_spec, out = _require(options, "manifold", "output")
        cli.cmd_ztable(manifold_spec, out, cfg, options.get("method", "auto"))
    elif verb == "sample":
        (out,) = _require(options, "output")
        cli.cmd_sample(
            out,
            _int(options.get("count", "0"), "count"),
            cfg,
            params_path=options.get("params"),
            manifold_spec=options.get("manifold"),
            sigma=_float(options["sigma"], "sigma") if "sigma" in options else None,
        )
    elif verb == "fit":
        dataset, table, out = _require(options, "dataset", "ztable", "output")
        cli.cmd_fit(dataset, table, out, cfg)
    elif verb == "mixture":
        dataset, table, out, k_max = _require(options, "dataset", "ztable", "output", "kmax")
        cli.cmd_mixture(dataset, _int(k_max, "kmax"), table, out, cfg)
    elif verb == "classify":
        dataset, model, out = _require(options, "dataset", "model", "output")
        cli.cmd_classify(dataset, model, out, options.get("ztable"), cfg)
    elif verb == "import":
        matrices, manifold_spec, out = _require(options, "input", "manifold", "output")
        cli.cmd_import(matrices, manifold_spec, out, options.get("labels"))
    else:
        raise ValidationError(f"Unknown verb {verb!r}; expected one of {', '.join(VERBS)}")


def main(argv: list[str]) -> int:
    try:
        opts, args = getopt.gnu_getopt(
            argv,
            "hvs:t:g:p:m:o:n:d:z:k:i:",
            [
                "help",
                "verbose",
                "seed=",
                "threads=",
                "mc-samples=",
                "grid=",
                "preferences=",
                "manifold=",
                "output=",
                "count=",
                "dataset=",
                "ztable=",
                "kmax=",
                "input=",
                "params=",
                "sigma=",
                "model=",
                "method=",
                "labels=",
            ],
        )
    except getopt.GetoptError as err:
        print(str(err))
        print_help()
        return constants.EXIT_VALIDATION

    short = {"-s": "seed", "-t": "threads", "-g": "grid", "-p": "preferences", "-m": "manifold", "-o": "output"}
    short.update({"-n": "count", "-d": "dataset", "-z": "ztable", "-k": "kmax", "-i": "input"})
    options: dict[str, str] = {}
    verbose = False
    for opt, value in opts:
        if opt in ("-h", "--help"):
            print_help()
            return constants.EXIT_OK
        elif opt in ("-v", "--verbose"):
            verbose = True
        else:
            options[short.get(opt, opt.lstrip("-"))] = value

    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(name)s %(levelname)s: %(message)s",
    )
    if len(args) != 1:
        print("Exactly one verb is required")
        print_help()
        return constants.EXIT_VALIDATION

    try:
        cfg = cli.RunConfig.from_preferences(
            Preferences(options.get("preferences")),
            seed=_int(options["seed"], "seed") if "seed" in options else None,
            threads=_int(options["threads"], "threads") if "threads" in options else None,
            mc_samples=_int(options["mc-samples"], "mc-samples") if "mc-samples" in options else None,
            grid=options.get("grid"),
        )
    except RsgaussError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    logger.debug(f"rsgauss {constants.VERSION}: {args[0]} seed={cfg.seed} threads={cfg.threads}")
    return cli.execute(dispatch, args[0], options, cfg)


def run() -> None:
    """Run the program."""
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    run()
