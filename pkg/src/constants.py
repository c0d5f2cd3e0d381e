"""constants.py - Miscellaneous constants.

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

import portability


VERSION = "1.0.0"
# Artifact files carry "MAJOR.MINOR"; loaders refuse any other major.
SCHEMA_VERSION = "1.0"
SCHEMA_MAJOR = 1

CONFIG_DIR = portability.get_config_directory()

# Tolerances
HERMITIAN_TOL = 1e-12
SYMMETRIC_TOL = 1e-12
RECONSTRUCTION_TOL = 1e-10
GROUP_TOL = 1e-10
UNITARY_TOL = 1e-12
DISC_CAP = 1.0 - 1e-12
SIEGEL_CLIP = 1.0 - 1e-14
SIEGEL_BREACH_TOL = 1e-8
# Siegel Z-tables kept in memory; the oldest is dropped first.
SIEGEL_CACHE_SIZE = 16
PERSYMMETRIC_TOL = 1e-8
WEIGHT_SUM_TOL = 1e-12

# Exit codes
EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

# Z-tables
SIGMA_GRID_MIN = 0.05
SIGMA_GRID_MAX = 3.0
SIGMA_GRID_COUNT = 60
MC_SAMPLES = 200_000
MC_CHUNK = 20_000
MC_MAX_REL_STDERR = 0.10
CONVEXITY_SIGMAS = 3.0

# Metropolis sampler
MH_PROPOSAL_SCALE = 0.5
MH_BURN_IN = 1000
MH_THINNING = 10
MH_CHAINS = 128
MH_ACCEPT_LOW = 0.1
MH_ACCEPT_HIGH = 0.7

# Barycentre
BARYCENTRE_STEP = 1.0
BARYCENTRE_TOL = 1e-9
BARYCENTRE_MAX_ITER = 200

# Phi solver
PHI_TOL = 1e-12
PHI_MAX_ITER = 50

# EM
EM_RESTARTS = 5
EM_TOL = 1e-7
EM_MAX_ITER = 300
EM_SLACK = 1e-9
EM_EMPTY_COMPONENT = 1e-8

THREADS = 1
SEED = 20240601
