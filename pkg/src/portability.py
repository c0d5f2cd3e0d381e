"""Per-platform location of the rsgauss config directory.

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

import os
import sys


def get_config_directory() -> str:
    """Where preferences.xml lives.

    $XDG_CONFIG_HOME/rsgauss (default ~/.config/rsgauss) on UNIX, ~/rsgauss_conf on Windows.
    """
    home = os.path.expanduser("~")
    if sys.platform == "win32":
        return os.path.join(home, "rsgauss_conf")
    return os.path.join(os.environ.get("XDG_CONFIG_HOME") or os.path.join(home, ".config"), "rsgauss")
