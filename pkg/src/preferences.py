"""preferences.py - run defaults (CONFIG_DIR/preferences.xml).

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

import lxml.etree as xml
import numpy as np

import constants
import utils
from errors import ValidationError

logger = logging.getLogger(__name__)

DEFAULTS: dict[str, str] = {
    "seed": str(constants.SEED),
    "threads": str(constants.THREADS),
    "mc_samples": str(constants.MC_SAMPLES),
    "sigma_grid": f"{constants.SIGMA_GRID_MIN}:{constants.SIGMA_GRID_MAX}:{constants.SIGMA_GRID_COUNT}",
    "mh_proposal_scale": str(constants.MH_PROPOSAL_SCALE),
    "mh_burn_in": str(constants.MH_BURN_IN),
    "mh_thinning": str(constants.MH_THINNING),
    "mh_chains": str(constants.MH_CHAINS),
    "barycentre_tol": str(constants.BARYCENTRE_TOL),
    "barycentre_max_iter": str(constants.BARYCENTRE_MAX_ITER),
    "em_restarts": str(constants.EM_RESTARTS),
    "em_tol": str(constants.EM_TOL),
    "em_max_iter": str(constants.EM_MAX_ITER),
}


class Preferences:
    def __init__(self, path: str | None = None) -> None:
        self.prefs_file_path: str = path or os.path.join(constants.CONFIG_DIR, "preferences.xml")
        self.tree: xml._Element = None
        self.load_preferences()

    def create_new_tree(self) -> None:
        self.tree = xml.Element("preferences")

        version = xml.SubElement(self.tree, "version")
        version.text = constants.VERSION

        self.check_elements()

    def load_preferences(self) -> None:
        try:
            self.tree = xml.parse(source=self.prefs_file_path).getroot()
            self.set_value("version", constants.VERSION)
            self.check_elements()
            self.save_preferences()
        except (OSError, xml.XMLSyntaxError) as e:
            logger.debug(f"Recreating preferences at {self.prefs_file_path}: {e}")
            self.create_new_tree()
            try:
                self.save_preferences()
            except OSError as e:
                logger.warning(f"Could not write preferences file {self.prefs_file_path}: {e}")

    def save_preferences(self) -> None:
        directory = os.path.dirname(self.prefs_file_path)
        if directory and not os.path.exists(directory):
            os.makedirs(directory, 0o700)
        with open(self.prefs_file_path, "w") as f:
            f.write(xml.tostring(self.tree, encoding="unicode", pretty_print=True))

    def get_value(self, element: str) -> str:
        if self.tree.find(element) is not None:
            value = self.tree.find(element).text
            if value is None:
                value = ""
            return value
        else:
            self.set_default_value(element)
            return self.tree.find(element).text

    def set_value(self, element: str, value: str) -> None:
        if self.tree.find(element) is None:
            xml.SubElement(self.tree, element)
        self.tree.find(element).text = value

    def check_elements(self) -> None:
        for element in DEFAULTS:
            if self.tree.find(element) is None:
                self.set_default_value(element)

    def set_default_value(self, element: str) -> None:
        if element not in DEFAULTS:
            raise ValidationError(f"Unknown preference: {element}")
        node = xml.SubElement(self.tree, element)
        node.text = DEFAULTS[element]

    def get_int(self, element: str) -> int:
        value = self.get_value(element)
        try:
            return int(value)
        except ValueError:
            logger.warning(f"Preference {element}={value!r} is not an integer, using default")
            return int(DEFAULTS[element])

    def get_float(self, element: str) -> float:
        value = self.get_value(element)
        try:
            return float(value)
        except ValueError:
            logger.warning(f"Preference {element}={value!r} is not a number, using default")
            return float(DEFAULTS[element])

    def get_grid(self) -> np.ndarray:
        try:
            return utils.parse_grid(self.get_value("sigma_grid"))
        except ValidationError:
            logger.warning("Preference sigma_grid is invalid, using default")
            return utils.default_grid()
