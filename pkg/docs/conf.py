# SPDX-FileCopyrightText: 2022 Calvin Walton
# SPDX-FileCopyrightText: 2026 floquet-perturbation contributors
#
# SPDX-License-Identifier: MIT

# Configuration file for the Sphinx documentation builder.

# -- Path setup --------------------------------------------------------------

import os
import sys

sys.path.insert(0, os.path.abspath("../src"))

# -- Project information -----------------------------------------------------

from floquet_perturbation import __version__ as release

project = "floquet-perturbation"
copyright = "2026, floquet-perturbation contributors"
author = "floquet-perturbation contributors"

# -- General configuration ---------------------------------------------------

extensions = ["sphinx.ext.autodoc", "sphinx.ext.mathjax", "sphinx_autodoc_typehints"]

templates_path = ["_templates"]

exclude_patterns = ["problems"]

autodoc_default_options = {"members": True}

# -- Options for HTML output -------------------------------------------------

html_theme = "alabaster"
