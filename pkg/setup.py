# SPDX-FileCopyrightText: 2026 floquet-perturbation contributors
#
# SPDX-License-Identifier: MIT

# Metadata and options live in setup.cfg.
from setuptools import setup

setup()
