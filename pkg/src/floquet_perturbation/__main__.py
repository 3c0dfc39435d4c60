# SPDX-FileCopyrightText: 2026 floquet-perturbation contributors
#
# SPDX-License-Identifier: MIT

import sys

from .cli import main

sys.exit(main())
