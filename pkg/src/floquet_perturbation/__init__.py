# SPDX-FileCopyrightText: 2026 floquet-perturbation contributors
#
# SPDX-License-Identifier: MIT

"""Floquet exponents and modes of periodic linear ODEs by perturbation series.

The system ``dy/dt = a(t) y`` with ``T``-periodic ``a`` is split as
``a = a0 - V``. The exponents are eigenvalues of ``H = d/dt - a(t)`` on
periodic vector functions; they are found by Rayleigh-Schrodinger
(:func:`rs_solve`) or Wigner-Brillouin (:func:`wb_solve`) series around the
Floquet basis of ``a0`` (:func:`build_floquet_basis`), or by diagonalizing
the truncated operator (:func:`direct_eigensolve`).

Exponents follow the ``exp(-mu t)`` convention, so growth means
``Re(mu) < 0``.
"""

__version__ = "0.1.0"
__all__ = [
    "BasisIndex",
    "FloquetBasis",
    "FloquetMode",
    "FundamentalMatrix",
    "Method",
    "PerturbationProblem",
    "PerturbationSolution",
    "PeriodicMatrixSeries",
    "PeriodicVectorSeries",
    "assemble_fundamental",
    "assemble_truncated_H",
    "build_floquet_basis",
    "direct_eigensolve",
    "direct_exponents",
    "dual_pairing",
    "evaluate",
    "monodromy_decompose",
    "parse_problem",
    "project",
    "rs_solve",
    "series_product",
    "solve_homogeneous",
    "solve_inhomogeneous",
    "wb_solve",
]

from .base import (
    BasisIndex,
    FloquetBasis,
    FloquetMode,
    build_floquet_basis,
    monodromy_decompose,
)
from .fundamental import (
    FundamentalMatrix,
    assemble_fundamental,
    solve_homogeneous,
    solve_inhomogeneous,
)
from .perturb import (
    Method,
    PerturbationProblem,
    PerturbationSolution,
    assemble_truncated_H,
    direct_eigensolve,
    direct_exponents,
    rs_solve,
    wb_solve,
)
from .problem import parse_problem
from .series import (
    PeriodicMatrixSeries,
    PeriodicVectorSeries,
    dual_pairing,
    evaluate,
    project,
    series_product,
)
