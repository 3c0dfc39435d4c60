# SPDX-FileCopyrightText: 2026 floquet-perturbation contributors
#
# SPDX-License-Identifier: MIT

"""Support types for the machine-readable reports.

These ``TypedDict`` classes are only used for typechecking; the reports are
ordinary dicts that serialize directly to JSON. Complex numbers appear as
``[re, im]`` pairs.
"""

from typing import List, Optional, TypedDict

ComplexPair = List[float]


class _GroupCheck(TypedDict):
    identity: float
    """Largest entry of ``U(0) - I``."""

    floquet: float
    """Largest relative deviation from ``U(t + T) = U(t) U(T)``."""

    condition: float
    """Worst condition number of ``U(t)`` over the period."""


class FloquetCheck(_GroupCheck, total=False):
    """The output of :func:`.floquet_property_check`."""

    coefficient: float
    """Largest relative deviation of the implied coefficient from ``a(t)``.

    Only present when the system was passed. An exponent off by
    ``1j*k*omega`` with an unshifted shape still satisfies
    ``U(t + T) = U(t) U(T)``, but not this one.
    """


class GapReport(TypedDict):
    """A basis vector close to the target, from :func:`.scan_small_denominators`."""

    j: int
    k: int
    gap: ComplexPair


class MethodResult(TypedDict, total=False):
    """One method's answer for one target."""

    method: str
    """``"rs"``, ``"wb"`` or ``"direct"``."""

    order: Optional[int]
    mu: ComplexPair
    converged: bool
    iterations: int
    residual: float
    cutoff_drift: float
    order_contributions: List[ComplexPair]
    notes: List[str]

    error: str
    """Set instead of ``mu`` when the method failed; names the exception."""

    message: str


class TargetReport(TypedDict):
    """All results for the mode ``j`` at ``k = 0``."""

    j: int
    aleph: ComplexPair
    """The unperturbed exponent."""

    gaps: List[GapReport]
    results: List[MethodResult]


class TrajectoryReport(TypedDict):
    """Summary of a driven solve; the samples themselves go to CSV."""

    points: int
    periods: float
    residual_max: float
    method: str


class RunReport(TypedDict, total=False):
    """The JSON document written by every subcommand."""

    command: str
    version: str
    n: int
    omega: float
    cutoff: int
    targets: List[TargetReport]
    checks: FloquetCheck
    trajectory: TrajectoryReport
    failures: List[str]
    elapsed: float
    """Wall-clock seconds; left out of CSV output so tables stay reproducible."""


class ChartPoint(TypedDict, total=False):
    """One grid point of a stability chart."""

    row: int
    col: int
    x: float
    y: float
    re_mu_min: float
    """Smallest real part of the exponents; negative means growth."""

    unstable: bool
    method: str
    converged: bool
    cutoff_drift: float
    """Change of ``re_mu_min`` when the cutoff grows by 2."""

    error: str


class CompareRow(TypedDict, total=False):
    """Errors against the dense reference at one perturbation scale."""

    scale: float
    j: int
    method: str
    order: int
    error: float
    converged: bool
    failure: str


class InvariantResult(TypedDict):
    """One line of the ``check`` subcommand."""

    name: str
    value: float
    limit: float
    passed: bool
