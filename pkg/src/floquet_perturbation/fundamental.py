# SPDX-FileCopyrightText: 2026 floquet-perturbation contributors
#
# SPDX-License-Identifier: MIT

"""Fundamental matrices assembled from Floquet modes, and driven solutions.

With mode shapes ``psi_l(t)`` and exponents ``mu_l`` the fundamental matrix is
``U(t) = Psi(t) diag(exp(-mu_l t)) C`` where ``Psi`` has the shapes as columns
and ``C = Psi(0)^-1``, so that ``U(0) = I``. The driven system
``dy/dt = a(t) y + f(t)`` is then solved by variation of constants::

    y(t) = U(t) y0 + U(t) integral_0^t U(s)^-1 f(s) ds
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np
import numpy.typing as npt
import scipy.integrate

from .base import SINGULAR_CONDITION_LIMIT, FloquetBasis, FloquetMode
from .errors import DimensionMismatch, InputError, SingularBasis, SingularFundamental
from .perturb import PerturbationSolution
from .series import (
    ComplexArray,
    FloatArray,
    PeriodicMatrixSeries,
    PeriodicVectorSeries,
    Times,
    columns,
    derivative,
    evaluate,
    resize,
    rows,
    shift,
)
from .types import FloquetCheck

logger = logging.getLogger(__name__)

#: Default number of grid points per period.
DEFAULT_GRID = 512

#: Largest entry of ``D(0) Psi(0) - I`` accepted from passed dual vectors.
DUAL_TOLERANCE = 1e-8

Forcing = Union[
    PeriodicVectorSeries, Callable[[float], npt.ArrayLike], npt.ArrayLike, None
]


@dataclass(frozen=True, eq=False)
class FundamentalMatrix:
    """``U(t) = Psi(t) diag(exp(-mu t)) C``."""

    exponents: ComplexArray
    shapes: PeriodicMatrixSeries
    C: ComplexArray

    @property
    def n(self) -> int:
        return self.shapes.n

    @property
    def omega(self) -> float:
        return self.shapes.omega

    @property
    def period(self) -> float:
        return self.shapes.period


@dataclass(frozen=True, eq=False)
class InhomogeneousSolution:
    """A driven trajectory on ``t_grid`` and its worst ODE residual."""

    t_grid: FloatArray
    y_values: ComplexArray
    y0: ComplexArray
    residual_max: float


def assemble_fundamental(
    modes: Sequence[FloquetMode],
    duals: Optional[Sequence[PeriodicVectorSeries]] = None,
) -> FundamentalMatrix:
    """Fundamental matrix of the modes, normalized to ``U(0) = I``.

    ``C`` is the inverse of the mode matrix at ``t = 0``. Dual vectors are
    only valid for the modes they were built from, so when they are passed
    their rows at 0 must invert ``Psi(0)``; pass none for perturbed modes.

    :raises SingularBasis: If the mode matrix at ``t = 0`` is singular.
    :raises InputError: If the dual vectors are not dual to the modes.
    """
    if not modes:
        raise InputError("need at least one mode")
    Psi = columns([mode.shape for mode in modes])
    if Psi.n != len(modes):
        raise DimensionMismatch(f"{len(modes)} modes of dimension {Psi.n}")
    Psi0 = evaluate(Psi, 0.0)
    condition = float(np.linalg.cond(Psi0))
    if not np.isfinite(condition) or condition > SINGULAR_CONDITION_LIMIT:
        raise SingularBasis(f"mode matrix at t=0 has condition number {condition:.3g}")
    C = np.linalg.inv(Psi0)
    if duals is not None:
        if len(duals) != len(modes):
            raise DimensionMismatch(f"{len(duals)} dual vectors for {len(modes)} modes")
        mismatch = float(
            np.max(np.abs(evaluate(rows(duals), 0.0) @ Psi0 - np.eye(len(modes))))
        )
        if mismatch > DUAL_TOLERANCE:
            raise InputError(
                f"dual vectors do not invert the modes at t=0 (off by {mismatch:.3g})"
            )
    exponents = np.array([mode.exponent for mode in modes], dtype=np.complex128)
    return FundamentalMatrix(exponents, Psi, C)


def evaluate_fundamental(fm: FundamentalMatrix, t: Times) -> ComplexArray:
    """``U(t)`` at one time or a stack of times."""
    times = np.asarray(t, dtype=np.float64)
    Psi = evaluate(fm.shapes, times)
    growth = np.exp(-np.multiply.outer(times, fm.exponents))
    return (Psi * growth[..., np.newaxis, :]) @ fm.C


def implied_coefficient(fm: FundamentalMatrix, t: Times) -> ComplexArray:
    """The ``a(t) = (Psi' - Psi diag(mu)) Psi^-1`` the modes solve exactly."""
    times = np.asarray(t, dtype=np.float64)
    Psi = evaluate(fm.shapes, times)
    dPsi = evaluate(derivative(fm.shapes), times)
    lhs = dPsi - Psi * fm.exponents
    # a Psi = lhs, so a^T = solve(Psi^T, lhs^T).
    return np.swapaxes(
        np.linalg.solve(np.swapaxes(Psi, -1, -2), np.swapaxes(lhs, -1, -2)), -1, -2
    )


def time_grid(omega: float, points: int = DEFAULT_GRID, periods: float = 1.0) -> FloatArray:
    """Equispaced times from 0 to ``periods`` periods, ``points`` per period."""
    if points < 4:
        raise InputError(f"need at least 4 points per period, got {points}")
    steps = int(round(points * periods))
    return np.linspace(0.0, periods * 2.0 * np.pi / omega, steps + 1)


def _check_grid(t_grid: npt.ArrayLike) -> FloatArray:
    t = np.asarray(t_grid, dtype=np.float64)
    if t.ndim != 1 or len(t) < 2:
        raise InputError("time grid must be a 1-d array of at least 2 points")
    if t[0] != 0.0:
        raise InputError(f"time grid must start at 0, starts at {t[0]}")
    if np.any(np.diff(t) <= 0.0):
        raise InputError("time grid must be strictly increasing")
    return t


def _initial(fm: FundamentalMatrix, y0: Optional[npt.ArrayLike]) -> ComplexArray:
    if y0 is None:
        return np.zeros(fm.n, dtype=np.complex128)
    y = np.asarray(y0, dtype=np.complex128)
    if y.shape != (fm.n,):
        raise DimensionMismatch(f"y0 must have shape ({fm.n},), got {y.shape}")
    return y


def solve_homogeneous(
    fm: FundamentalMatrix, y0: npt.ArrayLike, t_grid: npt.ArrayLike
) -> ComplexArray:
    """``y(t_i) = U(t_i) y0`` for each grid time."""
    y = _initial(fm, y0)
    return evaluate_fundamental(fm, np.asarray(t_grid, dtype=np.float64)) @ y


def _sample_forcing(fm: FundamentalMatrix, forcing: Forcing, t: FloatArray) -> ComplexArray:
    if forcing is None:
        return np.zeros((len(t), fm.n), dtype=np.complex128)
    if isinstance(forcing, PeriodicVectorSeries):
        values = evaluate(forcing, t)
    elif callable(forcing):
        values = np.array([np.asarray(forcing(float(s)), dtype=np.complex128) for s in t])
    else:
        values = np.asarray(forcing, dtype=np.complex128)
    if values.shape != (len(t), fm.n):
        raise DimensionMismatch(
            f"forcing must give shape ({len(t)}, {fm.n}), got {values.shape}"
        )
    return values


def _inverse_apply(fm: FundamentalMatrix, t: FloatArray, f: ComplexArray) -> ComplexArray:
    """``U(t)^-1 f(t)`` at every grid time.

    Per point, whichever of ``U(t)`` and ``Psi(t)`` is better conditioned is
    factorized; through ``Psi`` the inverse is ``C^-1 diag(exp(mu t)) Psi^-1``.
    """
    U = evaluate_fundamental(fm, t)
    Psi = evaluate(fm.shapes, t)
    cond_U = np.linalg.cond(U)
    cond_Psi = np.linalg.cond(Psi)
    worst = float(np.max(np.minimum(cond_U, cond_Psi)))
    if not np.isfinite(worst) or worst > SINGULAR_CONDITION_LIMIT:
        raise SingularFundamental(f"fundamental matrix condition number reaches {worst:.3g}")
    try:
        direct = np.linalg.solve(U, f[..., np.newaxis])[..., 0]
        via_modes = np.linalg.solve(Psi, f[..., np.newaxis])[..., 0]
    except np.linalg.LinAlgError as exc:
        raise SingularFundamental(str(exc)) from exc
    via_modes = np.linalg.solve(
        np.broadcast_to(fm.C, U.shape),
        (np.exp(np.multiply.outer(t, fm.exponents)) * via_modes)[..., np.newaxis],
    )[..., 0]
    use_modes = (cond_Psi < cond_U)[:, np.newaxis]
    return np.where(use_modes, via_modes, direct)


def _cumulative(integrand: ComplexArray, t: FloatArray) -> ComplexArray:
    """Running Simpson integral from ``t[0]``, real and imaginary parts separately."""
    real = scipy.integrate.cumulative_simpson(integrand.real, x=t, axis=0, initial=0)
    imag = scipy.integrate.cumulative_simpson(integrand.imag, x=t, axis=0, initial=0)
    return np.asarray(real + 1j * imag, dtype=np.complex128)


def _derivative(values: ComplexArray, h: float) -> ComplexArray:
    """Fourth-order centred differences at the interior points ``2..N-3``."""
    return (
        values[:-4] - 8.0 * values[1:-3] + 8.0 * values[3:-1] - values[4:]
    ) / (12.0 * h)


def ode_residual(
    t: FloatArray,
    y: ComplexArray,
    coefficient: ComplexArray,
    forcing: ComplexArray,
) -> float:
    """Largest ``|y' - a y - f|`` over the interior of a uniform grid."""
    if len(t) < 5:
        return 0.0
    h = float(t[1] - t[0])
    if not np.allclose(np.diff(t), h, rtol=1e-9, atol=0.0):
        raise InputError("residuals need a uniform time grid")
    dy = _derivative(y, h)
    inner = slice(2, -2)
    r = dy - np.einsum("tij,tj->ti", coefficient[inner], y[inner]) - forcing[inner]
    return float(np.max(np.linalg.norm(r, axis=1)))


def solve_inhomogeneous(
    fm: FundamentalMatrix,
    forcing: Forcing,
    y0: Optional[npt.ArrayLike],
    t_grid: npt.ArrayLike,
    *,
    system: Optional[PeriodicMatrixSeries] = None,
) -> InhomogeneousSolution:
    """Solve ``dy/dt = a(t) y + f(t)``, ``y(0) = y0`` by variation of constants.

    The integral is taken by cumulative Simpson quadrature on the grid, and
    the residual is checked with fourth-order centred differences.

    :param forcing: A periodic vector series, a function of ``t``, samples on
        ``t_grid`` with shape ``(len(t_grid), n)``, or ``None``.
    :param system: The coefficient ``a(t)`` for the residual. Without it the
        coefficient implied by the modes is used.
    :raises SingularFundamental: If ``U(t)`` cannot be inverted on the grid.
    """
    t = _check_grid(t_grid)
    y_init = _initial(fm, y0)
    f = _sample_forcing(fm, forcing, t)
    integrand = _inverse_apply(fm, t, f)
    integral = _cumulative(integrand, t)
    U = evaluate_fundamental(fm, t)
    y = np.einsum("tij,tj->ti", U, y_init[np.newaxis, :] + integral)
    y[0] = y_init
    if system is not None:
        if system.n != fm.n:
            raise DimensionMismatch(f"system dimension {system.n} does not match {fm.n}")
        coefficient = evaluate(system, t)
    else:
        coefficient = implied_coefficient(fm, t)
    residual = ode_residual(t, y, coefficient, f)
    logger.debug("driven solve over %d points: residual %.3g", len(t), residual)
    return InhomogeneousSolution(t, y, y_init, residual)


def floquet_property_check(
    fm: FundamentalMatrix,
    grid: int = DEFAULT_GRID,
    system: Optional[PeriodicMatrixSeries] = None,
) -> FloquetCheck:
    """Deviations from ``U(0) = I`` and from ``U(t + T) = U(t) U(T)`` over a period.

    The shapes are periodic by construction, so these two identities are all
    that is left to check. The Floquet deviation is relative to
    ``|U(t)| |U(T)|``; ``condition`` is the worst condition number of ``U(t)``.
    With ``system`` the report also compares :func:`implied_coefficient`
    against ``a(t)``, relative to ``max(1, |a(t)|)``.
    """
    t = np.arange(grid, dtype=np.float64) * (fm.period / grid)
    U = evaluate_fundamental(fm, t)
    later = evaluate_fundamental(fm, t + fm.period)
    UT = evaluate_fundamental(fm, fm.period)
    scale = np.maximum(
        1.0, np.linalg.norm(U, ord=2, axis=(1, 2)) * np.linalg.norm(UT, ord=2)
    )
    floquet = np.linalg.norm(later - U @ UT, ord=2, axis=(1, 2)) / scale
    report: FloquetCheck = {
        "identity": float(np.max(np.abs(evaluate_fundamental(fm, 0.0) - np.eye(fm.n)))),
        "floquet": float(np.max(floquet)),
        "condition": float(np.max(np.linalg.cond(U))),
    }
    if system is not None:
        if system.n != fm.n:
            raise DimensionMismatch(f"system of dimension {system.n}, modes of {fm.n}")
        a = evaluate(system, t)
        size = np.maximum(1.0, np.linalg.norm(a, ord=2, axis=(1, 2)))
        deviation = np.linalg.norm(implied_coefficient(fm, t) - a, ord=2, axis=(1, 2))
        report["coefficient"] = float(np.max(deviation / size))
    return report


def gauge_shift(mode: FloquetMode, m: int) -> FloquetMode:
    """Relabel a mode by ``exp(1j*m*omega*t)``: same solution, exponent ``+ 1j*m*omega``."""
    shape = mode.shape
    return FloquetMode(mode.index, mode.exponent + 1j * m * shape.omega, shift(shape, m))


def modes_from_solutions(
    basis: FloquetBasis, solutions: Sequence[PerturbationSolution]
) -> Tuple[FloquetMode, ...]:
    """Perturbed modes ``psi = sum c_j'k' exp(1j*k'*omega*t) phi_j'`` with exponent ``mu``."""
    modes = []
    for number, solution in enumerate(solutions, start=1):
        terms = [
            basis.ket(idx) * c
            for idx, c in sorted(solution.vector_coeffs.items())
            if c != 0.0
        ]
        K = max(term.K for term in terms)
        shape = resize(terms[0], K)
        for term in terms[1:]:
            shape = shape + term
        modes.append(FloquetMode(number, solution.mu, shape))
    return tuple(modes)
