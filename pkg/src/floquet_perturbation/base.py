# SPDX-FileCopyrightText: 2026 floquet-perturbation contributors
#
# SPDX-License-Identifier: MIT

"""The unperturbed problem ``H0 = d/dt - a0(t)``.

Solutions of ``dy/dt = a0(t) y`` have the Floquet form
``y_j(t) = phi_j(t) * exp(-aleph_j * t)`` with periodic ``phi_j``. The shifted
vectors ``exp(1j*k*omega*t) * phi_j(t)`` are eigenvectors of ``H0`` with
eigenvalues ``aleph_j + 1j*k*omega`` and, together with the dual vectors built
here, form the biorthogonal basis the perturbation series work in.

Exponents follow the ``exp(-aleph*t)`` convention: a solution grows when
``Re(aleph) < 0``. They are kept on the canonical branch
``-omega/2 < Im(aleph) <= omega/2``.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt
import scipy.linalg

from .errors import (
    CutoffTooSmall,
    DefectiveMonodromy,
    DimensionMismatch,
    InputError,
    NonFiniteState,
    SingularBasis,
)
from .series import (
    DEFAULT_ALIASING_TOLERANCE,
    ComplexArray,
    FloatArray,
    PeriodicMatrixSeries,
    PeriodicVectorSeries,
    columns,
    derivative,
    dual_pairing,
    evaluate,
    fourier_coefficients,
    sample_times,
    shift,
)

logger = logging.getLogger(__name__)

#: Default number of RK4 steps per period.
DEFAULT_STEPS = 2048

#: Fewest RK4 steps per period accepted.
MIN_STEPS = 64

#: Default number of harmonics kept in mode shapes and dual vectors.
DEFAULT_HARMONICS = 16

#: Eigenvector condition number above which the monodromy counts as defective.
DEFAULT_CONDITION_LIMIT = 1e8

#: Pointwise condition number above which the mode matrix counts as singular.
SINGULAR_CONDITION_LIMIT = 1e12

#: Estimated RK4 error of the monodromy matrix, relative to its size, that is
#: logged as a warning.
DEFAULT_INTEGRATION_TOL = 1e-8


@dataclass(frozen=True, order=True)
class BasisIndex:
    """The label ``(j, k)`` of the basis vector ``|jk>``.

    ``j`` counts modes from 1; ``k`` is the harmonic shift.
    """

    j: int
    k: int

    def shifted(self, dk: int) -> "BasisIndex":
        return BasisIndex(self.j, self.k + dk)


@dataclass(frozen=True, eq=False)
class FloquetMode:
    """A periodic mode shape ``phi_j(t)`` with its exponent ``aleph_j``."""

    index: int
    exponent: complex
    shape: PeriodicVectorSeries


@dataclass(frozen=True, eq=False)
class FundamentalPath:
    """The fundamental matrix ``U(t_i)`` on an equispaced grid over one period."""

    times: FloatArray
    matrices: ComplexArray

    @property
    def monodromy(self) -> ComplexArray:
        return self.matrices[-1]


@dataclass(frozen=True, eq=False)
class MonodromyResult:
    """Eigen-decomposition of the monodromy matrix ``U(T)``."""

    M: ComplexArray
    multipliers: ComplexArray
    exponents: ComplexArray
    eigvecs: ComplexArray
    omega: float
    condition: float
    path: Optional[FundamentalPath] = None
    integration_error: float = 0.0
    """Richardson estimate of the RK4 error in ``M``."""


@dataclass(frozen=True, eq=False)
class FloquetBasis:
    """Mode shapes, their duals, and the working harmonic cutoff."""

    modes: Tuple[FloquetMode, ...]
    duals: Tuple[PeriodicVectorSeries, ...]
    omega: float
    cutoff: int

    def __post_init__(self) -> None:
        if len(self.modes) != len(self.duals):
            raise DimensionMismatch(
                f"{len(self.modes)} modes but {len(self.duals)} dual vectors"
            )
        if self.cutoff < 0:
            raise InputError(f"cutoff must be non-negative, got {self.cutoff}")

    @property
    def n(self) -> int:
        return len(self.modes)

    @property
    def exponents(self) -> ComplexArray:
        return np.array([mode.exponent for mode in self.modes], dtype=np.complex128)

    def mode(self, j: int) -> FloquetMode:
        if not 1 <= j <= self.n:
            raise InputError(f"mode index {j} outside 1..{self.n}")
        return self.modes[j - 1]

    def ket(self, idx: BasisIndex) -> PeriodicVectorSeries:
        """The basis vector ``exp(1j*k*omega*t) * phi_j(t)``."""
        return shift(self.mode(idx.j).shape, idx.k)

    def bra(self, idx: BasisIndex) -> PeriodicVectorSeries:
        """The dual vector ``exp(-1j*k*omega*t) * dual_j(t)``."""
        self.mode(idx.j)
        return shift(self.duals[idx.j - 1], -idx.k)


def canonical_shift(x: complex, omega: float) -> int:
    """The integer ``m`` with ``Im(x) - m*omega`` in ``(-omega/2, omega/2]``."""
    return math.ceil((x.imag - omega / 2.0) / omega)


def canonical_exponent(x: complex, omega: float) -> complex:
    """Move an exponent onto the canonical branch by a multiple of ``1j*omega``."""
    return complex(x.real, x.imag - canonical_shift(x, omega) * omega)


def basis_eigenvalue(
    idx: BasisIndex, modes: Sequence[FloquetMode], omega: Optional[float] = None
) -> complex:
    """The eigenvalue ``aleph_jk = aleph_j + 1j*k*omega`` of ``|jk>``."""
    if not 1 <= idx.j <= len(modes):
        raise InputError(f"mode index {idx.j} outside 1..{len(modes)}")
    mode = modes[idx.j - 1]
    if omega is None:
        omega = mode.shape.omega
    return mode.exponent + 1j * idx.k * omega


def integrate_fundamental(
    a: PeriodicMatrixSeries, steps: int = DEFAULT_STEPS
) -> FundamentalPath:
    """Integrate ``dU/dt = a(t) U``, ``U(0) = I`` over one period.

    Uses classical fixed-step RK4 so that ``U`` lands on a uniform grid. For
    constant coefficients the step propagator is the exact matrix exponential.

    :param steps: Number of steps per period, at least :data:`MIN_STEPS`.
    :raises NonFiniteState: If the solution overflows.
    """
    if steps < MIN_STEPS:
        raise InputError(f"need at least {MIN_STEPS} steps, got {steps}")
    n = a.n
    h = a.period / steps
    times = np.arange(steps + 1, dtype=np.float64) * h
    U = np.empty((steps + 1, n, n), dtype=np.complex128)
    U[0] = np.eye(n)
    with np.errstate(over="ignore", invalid="ignore"):
        if a.K == 0:
            propagator = scipy.linalg.expm(a.coefficient(0) * h)
            for i in range(steps):
                U[i + 1] = propagator @ U[i]
        else:
            # a(t) at every half step: even entries on the grid, odd ones between.
            A = evaluate(a, np.arange(2 * steps + 1, dtype=np.float64) * (h / 2.0))
            for i in range(steps):
                A0, Am, A1 = A[2 * i], A[2 * i + 1], A[2 * i + 2]
                Ui = U[i]
                k1 = A0 @ Ui
                k2 = Am @ (Ui + (h / 2.0) * k1)
                k3 = Am @ (Ui + (h / 2.0) * k2)
                k4 = A1 @ (Ui + h * k3)
                U[i + 1] = Ui + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(U)):
        raise NonFiniteState("fundamental matrix overflowed during integration")
    return FundamentalPath(times, U)


def richardson_monodromy(
    a: PeriodicMatrixSeries, steps: int = DEFAULT_STEPS
) -> Tuple[ComplexArray, float]:
    """Richardson-extrapolated monodromy and an estimate of the RK4 error.

    Integrates at ``steps`` and ``2 * steps``; for a fourth-order method the
    difference divided by 15 estimates the error of the finer result.
    """
    coarse = integrate_fundamental(a, steps).monodromy
    fine = integrate_fundamental(a, 2 * steps).monodromy
    error = float(np.max(np.abs(fine - coarse))) / 15.0
    return fine + (fine - coarse) / 15.0, error


def integration_error(a: PeriodicMatrixSeries, M: ComplexArray, steps: int) -> float:
    """Richardson estimate of the RK4 error of ``M``, integrated with ``steps`` steps.

    Compares against a run with half the steps, or with twice the steps when
    halving would go below :data:`MIN_STEPS`.
    """
    if a.K == 0:
        return 0.0
    if steps // 2 >= MIN_STEPS:
        coarse = integrate_fundamental(a, steps // 2).monodromy
        return float(np.max(np.abs(M - coarse))) / 15.0
    fine = integrate_fundamental(a, 2 * steps).monodromy
    return float(np.max(np.abs(fine - M))) * 16.0 / 15.0


def monodromy_decompose(
    a: PeriodicMatrixSeries,
    *,
    steps: int = DEFAULT_STEPS,
    condition_limit: float = DEFAULT_CONDITION_LIMIT,
    integration_tol: float = DEFAULT_INTEGRATION_TOL,
) -> MonodromyResult:
    """Multipliers, canonical exponents and eigenvectors of ``U(T)``.

    Exponents are ``-log(rho)/T`` on the principal branch, moved onto the
    canonical strip. The RK4 error of ``U(T)`` is estimated by Richardson
    comparison and logged when it exceeds ``integration_tol`` times the size
    of ``U(T)``.

    :raises DefectiveMonodromy: If the eigenvector matrix is too badly
        conditioned (a Jordan block in all but name).
    """
    path = integrate_fundamental(a, steps)
    M = path.monodromy
    error = integration_error(a, M, steps)
    if error > integration_tol * max(1.0, float(np.max(np.abs(M)))):
        logger.warning(
            "RK4 error of the monodromy matrix is about %.3g with %d steps", error, steps
        )
    multipliers, eigvecs = scipy.linalg.eig(M)
    condition = float(np.linalg.cond(eigvecs))
    if not np.isfinite(condition) or condition > condition_limit:
        raise DefectiveMonodromy(
            f"monodromy eigenvectors have condition number {condition:.3g}", condition
        )
    T = a.period
    exponents = np.array(
        [canonical_exponent(complex(-np.log(rho) / T), a.omega) for rho in multipliers],
        dtype=np.complex128,
    )
    logger.debug("monodromy multipliers %s, exponents %s", multipliers, exponents)
    return MonodromyResult(
        M=M,
        multipliers=np.asarray(multipliers, dtype=np.complex128),
        exponents=exponents,
        eigvecs=np.asarray(eigvecs, dtype=np.complex128),
        omega=a.omega,
        condition=condition,
        path=path,
        integration_error=error,
    )


def normalize_shape(coeffs: ComplexArray) -> ComplexArray:
    """Scale so the largest-magnitude coefficient entry is exactly ``1``."""
    flat = coeffs.reshape(-1)
    return coeffs / flat[int(np.argmax(np.abs(flat)))]


def periodic_eigenvectors(
    a0: PeriodicMatrixSeries,
    mono: MonodromyResult,
    K: int = DEFAULT_HARMONICS,
    *,
    aliasing_tolerance: float = DEFAULT_ALIASING_TOLERANCE,
) -> Tuple[FloquetMode, ...]:
    """Periodic mode shapes ``phi_j`` from a monodromy decomposition.

    ``y_j(t) = U(t) v_j`` is sampled on the integrator grid, multiplied by
    ``exp(aleph_j t)`` and projected onto ``K`` harmonics.
    """
    path = mono.path if mono.path is not None else integrate_fundamental(a0)
    times = path.times[:-1]
    if len(times) < 2 * (2 * K + 1):
        raise CutoffTooSmall(f"{len(times)} integrator steps cannot resolve {K} harmonics")
    modes = []
    for j, exponent in enumerate(mono.exponents):
        y = path.matrices[:-1] @ mono.eigvecs[:, j]
        samples = y * np.exp(exponent * times)[:, np.newaxis]
        coeffs, discarded = fourier_coefficients(
            samples, K, aliasing_tolerance=aliasing_tolerance
        )
        shape = PeriodicVectorSeries(a0.omega, normalize_shape(coeffs), discarded)
        modes.append(FloquetMode(j + 1, complex(exponent), shape))
    return tuple(modes)


def autonomous_modes(
    a0: PeriodicMatrixSeries,
    K: int = DEFAULT_HARMONICS,
    *,
    condition_limit: float = DEFAULT_CONDITION_LIMIT,
) -> Tuple[FloquetMode, ...]:
    """Exact modes of a constant ``a0`` from its own eigen-decomposition.

    ``v exp(lambda t)`` has exponent ``-lambda``; moving that onto the
    canonical branch by ``m`` multiples of ``1j*omega`` leaves the single
    harmonic ``-m`` in the shape.
    """
    if a0.K != 0:
        raise InputError("autonomous modes need constant coefficients")
    omega = a0.omega
    eigenvalues, eigvecs = scipy.linalg.eig(a0.coefficient(0))
    condition = float(np.linalg.cond(eigvecs))
    if not np.isfinite(condition) or condition > condition_limit:
        raise DefectiveMonodromy(
            f"coefficient eigenvectors have condition number {condition:.3g}", condition
        )
    modes = []
    for j, lam in enumerate(eigenvalues):
        m = canonical_shift(complex(-lam), omega)
        if abs(m) > K:
            raise CutoffTooSmall(f"mode {j + 1} needs harmonic {-m}, cutoff is {K}")
        vector = normalize_shape(np.asarray(eigvecs[:, j], dtype=np.complex128))
        shape = PeriodicVectorSeries.from_harmonics(omega, {-m: vector}, K=K)
        modes.append(FloquetMode(j + 1, complex(-lam) - 1j * m * omega, shape))
    return tuple(modes)


def build_dual_basis(
    modes: Sequence[FloquetMode],
    *,
    K: Optional[int] = None,
    samples: Optional[int] = None,
    aliasing_tolerance: float = DEFAULT_ALIASING_TOLERANCE,
) -> Tuple[PeriodicVectorSeries, ...]:
    """Dual vectors biorthogonal to the mode shapes.

    The ``j``-th dual is the ``j``-th row of the pointwise inverse of the
    matrix whose columns are the mode shapes, projected onto ``K`` harmonics.

    :raises SingularBasis: If the mode matrix is singular at a sample point.
    """
    if K is None:
        K = max(mode.shape.K for mode in modes)
    N = 4 * (2 * K + 1) if samples is None else samples
    Phi = columns([mode.shape for mode in modes])
    values = evaluate(Phi, sample_times(Phi.omega, N))
    conditions = np.linalg.cond(values)
    worst = float(np.max(conditions))
    if not np.isfinite(worst) or worst > SINGULAR_CONDITION_LIMIT:
        raise SingularBasis(f"mode matrix condition number reaches {worst:.3g}")
    inverse = np.linalg.inv(values)
    coeffs, discarded = fourier_coefficients(
        inverse, K, aliasing_tolerance=aliasing_tolerance
    )
    return tuple(
        PeriodicVectorSeries(Phi.omega, coeffs[:, j, :], discarded)
        for j in range(len(modes))
    )


def build_floquet_basis(
    a0: PeriodicMatrixSeries,
    cutoff: int,
    *,
    harmonics: int = DEFAULT_HARMONICS,
    steps: int = DEFAULT_STEPS,
    condition_limit: float = DEFAULT_CONDITION_LIMIT,
    aliasing_tolerance: float = DEFAULT_ALIASING_TOLERANCE,
) -> FloquetBasis:
    """Modes and duals of ``H0`` for the working cutoff ``cutoff``."""
    if a0.K == 0:
        modes = autonomous_modes(a0, harmonics, condition_limit=condition_limit)
    else:
        mono = monodromy_decompose(a0, steps=steps, condition_limit=condition_limit)
        modes = periodic_eigenvectors(
            a0, mono, harmonics, aliasing_tolerance=aliasing_tolerance
        )
    duals = build_dual_basis(modes, K=harmonics, aliasing_tolerance=aliasing_tolerance)
    logger.info(
        "built Floquet basis: n=%d, exponents=%s",
        len(modes),
        ", ".join(f"{m.exponent:.6g}" for m in modes),
    )
    return FloquetBasis(modes, duals, a0.omega, cutoff)


def mode_residual(
    a0: PeriodicMatrixSeries,
    shape: PeriodicVectorSeries,
    exponent: complex,
    *,
    grid: int = 512,
) -> float:
    """Relative residual of ``H0 phi = exponent * phi`` on a dense grid.

    Equivalent to substituting ``phi(t) exp(-exponent t)`` into
    ``dy/dt = a0(t) y``.
    """
    t = sample_times(shape.omega, grid)
    phi = evaluate(shape, t)
    dphi = evaluate(derivative(shape), t)
    A = evaluate(a0, t)
    residual = dphi - np.einsum("tij,tj->ti", A, phi) - exponent * phi
    scale = float(np.max(np.linalg.norm(phi, axis=1)))
    return float(np.max(np.linalg.norm(residual, axis=1))) / scale


def biorthogonality_error(basis: FloquetBasis, kmax: int = 3) -> float:
    """Largest deviation of ``<jk|j'k'>`` from the Kronecker delta, ``|k| <= kmax``."""
    pairings = pairing_matrix(basis, kmax)
    return float(np.max(np.abs(pairings - np.eye(pairings.shape[0]))))


def pairing_matrix(basis: FloquetBasis, kmax: int = 3) -> npt.NDArray[np.complex128]:
    """The matrix of ``<jk|j'k'>`` over ``|k|, |k'| <= kmax``, ``j``-major."""
    labels = [BasisIndex(j, k) for j in range(1, basis.n + 1) for k in range(-kmax, kmax + 1)]
    return np.array(
        [[dual_pairing(basis.bra(r), basis.ket(c)) for c in labels] for r in labels],
        dtype=np.complex128,
    )
