# SPDX-FileCopyrightText: 2026 floquet-perturbation contributors
#
# SPDX-License-Identifier: MIT

"""Truncated Fourier series of periodic matrix and vector functions.

A series stores the harmonics ``m = -K..K`` of a ``T``-periodic function
densely, so that ``A(t) = sum(C[m] * exp(1j * m * omega * t))``. Series are
immutable: every operation returns a new one.
"""

import logging
import warnings
from dataclasses import dataclass, field
from typing import (
    Callable,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    TypeVar,
    Union,
    overload,
)

import numpy as np
import numpy.typing as npt

from .errors import AliasingWarning, DimensionMismatch, FrequencyMismatch

logger = logging.getLogger(__name__)

ComplexArray = npt.NDArray[np.complex128]
FloatArray = npt.NDArray[np.float64]
Times = Union[float, Sequence[float], FloatArray]

# Fraction of total power allowed outside the retained harmonics.
DEFAULT_ALIASING_TOLERANCE = 1e-8

# Relative tolerance when comparing fundamental frequencies.
FREQUENCY_RTOL = 1e-12

S = TypeVar("S", bound="PeriodicSeries")


def harmonics(K: int) -> npt.NDArray[np.int64]:
    """The harmonic indices ``-K..K`` in storage order."""
    return np.arange(-K, K + 1, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class PeriodicSeries:
    """Common storage and arithmetic of matrix and vector series.

    ``coeffs[m + K]`` holds the coefficient of harmonic ``m``.
    """

    omega: float
    coeffs: ComplexArray
    discarded_power: float = field(default=0.0)

    #: Number of trailing axes of one coefficient (2 for matrices, 1 for vectors).
    value_ndim = 0

    def __post_init__(self) -> None:
        if not np.isfinite(self.omega) or self.omega <= 0.0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        coeffs = np.array(self.coeffs, dtype=np.complex128)
        if coeffs.ndim != self.value_ndim + 1:
            raise DimensionMismatch(
                f"{type(self).__name__} coefficients need {self.value_ndim + 1} axes,"
                f" got shape {coeffs.shape}"
            )
        if coeffs.shape[0] % 2 != 1:
            raise DimensionMismatch("coefficient count must be 2K+1")
        if coeffs.shape[1] < 1:
            raise DimensionMismatch("dimension n must be at least 1")
        coeffs.setflags(write=False)
        object.__setattr__(self, "omega", float(self.omega))
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def K(self) -> int:
        """Truncation half-width."""
        return (self.coeffs.shape[0] - 1) // 2

    @property
    def n(self) -> int:
        """Dimension of the system."""
        return int(self.coeffs.shape[1])

    @property
    def period(self) -> float:
        return 2.0 * np.pi / self.omega

    def coefficient(self, m: int) -> ComplexArray:
        """Coefficient of harmonic ``m``; zero outside the stored range."""
        if abs(m) > self.K:
            return np.zeros(self.coeffs.shape[1:], dtype=np.complex128)
        return self.coeffs[m + self.K]

    def power(self) -> float:
        """Sum of squared coefficient magnitudes (Parseval)."""
        return float(np.sum(np.abs(self.coeffs) ** 2))

    def _with(self: S, coeffs: ComplexArray, discarded: float = 0.0) -> S:
        return type(self)(self.omega, coeffs, self.discarded_power + discarded)

    def _aligned(self: S, other: S) -> Tuple[ComplexArray, ComplexArray]:
        _check_compatible(self, other)
        if type(self) is not type(other):
            raise DimensionMismatch("cannot combine matrix and vector series")
        K = max(self.K, other.K)
        return resize(self, K).coeffs, resize(other, K).coeffs

    def __add__(self: S, other: S) -> S:
        a, b = self._aligned(other)
        return self._with(a + b, other.discarded_power)

    def __sub__(self: S, other: S) -> S:
        a, b = self._aligned(other)
        return self._with(a - b, other.discarded_power)

    def __neg__(self: S) -> S:
        return self._with(-self.coeffs)

    def __mul__(self: S, scale: complex) -> S:
        return self._with(self.coeffs * scale)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class PeriodicMatrixSeries(PeriodicSeries):
    """A ``T``-periodic ``n x n`` complex matrix function."""

    value_ndim = 2

    def __post_init__(self) -> None:
        super().__post_init__()
        if self.coeffs.shape[1] != self.coeffs.shape[2]:
            raise DimensionMismatch(f"matrices must be square, got {self.coeffs.shape}")

    @classmethod
    def from_harmonics(
        cls,
        omega: float,
        harmonics: Mapping[int, npt.ArrayLike],
        *,
        n: Optional[int] = None,
        K: Optional[int] = None,
    ) -> "PeriodicMatrixSeries":
        """Build a series from a sparse ``{m: matrix}`` mapping."""
        return cls(omega, _dense_from_mapping(harmonics, 2, n, K))

    @classmethod
    def constant(cls, omega: float, matrix: npt.ArrayLike) -> "PeriodicMatrixSeries":
        return cls.from_harmonics(omega, {0: matrix})


@dataclass(frozen=True, eq=False)
class PeriodicVectorSeries(PeriodicSeries):
    """A ``T``-periodic ``n``-component complex vector function."""

    value_ndim = 1

    @classmethod
    def from_harmonics(
        cls,
        omega: float,
        harmonics: Mapping[int, npt.ArrayLike],
        *,
        n: Optional[int] = None,
        K: Optional[int] = None,
    ) -> "PeriodicVectorSeries":
        """Build a series from a sparse ``{m: vector}`` mapping."""
        return cls(omega, _dense_from_mapping(harmonics, 1, n, K))


def _dense_from_mapping(
    mapping: Mapping[int, npt.ArrayLike],
    value_ndim: int,
    n: Optional[int],
    K: Optional[int],
) -> ComplexArray:
    values = {int(m): np.asarray(v, dtype=np.complex128) for m, v in mapping.items()}
    if not values and n is None:
        raise DimensionMismatch("cannot infer n from an empty harmonic list")
    shapes = {v.shape for v in values.values()}
    if len(shapes) > 1:
        raise DimensionMismatch(f"inconsistent coefficient shapes {sorted(shapes)}")
    if values:
        shape = shapes.pop()
        if len(shape) != value_ndim:
            raise DimensionMismatch(f"expected {value_ndim}-d coefficients, got {shape}")
        if n is not None and shape[0] != n:
            raise DimensionMismatch(f"expected dimension {n}, got {shape[0]}")
    else:
        shape = (n,) * value_ndim  # type: ignore[assignment]
    max_m = max((abs(m) for m in values), default=0)
    if K is None:
        K = max_m
    elif max_m > K:
        raise DimensionMismatch(f"harmonic {max_m} exceeds cutoff {K}")
    dense = np.zeros((2 * K + 1,) + tuple(shape), dtype=np.complex128)
    for m, v in values.items():
        dense[m + K] = v
    return dense


def _check_compatible(a: PeriodicSeries, b: PeriodicSeries) -> None:
    if a.n != b.n:
        raise DimensionMismatch(f"dimension {a.n} does not match {b.n}")
    if not np.isclose(a.omega, b.omega, rtol=FREQUENCY_RTOL, atol=0.0):
        raise FrequencyMismatch(f"omega {a.omega} does not match {b.omega}")


def evaluate(series: PeriodicSeries, t: Times) -> ComplexArray:
    """Evaluate the series at time ``t``.

    :param t: A single time, or a sequence of times. For a sequence the
        result has a leading axis of the same length.
    :return: The matrix (or vector) value, or a stack of values.
    """
    times = np.asarray(t, dtype=np.float64)
    # Reduce onto one period so t and t + T give identical phases.
    reduced = np.mod(times, series.period)
    phases = np.exp(1j * series.omega * np.multiply.outer(reduced, harmonics(series.K)))
    return np.tensordot(phases, series.coeffs, axes=(phases.ndim - 1, 0))


def sample_times(omega: float, samples: int) -> FloatArray:
    """Equispaced times ``t_i = i * T / samples`` over one period."""
    return np.arange(samples, dtype=np.float64) * (2.0 * np.pi / omega / samples)


def fourier_coefficients(
    values: npt.ArrayLike,
    K: int,
    *,
    aliasing_tolerance: float = DEFAULT_ALIASING_TOLERANCE,
) -> Tuple[ComplexArray, float]:
    """Discrete Fourier coefficients of equispaced samples over one period.

    :param values: Samples along the first axis at ``sample_times``.
    :param K: Number of harmonics to keep on either side of zero.
    :param aliasing_tolerance: Fraction of the total power allowed in the
        discarded bins before an :class:`AliasingWarning` is issued.
    :return: The ``(2K+1, ...)`` coefficients and the discarded power.
    """
    samples = np.asarray(values, dtype=np.complex128)
    N = samples.shape[0]
    if N < 2 * (2 * K + 1):
        raise ValueError(f"{N} samples cannot resolve {K} harmonics; need {2 * (2 * K + 1)}")
    spectrum = np.fft.fft(samples, axis=0) / N
    coeffs = spectrum[harmonics(K) % N]
    total = float(np.sum(np.abs(spectrum) ** 2))
    discarded = max(0.0, total - float(np.sum(np.abs(coeffs) ** 2)))
    if total > 0.0 and discarded > aliasing_tolerance * total:
        warnings.warn(
            AliasingWarning(
                f"{discarded / total:.3g} of the power lies above harmonic {K}"
            ),
            stacklevel=3,
        )
    return coeffs, discarded


def project(
    sampler: Callable[[float], npt.ArrayLike],
    n: int,
    omega: float,
    K: int,
    *,
    samples: Optional[int] = None,
    aliasing_tolerance: float = DEFAULT_ALIASING_TOLERANCE,
) -> PeriodicMatrixSeries:
    """Project a periodic matrix function onto ``K`` harmonics.

    The function is sampled at ``samples`` equispaced points over one period
    (default ``4 * (2K + 1)``, never fewer than ``2 * (2K + 1)``) and
    transformed with the DFT, which is exact for band-limited input.
    """
    values = _sample(sampler, omega, K, samples, (n, n))
    coeffs, discarded = fourier_coefficients(
        values, K, aliasing_tolerance=aliasing_tolerance
    )
    return PeriodicMatrixSeries(omega, coeffs, discarded)


def project_vector(
    sampler: Callable[[float], npt.ArrayLike],
    n: int,
    omega: float,
    K: int,
    *,
    samples: Optional[int] = None,
    aliasing_tolerance: float = DEFAULT_ALIASING_TOLERANCE,
) -> PeriodicVectorSeries:
    """Vector counterpart of :func:`project`."""
    values = _sample(sampler, omega, K, samples, (n,))
    coeffs, discarded = fourier_coefficients(
        values, K, aliasing_tolerance=aliasing_tolerance
    )
    return PeriodicVectorSeries(omega, coeffs, discarded)


def _sample(
    sampler: Callable[[float], npt.ArrayLike],
    omega: float,
    K: int,
    samples: Optional[int],
    shape: Tuple[int, ...],
) -> ComplexArray:
    N = 4 * (2 * K + 1) if samples is None else samples
    values = np.array(
        [np.asarray(sampler(float(t)), dtype=np.complex128) for t in sample_times(omega, N)]
    )
    if values.shape[1:] != shape:
        raise DimensionMismatch(f"sampler returned shape {values.shape[1:]}, expected {shape}")
    return values


def resize(series: S, K: int) -> S:
    """Zero-pad or truncate to cutoff ``K``, recording any dropped power."""
    if K == series.K:
        return series
    if K > series.K:
        pad = K - series.K
        widths = [(pad, pad)] + [(0, 0)] * series.value_ndim
        return series._with(np.pad(series.coeffs, widths))
    cut = series.K - K
    kept = series.coeffs[cut:-cut]
    dropped = series.power() - float(np.sum(np.abs(kept) ** 2))
    if dropped > 0.0:
        logger.debug("truncating to K=%d drops power %.3g", K, dropped)
    return series._with(kept, max(0.0, dropped))


def shift(series: S, k: int) -> S:
    """Multiply the series by ``exp(1j * k * omega * t)``."""
    if k == 0:
        return series
    K = series.K + abs(k)
    out = np.zeros((2 * K + 1,) + series.coeffs.shape[1:], dtype=np.complex128)
    start = K - series.K + k
    out[start : start + 2 * series.K + 1] = series.coeffs
    return series._with(out)


def derivative(series: S) -> S:
    """Time derivative, computed harmonic by harmonic."""
    factor = 1j * series.omega * harmonics(series.K)
    return series._with(
        series.coeffs * factor.reshape((-1,) + (1,) * series.value_ndim)
    )


@overload
def series_product(
    a: PeriodicMatrixSeries, b: PeriodicMatrixSeries, *, truncate: Optional[int] = None
) -> PeriodicMatrixSeries:
    ...


@overload
def series_product(
    a: PeriodicMatrixSeries, b: PeriodicVectorSeries, *, truncate: Optional[int] = None
) -> PeriodicVectorSeries:
    ...


def series_product(
    a: PeriodicMatrixSeries,
    b: Union[PeriodicMatrixSeries, PeriodicVectorSeries],
    *,
    truncate: Optional[int] = None,
) -> Union[PeriodicMatrixSeries, PeriodicVectorSeries]:
    """Pointwise product ``a(t) @ b(t)`` as a convolution of coefficients.

    :param truncate: Optional cutoff for the result. By default the result
        keeps all ``K_a + K_b`` harmonics.
    """
    _check_compatible(a, b)
    Ka, Kb = a.K, b.K
    out = np.zeros((2 * (Ka + Kb) + 1,) + b.coeffs.shape[1:], dtype=np.complex128)
    width = 2 * Kb + 1
    for p in range(2 * Ka + 1):
        if isinstance(b, PeriodicMatrixSeries):
            out[p : p + width] += a.coeffs[p] @ b.coeffs
        else:
            out[p : p + width] += b.coeffs @ a.coeffs[p].T
    result = b._with(out, a.discarded_power)
    if truncate is not None:
        result = resize(result, truncate)
    return result


def dual_pairing(phi_plus: PeriodicVectorSeries, chi: PeriodicVectorSeries) -> complex:
    """The bilinear pairing ``(1/T) * integral(sum_j phi_plus_j(t) * chi_j(t))``.

    Neither argument is conjugated. By Parseval this is the sum over ``m`` of
    ``phi_plus[-m] . chi[m]``.
    """
    _check_compatible(phi_plus, chi)
    K = min(phi_plus.K, chi.K)
    left = phi_plus.coeffs[phi_plus.K - K : phi_plus.K + K + 1][::-1]
    right = chi.coeffs[chi.K - K : chi.K + K + 1]
    return complex(np.sum(left * right))


def columns(vectors: Sequence[PeriodicVectorSeries]) -> PeriodicMatrixSeries:
    """The matrix series whose ``j``-th column is ``vectors[j]``."""
    K = max(v.K for v in vectors)
    padded = [resize(v, K) for v in vectors]
    for v in padded[1:]:
        _check_compatible(padded[0], v)
    return PeriodicMatrixSeries(
        padded[0].omega, np.stack([v.coeffs for v in padded], axis=2)
    )


def rows(vectors: Sequence[PeriodicVectorSeries]) -> PeriodicMatrixSeries:
    """The matrix series whose ``j``-th row is ``vectors[j]``."""
    K = max(v.K for v in vectors)
    padded = [resize(v, K) for v in vectors]
    for v in padded[1:]:
        _check_compatible(padded[0], v)
    return PeriodicMatrixSeries(
        padded[0].omega, np.stack([v.coeffs for v in padded], axis=1)
    )
