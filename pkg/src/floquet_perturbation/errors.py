# SPDX-FileCopyrightText: 2026 floquet-perturbation contributors
#
# SPDX-License-Identifier: MIT

"""Exceptions and warnings raised by the library.

Everything derives from :class:`FloquetError`. Problems with the input (bad
shapes, bad files, bad command lines) are :class:`InputError` and also
``ValueError``; failures of the numerics on valid input are
:class:`NumericalError`.
"""

from typing import TYPE_CHECKING, Any, List, Optional, Sequence, Tuple

if TYPE_CHECKING:
    from .base import BasisIndex


class FloquetError(Exception):
    """Base class of every error raised by this package."""


class InputError(FloquetError, ValueError):
    """The caller supplied something the library cannot work with."""


class NumericalError(FloquetError):
    """A computation on valid input failed or cannot be trusted."""


class DimensionMismatch(InputError):
    """Two series (or a series and a matrix) have different dimensions."""


class FrequencyMismatch(InputError):
    """Two series have different fundamental frequencies."""


class CutoffTooSmall(InputError):
    """The harmonic cutoff would silently drop couplings."""


class UsageError(InputError):
    """A command was invoked with an invalid combination of options."""


class ParseError(InputError):
    """A problem file is not well-formed."""

    def __init__(self, message: str, line: Optional[int] = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(InputError):
    """A problem file is well-formed but violates an invariant."""

    def __init__(
        self, message: str, field: Optional[str] = None, line: Optional[int] = None
    ) -> None:
        self.reason = message
        self.field = field
        self.line = line
        prefix = ""
        if line is not None:
            prefix += f"line {line}: "
        if field is not None:
            prefix += f"{field}: "
        super().__init__(prefix + message)


class NonFiniteState(NumericalError):
    """The integrated fundamental matrix overflowed."""


class DefectiveMonodromy(NumericalError):
    """The monodromy matrix is (numerically) not diagonalizable."""

    def __init__(self, message: str, condition: float) -> None:
        self.condition = condition
        super().__init__(message)


class SingularBasis(NumericalError):
    """The mode shapes are not pointwise linearly independent."""


class SingularFundamental(NumericalError):
    """The fundamental matrix could not be inverted on the grid."""


class AmbiguousMatch(NumericalError):
    """Two eigenvectors of the truncated operator claim the same target."""

    def __init__(self, message: str, candidates: Sequence[complex]) -> None:
        self.candidates = list(candidates)
        super().__init__(message)


class CutoffUnstable(NumericalError):
    """An eigenvalue moved too far when the cutoff was increased."""

    def __init__(self, message: str, drift: float) -> None:
        self.drift = drift
        super().__init__(message)


class SmallDenominator(NumericalError):
    """A Rayleigh-Schrodinger denominator is below the degeneracy threshold.

    The Wigner-Brillouin solver is the intended fallback.
    """

    def __init__(self, gaps: "Sequence[Tuple[BasisIndex, complex]]") -> None:
        self.gaps: "List[Tuple[BasisIndex, complex]]" = list(gaps)
        labels = ", ".join(f"({idx.j},{idx.k}): |gap|={abs(g):.3g}" for idx, g in gaps)
        super().__init__(f"small denominators at {labels}")


class NoConvergence(NumericalError):
    """A fixed-point iteration exhausted its iteration budget."""

    def __init__(self, message: str, last: complex, residual: float) -> None:
        self.last = last
        self.residual = residual
        super().__init__(message)


class DenominatorHit(NumericalError):
    """An iterate landed on a pole of the self-consistent equation."""

    def __init__(self, message: str, pole: Any) -> None:
        self.pole = pole
        super().__init__(message)


class AliasingWarning(UserWarning):
    """Significant power was found above the retained harmonics."""
