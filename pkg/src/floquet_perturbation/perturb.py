# SPDX-FileCopyrightText: 2026 floquet-perturbation contributors
#
# SPDX-License-Identifier: MIT

"""Perturbed eigenvalues of ``H = H0 + V`` in the ``|jk>`` basis.

The system is split as ``a(t) = a0(t) - V(t)`` so that
``H = d/dt - a(t) = H0 + V``. Matrix elements ``<jk|V|j'k'>`` depend on
``k - k'`` only: they are the harmonics of the coupling series
``W(t) = D(t) V(t) Phi(t)`` where the rows of ``D`` are the dual vectors and
the columns of ``Phi`` the mode shapes.

Three solvers are provided for a target ``|jk>``:

* :func:`rs_solve` - Rayleigh-Schrodinger series with unperturbed
  denominators ``aleph_jk - aleph_j'k'``, through second order.
* :func:`wb_solve` - Wigner-Brillouin series with denominators
  ``mu - aleph_j'k'``, solved self-consistently for ``mu``.
* :func:`direct_eigensolve` - dense diagonalization of the truncated
  operator, the non-perturbative reference.
"""

import enum
import logging
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import numpy.typing as npt
import scipy.linalg

from .base import BasisIndex, FloquetBasis, basis_eigenvalue, canonical_exponent
from .errors import (
    AmbiguousMatch,
    CutoffTooSmall,
    CutoffUnstable,
    DenominatorHit,
    DimensionMismatch,
    FrequencyMismatch,
    InputError,
    NoConvergence,
    SmallDenominator,
)
from .series import (
    FREQUENCY_RTOL,
    ComplexArray,
    PeriodicMatrixSeries,
    columns,
    dual_pairing,
    rows,
    series_product,
)

logger = logging.getLogger(__name__)

#: Default degeneracy threshold, in units of omega.
DEFAULT_DEGENERACY = 1e-3

#: Default damping of the Wigner-Brillouin fixed-point iteration.
DEFAULT_DAMPING = 0.5

#: Default tolerance of the dense eigensolve.
DEFAULT_TOL = 1e-10

#: Default fixed-point tolerance of the Wigner-Brillouin iteration.
DEFAULT_WB_TOL = 1e-12

#: Default iteration budget of the Wigner-Brillouin iteration.
DEFAULT_MAX_ITER = 200

#: A result is cutoff-stable if it moves less than this many tolerances at K + 2.
DRIFT_FACTOR = 10.0

#: Two eigenvectors whose target weights are within this ratio are ambiguous.
AMBIGUITY_RATIO = 0.9

#: Iterates closer than this to a pole count as landing on it.
POLE_RADIUS = 1e-12

#: Couplings below this fraction of the largest one are treated as zero.
COUPLING_FLOOR = 1e-13


class Method(str, enum.Enum):
    """How an eigenvalue was obtained."""

    RS = "rs"
    WB = "wb"
    DIRECT = "direct"


@dataclass(frozen=True, eq=False)
class PerturbationProblem:
    """An unperturbed basis, a perturbation, and the working cutoff."""

    basis: FloquetBasis
    V: PeriodicMatrixSeries
    cutoff: int
    degeneracy_threshold: float

    def __post_init__(self) -> None:
        if self.V.n != self.basis.n:
            raise DimensionMismatch(
                f"perturbation dimension {self.V.n} does not match basis {self.basis.n}"
            )
        if not np.isclose(self.V.omega, self.basis.omega, rtol=FREQUENCY_RTOL, atol=0.0):
            raise FrequencyMismatch(
                f"perturbation omega {self.V.omega} does not match basis {self.basis.omega}"
            )
        if self.cutoff < 0:
            raise InputError(f"cutoff must be non-negative, got {self.cutoff}")

    @classmethod
    def create(
        cls,
        basis: FloquetBasis,
        V: PeriodicMatrixSeries,
        *,
        cutoff: Optional[int] = None,
        degeneracy_threshold: Optional[float] = None,
    ) -> "PerturbationProblem":
        """Fill in the basis cutoff and a threshold of ``1e-3 * omega``."""
        return cls(
            basis,
            V,
            basis.cutoff if cutoff is None else cutoff,
            DEFAULT_DEGENERACY * basis.omega
            if degeneracy_threshold is None
            else degeneracy_threshold,
        )

    @property
    def n(self) -> int:
        return self.basis.n

    @property
    def omega(self) -> float:
        return self.basis.omega

    @cached_property
    def coupling(self) -> PeriodicMatrixSeries:
        """``W(t)``; harmonic ``k - k'`` of entry ``(j, j')`` is ``<jk|V|j'k'>``."""
        D = rows(self.basis.duals)
        Phi = columns([mode.shape for mode in self.basis.modes])
        return series_product(series_product(D, self.V), Phi)

    def with_cutoff(self, cutoff: int) -> "PerturbationProblem":
        wider = replace(self, cutoff=cutoff)
        if "coupling" in self.__dict__:
            wider.__dict__["coupling"] = self.coupling
        return wider

    def scaled(self, s: float) -> "PerturbationProblem":
        """The same problem with ``V`` replaced by ``s * V``."""
        return replace(self, V=self.V * s)

    def labels(self) -> Tuple[BasisIndex, ...]:
        """Basis labels in ``j``-major order, ``|k| <= cutoff``."""
        K = self.cutoff
        return tuple(
            BasisIndex(j, k) for j in range(1, self.n + 1) for k in range(-K, K + 1)
        )

    def eigenvalue(self, idx: BasisIndex) -> complex:
        return basis_eigenvalue(idx, self.basis.modes, self.omega)

    def check_target(self, target: BasisIndex) -> None:
        if not 1 <= target.j <= self.n or abs(target.k) > self.cutoff:
            raise InputError(
                f"target ({target.j},{target.k}) outside 1..{self.n} x |k|<={self.cutoff}"
            )


@dataclass(frozen=True, eq=False)
class TruncatedOperator:
    """Dense matrix of an operator on the basis vectors with ``|k| <= cutoff``."""

    cutoff: int
    n: int
    entries: ComplexArray
    unperturbed: ComplexArray
    index_map: Tuple[BasisIndex, ...]

    def __post_init__(self) -> None:
        dim = self.n * (2 * self.cutoff + 1)
        if self.entries.shape != (dim, dim) or len(self.index_map) != dim:
            raise DimensionMismatch(f"truncated operator must be {dim} x {dim}")

    @property
    def dim(self) -> int:
        return len(self.index_map)

    @property
    def perturbation(self) -> ComplexArray:
        """The matrix of ``V`` alone."""
        return self.entries - np.diag(self.unperturbed)

    def index_of(self, idx: BasisIndex) -> int:
        if not 1 <= idx.j <= self.n or abs(idx.k) > self.cutoff:
            raise InputError(f"({idx.j},{idx.k}) is outside the truncation")
        return (idx.j - 1) * (2 * self.cutoff + 1) + idx.k + self.cutoff

    def label(self, row: int) -> BasisIndex:
        return self.index_map[row]


@dataclass(frozen=True, eq=False)
class PerturbationSolution:
    """An eigenvalue ``mu`` of ``H`` continued from the basis vector ``target``."""

    target: BasisIndex
    mu: complex
    vector_coeffs: Dict[BasisIndex, complex]
    order_contributions: Tuple[complex, ...]
    method: Method
    order: Optional[int] = None
    iterations: int = 0
    converged: bool = True
    small_denominators: Tuple[Tuple[BasisIndex, complex], ...] = ()
    residual: float = 0.0
    cutoff_drift: float = 0.0
    notes: Tuple[str, ...] = field(default=())


def v_matrix_element(
    p: PerturbationProblem, row: BasisIndex, col: BasisIndex
) -> complex:
    """``<row|V|col>`` evaluated by the dual pairing of the series."""
    p.check_target(row)
    p.check_target(col)
    return dual_pairing(p.basis.bra(row), series_product(p.V, p.basis.ket(col)))


def assemble_truncated_H(p: PerturbationProblem) -> TruncatedOperator:
    """The matrix of ``H0 + V`` over ``|k|, |k'| <= cutoff``.

    :raises CutoffTooSmall: If harmonics of ``V`` reach beyond ``2 * cutoff``,
        which would drop couplings between every pair of retained vectors.
    """
    K = p.cutoff
    if p.V.K > 2 * K:
        raise CutoffTooSmall(f"perturbation has harmonic {p.V.K} beyond 2K = {2 * K}")
    labels = p.labels()
    dim = len(labels)
    js = np.array([idx.j - 1 for idx in labels])
    ks = np.array([idx.k for idx in labels])
    W = p.coupling
    dk = ks[:, np.newaxis] - ks[np.newaxis, :]
    mask = np.abs(dk) <= W.K
    row_j = np.broadcast_to(js[:, np.newaxis], (dim, dim))
    col_j = np.broadcast_to(js[np.newaxis, :], (dim, dim))
    entries = np.zeros((dim, dim), dtype=np.complex128)
    entries[mask] = W.coeffs[dk[mask] + W.K, row_j[mask], col_j[mask]]
    unperturbed = np.array([p.eigenvalue(idx) for idx in labels], dtype=np.complex128)
    entries += np.diag(unperturbed)
    return TruncatedOperator(K, p.n, entries, unperturbed, labels)


def _floor(V: ComplexArray) -> float:
    return COUPLING_FLOOR * max(1.0, float(np.max(np.abs(V), initial=0.0)))


def scan_small_denominators(
    p: PerturbationProblem, target: BasisIndex
) -> List[Tuple[BasisIndex, complex]]:
    """Basis vectors whose eigenvalue lies within the degeneracy threshold.

    :return: ``(label, aleph_target - aleph_label)`` pairs, closest first.
    """
    p.check_target(target)
    aleph = p.eigenvalue(target)
    found = []
    for idx in p.labels():
        if idx == target:
            continue
        gap = aleph - p.eigenvalue(idx)
        if abs(gap) < p.degeneracy_threshold:
            found.append((idx, gap))
    return sorted(found, key=lambda item: (abs(item[1]), item[0]))


def _check_order(order: int) -> None:
    if order not in (1, 2):
        raise InputError(f"series order must be 1 or 2, got {order}")


def _vector(op: TruncatedOperator, coeffs: ComplexArray) -> Dict[BasisIndex, complex]:
    return {label: complex(c) for label, c in zip(op.index_map, coeffs)}


def solution_vector(op: TruncatedOperator, solution: PerturbationSolution) -> ComplexArray:
    """The solution's coefficients laid out in the operator's index order."""
    return np.array(
        [solution.vector_coeffs.get(label, 0.0) for label in op.index_map],
        dtype=np.complex128,
    )


def eigen_residual(op: TruncatedOperator, solution: PerturbationSolution) -> float:
    """``||(H - mu) v|| / ||v||`` for the solution vector ``v``."""
    v = solution_vector(op, solution)
    r = op.entries @ v - solution.mu * v
    return float(np.linalg.norm(r) / np.linalg.norm(v))


def _match_eigenvector(
    op: TruncatedOperator, target: BasisIndex
) -> Tuple[complex, ComplexArray]:
    """The eigenpair whose eigenvector weighs most on ``target``."""
    values, vectors = scipy.linalg.eig(op.entries)
    row = op.index_of(target)
    weights = np.abs(vectors[row, :]) / np.linalg.norm(vectors, axis=0)
    order = np.argsort(-weights, kind="stable")
    best = int(order[0])
    if len(order) > 1 and weights[order[1]] >= AMBIGUITY_RATIO * weights[best]:
        raise AmbiguousMatch(
            f"eigenvectors tie on ({target.j},{target.k}):"
            f" weights {weights[best]:.3g} and {weights[order[1]]:.3g}",
            [complex(values[best]), complex(values[order[1]])],
        )
    vector = vectors[:, best] / vectors[row, best]
    return complex(values[best]), np.asarray(vector, dtype=np.complex128)


def _drift(
    p: PerturbationProblem, mu: complex, solve: Callable[[PerturbationProblem], complex]
) -> float:
    wider = p.with_cutoff(p.cutoff + 2)
    drift = abs(solve(wider) - mu)
    logger.debug("cutoff %d -> %d moves mu by %.3g", p.cutoff, wider.cutoff, drift)
    return drift


def _stability(
    drift: float, tol: float, strict: bool, target: BasisIndex
) -> bool:
    stable = drift <= DRIFT_FACTOR * tol
    if strict and not stable:
        raise CutoffUnstable(
            f"({target.j},{target.k}) moved by {drift:.3g} when the cutoff grew by 2",
            drift,
        )
    return stable


def direct_eigensolve(
    p: PerturbationProblem,
    target: BasisIndex,
    *,
    tol: float = DEFAULT_TOL,
    strict: bool = False,
) -> PerturbationSolution:
    """Diagonalize the truncated operator and follow the eigenvector of ``target``.

    The eigenvalue is picked by the largest target coefficient rather than by
    proximity to ``aleph_jk``, and the eigenvector is scaled so that
    coefficient is 1.

    :param tol: Tolerance for the cutoff-stability check; ``mu`` must move
        less than ``10 * tol`` when the cutoff grows by 2.
    :param strict: Raise :class:`CutoffUnstable` instead of clearing
        ``converged`` when the check fails.
    :raises AmbiguousMatch: If two eigenvectors carry similar target weight.
    """
    p.check_target(target)
    op = assemble_truncated_H(p)
    mu, vector = _match_eigenvector(op, target)
    drift = _drift(
        p, mu, lambda q: _match_eigenvector(assemble_truncated_H(q), target)[0]
    )
    solution = PerturbationSolution(
        target=target,
        mu=mu,
        vector_coeffs=_vector(op, vector),
        order_contributions=(),
        method=Method.DIRECT,
        converged=_stability(drift, tol, strict, target),
        small_denominators=tuple(scan_small_denominators(p, target)),
        cutoff_drift=drift,
    )
    return replace(solution, residual=eigen_residual(op, solution))


def _rs_series(
    op: TruncatedOperator, target: BasisIndex, order: int, threshold: float
) -> Tuple[complex, ComplexArray, Tuple[complex, ...]]:
    t = op.index_of(target)
    aleph = op.unperturbed
    V = op.perturbation
    floor = _floor(V)
    others = np.arange(op.dim) != t
    gaps = aleph[t] - aleph
    coupled = others & ((np.abs(V[:, t]) > floor) | (np.abs(V[t, :]) > floor))
    small = coupled & (np.abs(gaps) < threshold)
    safe = np.where(coupled & ~small, gaps, 1.0)

    first = complex(V[t, t])
    c1 = np.where(coupled, V[:, t] / safe, 0.0)
    c1[t] = 0.0
    second = complex(np.sum(np.where(coupled, V[t, :] * c1, 0.0)))
    coeffs = c1.copy()
    contributions: Tuple[complex, ...] = (first,)
    if order == 2:
        contributions = (first, second)
        numerator = V @ c1 - first * c1
        reached = others & (np.abs(numerator) > floor)
        small |= reached & (np.abs(gaps) < threshold)
        safe2 = np.where(reached & ~small, gaps, 1.0)
        coeffs = coeffs + np.where(reached, numerator / safe2, 0.0)
    if np.any(small):
        offending = sorted(
            ((op.label(int(i)), complex(gaps[i])) for i in np.flatnonzero(small)),
            key=lambda item: (abs(item[1]), item[0]),
        )
        raise SmallDenominator(offending)
    coeffs[t] = 1.0
    return aleph[t] + sum(contributions), coeffs, contributions


def rs_solve(
    p: PerturbationProblem,
    target: BasisIndex,
    order: int = 2,
    *,
    tol: float = DEFAULT_TOL,
    strict: bool = False,
) -> PerturbationSolution:
    """Rayleigh-Schrodinger series for ``mu`` and the eigenvector, to ``order``.

    ``mu = aleph + <t|V|t> + sum_p <t|V|p><p|V|t> / (aleph_t - aleph_p)``;
    the vector gets the first-order coefficients
    ``<p|V|t> / (aleph_t - aleph_p)`` and, at order 2, the standard
    second-order correction.

    :raises SmallDenominator: If a coupled basis vector is within the
        degeneracy threshold of the target; use :func:`wb_solve` instead.
    """
    _check_order(order)
    p.check_target(target)
    op = assemble_truncated_H(p)
    threshold = p.degeneracy_threshold
    mu, coeffs, contributions = _rs_series(op, target, order, threshold)
    drift = _drift(
        p, mu, lambda q: _rs_series(assemble_truncated_H(q), target, order, threshold)[0]
    )
    return PerturbationSolution(
        target=target,
        mu=mu,
        vector_coeffs=_vector(op, coeffs),
        order_contributions=contributions,
        method=Method.RS,
        order=order,
        converged=_stability(drift, tol, strict, target),
        small_denominators=tuple(scan_small_denominators(p, target)),
        residual=abs(mu - op.unperturbed[op.index_of(target)] - sum(contributions)),
        cutoff_drift=drift,
    )


@dataclass(frozen=True)
class _WBState:
    mu: complex
    iterations: int
    contributions: Tuple[complex, ...]
    coeffs: ComplexArray
    residual: float
    notes: Tuple[str, ...]


def _wb_series(
    op: TruncatedOperator,
    target: BasisIndex,
    order: int,
    threshold: float,
    *,
    tol: float,
    max_iter: int,
    damping: float,
    newton: bool,
) -> _WBState:
    t = op.index_of(target)
    aleph = op.unperturbed
    V = op.perturbation
    floor = _floor(V)
    others = np.arange(op.dim) != t
    first = complex(V[t, t])
    base = complex(aleph[t]) + first

    products = V[t, :] * V[:, t]
    active = others & (np.abs(products) > floor * floor)
    poles = aleph[active]
    weights = products[active]

    def shift(mu: complex) -> complex:
        return complex(np.sum(weights / (mu - poles)))

    def hit(mu: complex) -> bool:
        return bool(poles.size) and float(np.min(np.abs(mu - poles))) < POLE_RADIUS

    mu = base
    iterations = 1
    notes: List[str] = []
    if order == 2:
        if hit(mu):
            mu = _lifted_seed(base, aleph[t], poles, weights, threshold)
            notes.append("seed lifted off a degenerate pole")
            logger.debug("WB seed for (%d,%d) lifted to %s", target.j, target.k, mu)
        for iterations in range(1, max_iter + 1):
            rhs = base + shift(mu)
            if newton:
                slope = 1.0 + complex(np.sum(weights / (mu - poles) ** 2))
                new = mu - (mu - rhs) / slope
            else:
                new = (1.0 - damping) * mu + damping * rhs
            if hit(new):
                raise DenominatorHit(
                    f"iterate {new} landed on a pole for ({target.j},{target.k})", new
                )
            step = abs(new - mu)
            mu = new
            logger.debug("WB iteration %d: mu=%s step=%.3g", iterations, mu, step)
            if step <= tol:
                break
        else:
            raise NoConvergence(
                f"no fixed point for ({target.j},{target.k}) after {max_iter} iterations",
                mu,
                abs(mu - base - shift(mu)),
            )

    denominators = np.where(others, mu - aleph, 1.0)
    c1 = np.where(others, V[:, t] / denominators, 0.0)
    coeffs = c1.copy()
    contributions: Tuple[complex, ...] = (first,)
    if order == 2:
        contributions = (first, shift(mu))
        coeffs = coeffs + np.where(others, (V @ c1) / denominators, 0.0)
    coeffs[t] = 1.0
    residual = abs(mu - complex(aleph[t]) - sum(contributions))
    return _WBState(mu, iterations, contributions, coeffs, residual, tuple(notes))


def _lifted_seed(
    base: complex,
    aleph: complex,
    poles: ComplexArray,
    weights: ComplexArray,
    threshold: float,
) -> complex:
    """Root of the two-level secular equation with the nearest degenerate pole."""
    distances = np.abs(poles - aleph)
    nearest = int(np.argmin(distances))
    if distances[nearest] >= threshold:
        return base
    gap = base - complex(poles[nearest])
    c = complex(weights[nearest])
    return base + (-gap + complex(np.sqrt(gap * gap + 4.0 * c))) / 2.0


def wb_solve(
    p: PerturbationProblem,
    target: BasisIndex,
    order: int = 2,
    *,
    tol: float = DEFAULT_WB_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    damping: float = DEFAULT_DAMPING,
    newton: bool = False,
    drift_tol: Optional[float] = None,
    strict: bool = False,
) -> PerturbationSolution:
    """Wigner-Brillouin series, solved self-consistently for ``mu``.

    At order 2, ``mu = aleph + <t|V|t> + sum_p <t|V|p><p|V|t> / (mu - aleph_p)``
    is iterated as ``mu <- (1 - damping) * mu + damping * rhs`` (or by
    Newton's method) from ``aleph + <t|V|t>`` until successive iterates agree
    to ``tol``. When that seed sits on a degenerate pole it is replaced by the
    root of the two-level secular equation with that pole.

    :param drift_tol: Tolerance of the cutoff-stability check, ``tol`` by default.
    :raises NoConvergence: If ``max_iter`` iterations do not converge.
    :raises DenominatorHit: If an iterate lands on some ``aleph_j'k'``.
    """
    _check_order(order)
    p.check_target(target)
    if not 0.0 < damping <= 1.0:
        raise InputError(f"damping must be in (0, 1], got {damping}")
    op = assemble_truncated_H(p)
    threshold = p.degeneracy_threshold

    def run(q_op: TruncatedOperator) -> _WBState:
        return _wb_series(
            q_op,
            target,
            order,
            threshold,
            tol=tol,
            max_iter=max_iter,
            damping=damping,
            newton=newton,
        )

    state = run(op)
    drift = _drift(p, state.mu, lambda q: run(assemble_truncated_H(q)).mu)
    stable = _stability(drift, tol if drift_tol is None else drift_tol, strict, target)
    return PerturbationSolution(
        target=target,
        mu=state.mu,
        vector_coeffs=_vector(op, state.coeffs),
        order_contributions=state.contributions,
        method=Method.WB,
        order=order,
        iterations=state.iterations,
        converged=stable,
        small_denominators=tuple(scan_small_denominators(p, target)),
        residual=state.residual,
        cutoff_drift=drift,
        notes=state.notes,
    )


def direct_exponents(p: PerturbationProblem) -> npt.NDArray[np.complex128]:
    """The ``n`` exponents of ``H`` read from eigenvectors centred on ``k = 0``.

    Every physical exponent appears in the truncated spectrum as a family of
    copies shifted by ``1j*k*omega``. The copy of a family with the largest
    share of its weight on the ``k = 0`` block outranks its neighbours, so the
    ``n`` eigenvectors with the largest such share are kept. A copy of a family
    already kept (same canonical exponent) is skipped while other candidates
    remain; when families coincide the remaining places are filled by share.
    The exponents are returned on the canonical branch, sorted by real part.
    No per-target matching is needed, so this also works inside resonance
    tongues where eigenvector magnitudes tie.
    """
    op = assemble_truncated_H(p)
    values, vectors = scipy.linalg.eig(op.entries)
    blocks = np.abs(vectors.reshape(p.n, 2 * p.cutoff + 1, -1)) ** 2
    per_k = blocks.sum(axis=0)
    share = per_k[p.cutoff] / per_k.sum(axis=0)
    ranked = [
        canonical_exponent(complex(values[i]), p.omega)
        for i in np.argsort(-share, kind="stable")[: 2 * p.n]
    ]
    same = 1e-9 * max(1.0, p.omega)
    kept: List[int] = []
    for i, mu in enumerate(ranked):
        if len(kept) < p.n and all(abs(mu - ranked[k]) > same for k in kept):
            kept.append(i)
    kept += [i for i in range(len(ranked)) if i not in kept][: p.n - len(kept)]
    exponents = [ranked[i] for i in kept]
    return np.array(sorted(exponents, key=lambda z: (z.real, z.imag)), dtype=np.complex128)
