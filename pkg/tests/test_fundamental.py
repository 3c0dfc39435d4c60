# SPDX-FileCopyrightText: 2026 floquet-perturbation contributors
#
# SPDX-License-Identifier: MIT

import math
from typing import Tuple

import numpy as np
import pytest
from numpy.testing import assert_allclose
from pytest import approx

from floquet_perturbation.base import (
    BasisIndex,
    FloquetMode,
    build_floquet_basis,
    integrate_fundamental,
    monodromy_decompose,
)
from floquet_perturbation.cli import build_problem
from floquet_perturbation.errors import DimensionMismatch, InputError, SingularBasis
from floquet_perturbation.fundamental import (
    FundamentalMatrix,
    assemble_fundamental,
    evaluate_fundamental,
    floquet_property_check,
    gauge_shift,
    implied_coefficient,
    modes_from_solutions,
    solve_homogeneous,
    solve_inhomogeneous,
    time_grid,
)
from floquet_perturbation.perturb import direct_eigensolve
from floquet_perturbation.problem import ProblemSpec, forcing_series, full_system
from floquet_perturbation.series import (
    PeriodicMatrixSeries,
    PeriodicVectorSeries,
    evaluate,
)


def direct_fundamental(spec: ProblemSpec) -> Tuple[FundamentalMatrix, Tuple[FloquetMode, ...]]:
    p = build_problem(spec)
    solutions = [direct_eigensolve(p, BasisIndex(j, 0)) for j in range(1, p.n + 1)]
    modes = modes_from_solutions(p.basis, solutions)
    return assemble_fundamental(modes), modes


def constant_fundamental(a: np.ndarray) -> FundamentalMatrix:
    basis = build_floquet_basis(PeriodicMatrixSeries.constant(1.0, a), 2)
    return assemble_fundamental(basis.modes, basis.duals)


def test_constant_diagonal() -> None:
    """It reproduces exp(a t) for a constant diagonal coefficient."""
    fm = constant_fundamental(np.diag([-1.0, 0.5]))
    assert_allclose(evaluate_fundamental(fm, 1.3), np.diag([math.exp(-1.3), math.exp(0.65)]), rtol=1e-12)
    assert_allclose(evaluate_fundamental(fm, 0.0), np.eye(2), atol=1e-15)


def test_constant_rotation() -> None:
    """It handles complex exponents moved onto the canonical branch."""
    a = np.array([[0.0, 1.0], [-4.0, 0.0]])
    fm = constant_fundamental(a)
    t = 0.9
    expected = np.array(
        [[math.cos(2 * t), math.sin(2 * t) / 2], [-2 * math.sin(2 * t), math.cos(2 * t)]]
    )
    assert_allclose(evaluate_fundamental(fm, t), expected, atol=1e-12)


def test_evaluate_stack() -> None:
    """It evaluates a stack of times at once."""
    fm = constant_fundamental(np.diag([-1.0, 0.5]))
    values = evaluate_fundamental(fm, [0.0, 1.0, 2.0])
    assert values.shape == (3, 2, 2)
    assert values[2, 0, 0] == approx(math.exp(-2.0))


def test_singular_modes() -> None:
    """It refuses modes that are linearly dependent at t = 0."""
    shape = PeriodicVectorSeries.from_harmonics(1.0, {0: [1.0, 2.0]})
    with pytest.raises(SingularBasis):
        assemble_fundamental([FloquetMode(1, 0.0, shape), FloquetMode(2, 1.0, shape)])
    with pytest.raises(InputError):
        assemble_fundamental([])


@pytest.mark.problem("mathieu_template")
def test_dual_vectors_checked(problem: ProblemSpec) -> None:
    """It accepts the duals of the unperturbed modes only for those modes."""
    basis = build_problem(problem).basis
    fm = assemble_fundamental(basis.modes, basis.duals)
    assert_allclose(evaluate_fundamental(fm, 0.0), np.eye(2), atol=1e-12)
    _, perturbed = direct_fundamental(problem)
    with pytest.raises(InputError):
        assemble_fundamental(perturbed, basis.duals)
    with pytest.raises(DimensionMismatch):
        assemble_fundamental(basis.modes, basis.duals[:1])


@pytest.mark.problem("mathieu_template")
def test_monodromy_consistency(problem: ProblemSpec) -> None:
    """It agrees with the integrated monodromy on the exponents and U(t + T)."""
    fm, _ = direct_fundamental(problem)
    oracle = monodromy_decompose(full_system(problem)).exponents
    assert_allclose(
        sorted(fm.exponents, key=lambda z: z.imag),
        sorted(oracle, key=lambda z: z.imag),
        atol=1e-6,
    )
    check = floquet_property_check(fm, 512)
    assert check["identity"] <= 1e-9
    assert check["floquet"] <= 1e-6
    assert check["condition"] < 1e3


@pytest.mark.problem("mathieu_template")
def test_matches_rk4_path(problem: ProblemSpec) -> None:
    """It reproduces the RK4 fundamental matrix over a period."""
    fm, _ = direct_fundamental(problem)
    path = integrate_fundamental(full_system(problem), 2048)
    every = slice(None, None, 64)
    assert_allclose(
        evaluate_fundamental(fm, path.times[every]), path.matrices[every], atol=1e-8
    )


@pytest.mark.problem("mathieu_free")
def test_homogeneous_three_periods(problem: ProblemSpec) -> None:
    """It propagates y0 over three periods like repeated monodromy steps."""
    fm, _ = direct_fundamental(problem)
    t = time_grid(problem.omega, problem.grid, problem.periods)
    assert len(t) == 3 * 512 + 1
    y = solve_homogeneous(fm, problem.y0, t)
    M = integrate_fundamental(full_system(problem), 2048).monodromy
    assert_allclose(y[-1], np.linalg.matrix_power(M, 3) @ problem.y0, atol=1e-8)
    assert_allclose(y[0], problem.y0, atol=1e-12)


@pytest.mark.problem("mathieu_template")
def test_implied_coefficient(problem: ProblemSpec) -> None:
    """It recovers a0 - V from the perturbed modes."""
    fm, _ = direct_fundamental(problem)
    t = time_grid(problem.omega, 32)
    assert_allclose(implied_coefficient(fm, t), evaluate(full_system(problem), t), atol=1e-8)


@pytest.mark.problem("mathieu_template")
def test_gauge_invariance(problem: ProblemSpec) -> None:
    """It gives the same U(t) after relabeling modes by k-shifts."""
    fm, modes = direct_fundamental(problem)
    shifted = [gauge_shift(modes[0], 1), gauge_shift(modes[1], -2)]
    again = assemble_fundamental(shifted)
    assert again.exponents[0] == approx(fm.exponents[0] + 1j)
    assert again.exponents[1] == approx(fm.exponents[1] - 2j)
    t = time_grid(problem.omega, 64, 2.0)
    assert_allclose(evaluate_fundamental(again, t), evaluate_fundamental(fm, t), atol=1e-10)


@pytest.mark.problem("mathieu_template")
def test_shifted_exponent_detected(problem: ProblemSpec) -> None:
    """It catches an exponent moved by 1j*omega whose shape was not shifted."""
    fm, modes = direct_fundamental(problem)
    system = full_system(problem)
    good = floquet_property_check(fm, 256, system)
    assert good["coefficient"] <= 1e-7

    relabeled = floquet_property_check(
        assemble_fundamental([gauge_shift(modes[0], 1), modes[1]]), 256, system
    )
    assert relabeled["coefficient"] <= 1e-7

    broken = FloquetMode(1, modes[0].exponent + 1j * problem.omega, modes[0].shape)
    bad = floquet_property_check(assemble_fundamental([broken, modes[1]]), 256, system)
    # U(t + T) = U(t) U(T) is blind to the shift
    assert bad["floquet"] == approx(good["floquet"], abs=1e-9)
    assert bad["identity"] <= 1e-9
    assert bad["coefficient"] > 0.1
    assert "coefficient" not in floquet_property_check(fm, 256)


def test_integrates_constant_forcing() -> None:
    """It gives y = t for a = 0 and f = 1."""
    fm = constant_fundamental(np.zeros((1, 1)))
    forcing = PeriodicVectorSeries.from_harmonics(1.0, {0: [1.0]})
    t = time_grid(1.0, 64)
    solution = solve_inhomogeneous(fm, forcing, None, t)
    assert_allclose(solution.y_values[:, 0], t, atol=1e-12)
    assert solution.residual_max <= 1e-10
    assert_allclose(solution.y0, [0.0])


@pytest.mark.problem("mathieu_driven")
def test_driven_mathieu(problem: ProblemSpec) -> None:
    """It solves the forced equation with a small ODE residual."""
    fm, _ = direct_fundamental(problem)
    t = time_grid(problem.omega, problem.grid, problem.periods)
    solution = solve_inhomogeneous(
        fm, forcing_series(problem), problem.y0, t, system=full_system(problem)
    )
    assert solution.residual_max <= 1e-5
    assert_allclose(solution.y_values[0], [0.0, 0.0], atol=1e-15)
    assert np.max(np.abs(solution.y_values)) > 0.1
    assert np.max(np.abs(solution.y_values.imag)) < 1e-8


@pytest.mark.problem("mathieu_driven")
def test_superposition(problem: ProblemSpec) -> None:
    """It is linear in the forcing and in the initial state."""
    fm, _ = direct_fundamental(problem)
    t = time_grid(problem.omega, problem.grid, problem.periods)
    f1 = np.stack([np.sin(t), np.zeros_like(t)], axis=1)
    f2 = np.stack([np.zeros_like(t), np.cos(2 * t)], axis=1)
    y0 = np.array([0.3, -1.0])
    a = solve_inhomogeneous(fm, f1, None, t).y_values
    b = solve_inhomogeneous(fm, f2, None, t).y_values
    c = solve_inhomogeneous(fm, None, y0, t).y_values
    total = solve_inhomogeneous(fm, 2.0 * f1 + f2, y0, t).y_values
    assert_allclose(total, 2.0 * a + b + c, atol=1e-9)


@pytest.mark.problem("mathieu_driven")
def test_forcing_callable(problem: ProblemSpec) -> None:
    """It samples a forcing function the same way as the series."""
    fm, _ = direct_fundamental(problem)
    t = time_grid(problem.omega, 128)
    from_series = solve_inhomogeneous(fm, forcing_series(problem), None, t).y_values
    from_function = solve_inhomogeneous(fm, lambda s: [math.sin(s), 0.0], None, t).y_values
    assert_allclose(from_function, from_series, atol=1e-12)


def test_invalid_inputs() -> None:
    """It checks the grid, the initial state and the forcing shape."""
    fm = constant_fundamental(np.diag([-1.0, 0.5]))
    with pytest.raises(InputError):
        solve_inhomogeneous(fm, None, [1.0, 0.0], [0.5, 1.0])
    with pytest.raises(InputError):
        solve_inhomogeneous(fm, None, [1.0, 0.0], [0.0, 1.0, 0.5])
    with pytest.raises(DimensionMismatch):
        solve_inhomogeneous(fm, None, [1.0, 0.0, 0.0], [0.0, 1.0])
    with pytest.raises(DimensionMismatch):
        solve_inhomogeneous(fm, np.zeros((2, 3)), None, [0.0, 1.0])
    with pytest.raises(InputError):
        time_grid(1.0, 2)
