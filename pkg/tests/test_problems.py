"""Problem suite: construction, analytic gradients, operators, fd oracle."""
import math

import numpy as np
import pytest

from ssopt import (
    QuadraticOperator,
    finite_diff_gradient,
    gradient_rel_error,
    make_example,
    quadratic_matvec,
)

ALL_IDS = ("ex1", "ex2", "ex3", "ex4", "ex4pre", "ex5", "ex6", "ex8", "ex9")


def _problem(pid, n=40):
    if pid == "ex8":
        return make_example("ex8", 100)
    return make_example(pid, n, seed=3 if pid == "ex9" else None)


# -- construction and validation ---------------------------------------------

def test_unknown_id_rejected():
    with pytest.raises(ValueError, match="unknown problem id"):
        make_example("ex7", 10)


def test_ex6_odd_dimension_rejected():
    with pytest.raises(ValueError, match="even"):
        make_example("ex6", 11)


def test_ex8_dimension_is_fixed():
    with pytest.raises(ValueError, match="n=100"):
        make_example("ex8", 50)
    assert make_example("ex8", 100).dim == 100


def test_ex9_needs_seed():
    with pytest.raises(ValueError, match="seed"):
        make_example("ex9", 50)


@pytest.mark.parametrize("pid,expected", [
    ("ex1", [1.0, 1.0, 1.0, 1.0]),
    ("ex2", [-0.8, -0.8, -0.8, -0.8]),
    ("ex3", [-1.2, -1.2, -1.2, -1.2]),
    ("ex4", [0.3, 0.3, 0.3, 0.3]),
    ("ex5", [-1.0, 2.0, 1.0, -1.0]),   # repeating triple, truncated
    ("ex6", [3.0, 0.1, 3.0, 0.1]),
])
def test_initial_points(pid, expected):
    p = make_example(pid, 4)
    np.testing.assert_array_equal(p.x0, expected)


def test_ex5_alternative_start_pattern():
    p = make_example("ex5", 5, ex5_pattern="pair")
    np.testing.assert_array_equal(p.x0, [-1.2, 1.0, -1.2, 1.0, -1.2])
    with pytest.raises(ValueError):
        make_example("ex5", 5, ex5_pattern="weird")


def test_ex8_setup():
    p = make_example("ex8", 100)
    np.testing.assert_array_equal(p.x0, np.zeros(100))
    np.testing.assert_array_equal(p.operator.diag, np.arange(1.0, 101.0))
    np.testing.assert_array_equal(p.operator.rhs, np.ones(100))
    # gradient at the origin is -b
    np.testing.assert_array_equal(p.gradient(p.x0), -np.ones(100))


def test_gradient_dimension_mismatch():
    p = make_example("ex1", 5)
    with pytest.raises(ValueError, match="length"):
        p.gradient(np.ones(4))


# -- analytic gradient spot values -------------------------------------------

def test_ex1_gradient_values():
    p = make_example("ex1", 3)
    np.testing.assert_allclose(p.gradient(p.x0), np.full(3, np.e - 1.0), rtol=1e-15)
    np.testing.assert_array_equal(p.gradient(np.zeros(3)), np.zeros(3))


def test_ex3_gradient_vanishes_at_ones():
    p = make_example("ex3", 2)
    np.testing.assert_array_equal(p.gradient(np.ones(2)), np.zeros(2))


def test_ex5_gradient_vanishes_at_ones():
    p = make_example("ex5", 2)
    np.testing.assert_array_equal(p.gradient(np.ones(2)), np.zeros(2))


def test_ex9_gradient_vanishes_at_solution():
    p = make_example("ex9", 64, seed=11)
    g = p.gradient(p.solution)
    bnorm = np.linalg.norm(p.operator.rhs)
    assert np.linalg.norm(g) <= 1e-9 * bnorm


def test_ex4pre_matches_ex1_exactly():
    a = make_example("ex4pre", 30)
    b = make_example("ex1", 30)
    np.testing.assert_array_equal(a.x0, b.x0)
    rng = np.random.default_rng(5)
    for _ in range(5):
        x = rng.uniform(-2.0, 2.0, 30)
        np.testing.assert_array_equal(a.gradient(x), b.gradient(x))


def test_ex9_seed_reproducibility():
    a = make_example("ex9", 50, seed=7)
    b = make_example("ex9", 50, seed=7)
    c = make_example("ex9", 50, seed=8)
    np.testing.assert_array_equal(a.operator.rhs, b.operator.rhs)
    np.testing.assert_array_equal(a.solution, b.solution)
    assert not np.array_equal(a.operator.rhs, c.operator.rhs)
    assert np.all(np.abs(a.solution) < 10.0)


def test_ex9_mesh_variants():
    printed = make_example("ex9", 50, seed=1)
    unit = make_example("ex9", 50, seed=1, ex9_h="1/n")
    h = 11.0 / 50.0
    assert printed.operator.diag[0] == 2.0 / (h * h)
    assert printed.operator.sub[0] == -1.0 / (h * h)
    h = 1.0 / 50.0
    assert unit.operator.diag[0] == 2.0 / (h * h)
    np.testing.assert_array_equal(printed.solution, unit.solution)


# -- quadratic operators ------------------------------------------------------

def test_diagonal_matvec():
    q = QuadraticOperator.diagonal([1.0, 2.0], [0.0, 0.0])
    np.testing.assert_array_equal(q.matvec(np.ones(2)), [1.0, 2.0])


def test_tridiagonal_matvec_stencil():
    h = 11.0 / 3.0
    inv_h2 = 1.0 / (h * h)
    q = QuadraticOperator.tridiagonal(
        np.full(2, -inv_h2), np.full(3, 2.0 * inv_h2), np.full(2, -inv_h2),
        np.zeros(3))
    out = q.matvec(np.ones(3))
    np.testing.assert_allclose(out, [inv_h2, 0.0, inv_h2], rtol=0, atol=1e-18)


def test_matvec_zero_vector():
    q = QuadraticOperator.diagonal(np.arange(1.0, 6.0), np.zeros(5))
    np.testing.assert_array_equal(quadratic_matvec(q, np.zeros(5)), np.zeros(5))


def test_matvec_dimension_mismatch():
    q = QuadraticOperator.diagonal([1.0, 2.0], [0.0, 0.0])
    with pytest.raises(ValueError):
        q.matvec(np.ones(3))


def test_matvec_linearity():
    rng = np.random.default_rng(0)
    n = 60
    q = make_example("ex9", n, seed=2).operator
    for _ in range(20):
        x = rng.standard_normal(n)
        y = rng.standard_normal(n)
        a, b = rng.standard_normal(2)
        lhs = q.matvec(a * x + b * y)
        rhs = a * q.matvec(x) + b * q.matvec(y)
        bound = 1e-12 * (np.linalg.norm(q.matvec(x)) + np.linalg.norm(q.matvec(y)))
        assert np.linalg.norm(lhs - rhs) <= max(bound, 1e-12)


def test_spd_validation_rejects_bad_operators():
    with pytest.raises(ValueError):
        QuadraticOperator.diagonal([1.0, -2.0], [0.0, 0.0])
    with pytest.raises(ValueError, match="symmetric"):
        QuadraticOperator.tridiagonal([1.0], [2.0, 2.0], [3.0], [0.0, 0.0])
    # indefinite tridiagonal: eigenvalues 1 +/- 2
    with pytest.raises(ValueError, match="positive definite"):
        QuadraticOperator.tridiagonal([2.0], [1.0, 1.0], [2.0], [0.0, 0.0])
    with pytest.raises(ValueError, match="positive definite"):
        QuadraticOperator.from_dense([[1.0, 2.0], [2.0, 1.0]], [0.0, 0.0])
    # check=False skips validation (escape hatch for experiments)
    q = QuadraticOperator.from_dense([[1.0, 2.0], [2.0, 1.0]], [0.0, 0.0], check=False)
    assert q.kind == "dense"


def test_weakly_dominant_stencil_accepted():
    # second-difference stencil is not strictly diagonally dominant but is PD
    n = 200
    q = QuadraticOperator.tridiagonal(np.full(n - 1, -1.0), np.full(n, 2.0),
                                      np.full(n - 1, -1.0), np.zeros(n))
    assert q.kind == "tridiagonal"


# -- finite-difference oracle -------------------------------------------------

def test_fd_requires_objective():
    p = make_example("ex1", 4)
    bare = type(p)(p.id, p.dim, p.x0, p.gradient)  # objective omitted
    with pytest.raises(ValueError, match="objective"):
        finite_diff_gradient(bare, p.x0, 1e-6)
    with pytest.raises(ValueError, match="positive"):
        finite_diff_gradient(p, p.x0, 0.0)


def test_fd_ex1_at_minimum():
    p = make_example("ex1", 2)
    g = finite_diff_gradient(p, np.zeros(2), 1e-6)
    assert np.all(np.abs(g) <= 1e-9)


def test_fd_ex1_matches_analytic_value():
    p = make_example("ex1", 2)
    g = finite_diff_gradient(p, np.ones(2), 1e-6)
    np.testing.assert_allclose(g, np.full(2, np.e - 1.0), rtol=0, atol=1e-8)


def test_fd_ex6_cross_check_at_start():
    p = make_example("ex6", 2)
    assert gradient_rel_error(p, p.x0, 1e-6) <= 1e-5
    # hand value of the analytic gradient at (3, 0.1): q = 9.31
    g = p.gradient(p.x0)
    q = 9.0 + 0.01 + 0.3
    np.testing.assert_allclose(
        g, [2 * q * 6.1 + math.sin(6.0), 2 * q * 3.2 - math.sin(0.2)], rtol=1e-14)


@pytest.mark.parametrize("pid", ALL_IDS)
def test_gradcheck_all_examples(pid):
    p = _problem(pid)
    rng = np.random.default_rng(42)
    assert gradient_rel_error(p, p.x0) <= 1e-5
    for _ in range(10):
        x = rng.uniform(-2.0, 2.0, p.dim)
        assert gradient_rel_error(p, x) <= 1e-5
