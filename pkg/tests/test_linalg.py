from __future__ import annotations

import random
from fractions import Fraction
from functools import reduce
from itertools import combinations
from math import gcd

import pytest
import sympy

from logdecomp.linalg import (
    INFINITE,
    Inequality,
    IntMatrix,
    express,
    hermite_rows,
    integer_kernel,
    integral_length,
    inverse,
    nullspace,
    primitive,
    saturated_basis,
    smith_normal_form,
    solve,
    strict_feasible_point,
    sublattice_index,
)


def _random_matrix(rng: random.Random, nrows: int, ncols: int, bound: int = 6) -> IntMatrix:
    return IntMatrix.from_rows([[rng.randint(-bound, bound) for _ in range(ncols)] for _ in range(nrows)], ncols=ncols)


def _minor_gcd(m: IntMatrix, k: int) -> int:
    values = []
    for rows in combinations(range(m.nrows), k):
        for cols in combinations(range(m.ncols), k):
            values.append(int(sympy.Matrix([[m.rows[i][j] for j in cols] for i in rows]).det()))
    return reduce(gcd, (abs(v) for v in values), 0)


def test_matrix_shape_validation():
    with pytest.raises(ValueError):
        IntMatrix.from_rows([[1, 2], [3]])
    with pytest.raises(TypeError):
        IntMatrix(ncols=1, rows=((True,),))
    with pytest.raises(ValueError):
        IntMatrix.from_rows([])
    empty = IntMatrix.zeros(3, 0)
    assert empty.shape == (3, 0)
    assert empty.apply(()) == (0, 0, 0)


def test_det_matches_sympy():
    rng = random.Random(20240601)
    for _ in range(40):
        n = rng.randint(1, 4)
        m = _random_matrix(rng, n, n)
        assert m.det() == int(sympy.Matrix(m.to_list()).det())
    assert IntMatrix.zeros(0, 0).det() == 1


def test_smith_form_certificate_and_minors():
    rng = random.Random(7)
    for _ in range(30):
        nrows, ncols = rng.randint(1, 3), rng.randint(1, 3)
        m = _random_matrix(rng, nrows, ncols)
        form = smith_normal_form(m)
        assert form.U @ m @ form.V == form.D
        assert form.U.is_unimodular() and form.V.is_unimodular()
        diag = form.diagonal
        assert all(d >= 0 for d in diag)
        nonzero = [d for d in diag if d]
        assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))
        assert form.rank == int(sympy.Matrix(m.to_list()).rank())
        product = 1
        for k in range(1, form.rank + 1):
            product *= diag[k - 1]
            assert product == _minor_gcd(m, k)


def test_nullspace_and_integer_kernel_agree_with_sympy():
    rng = random.Random(11)
    for _ in range(25):
        m = _random_matrix(rng, rng.randint(1, 3), 4, bound=3)
        rational = nullspace(m.rows, m.ncols)
        assert len(rational) == len(sympy.Matrix(m.to_list()).nullspace())
        kernel = integer_kernel(m)
        assert len(kernel) == len(rational)
        for v in kernel:
            assert m.apply(v) == (0,) * m.nrows
        if kernel:
            # saturated: the kernel basis spans a direct summand of ℤ⁴
            assert _minor_gcd(IntMatrix.from_rows(kernel, ncols=4), len(kernel)) == 1


def test_solve_and_express():
    sol = solve([[1, 1], [1, -1]], [2, 0], 2)
    assert sol is not None and sol.point == (1, 1) and sol.dimension == 0
    assert solve([[1, 1], [1, 1]], [1, 2], 2) is None
    assert express([(1, 1), (0, 1)], (2, 5)) == (2, 3)
    assert express([(1, 0, 0)], (0, 1, 0)) is None
    assert express([], (0, 0)) == ()
    with pytest.raises(ValueError):
        express([(1, 1), (2, 2)], (1, 1))


def test_lengths_and_primitives():
    assert integral_length((4, -6)) == 2
    assert integral_length((0, 0)) == 0
    assert primitive((Fraction(1, 2), Fraction(1, 3))) == (3, 2)
    assert primitive((0, -4)) == (0, -1)


def test_integral_length_scales_with_the_vector():
    rng = random.Random(19)
    for _ in range(40):
        v = tuple(rng.randint(-9, 9) for _ in range(3))
        k = rng.randint(-5, 5)
        assert integral_length(tuple(k * x for x in v)) == abs(k) * integral_length(v)


def test_sublattice_index_is_absolute_determinant():
    rng = random.Random(23)
    checked = 0
    while checked < 25:
        n = rng.randint(1, 3)
        m = _random_matrix(rng, n, n, bound=5)
        if m.det() == 0:
            assert sublattice_index(m.rows, n) == INFINITE
            continue
        assert sublattice_index(m.rows, n) == abs(m.det())
        checked += 1


def test_hermite_rows_normal_form():
    assert hermite_rows([(2, 4), (3, 1)], 2) == [(1, 7), (0, 10)]
    assert hermite_rows([(2, 4), (1, 2), (0, 0)], 2) == [(1, 2)]
    assert hermite_rows([(0, 2, 4), (0, 0, 6)], 3) == [(0, 2, 4), (0, 0, 6)]
    assert hermite_rows([(0, 0)], 2) == []
    rng = random.Random(29)
    for _ in range(20):
        m = _random_matrix(rng, rng.randint(1, 3), 3, bound=4)
        rows = hermite_rows(m.rows, 3)
        assert len(rows) == m.rank()
        leads = [next(j for j, x in enumerate(row) if x) for row in rows]
        assert leads == sorted(set(leads))
        for i, (row, lead) in enumerate(zip(rows, leads)):
            assert row[lead] > 0
            assert all(0 <= rows[h][lead] < row[lead] for h in range(i))
        # same group: every input row is an integral combination of the output
        for original in m.rows:
            coords = express(rows, original)
            assert coords is not None and all(c.denominator == 1 for c in coords)


def test_saturated_basis_and_index():
    assert saturated_basis([(2, 2)], 2) == [(1, 1)]
    assert sublattice_index([(2, 0), (0, 3)], 2) == 6
    assert sublattice_index([(1, 1)], 2) == INFINITE
    assert sublattice_index([], 0) == 1


def test_inverse_round_trip():
    m = IntMatrix.from_rows([[2, 1], [1, 1]])
    inv = inverse(m)
    assert inv == [[1, -1], [-1, 2]]
    with pytest.raises(ZeroDivisionError):
        inverse(IntMatrix.from_rows([[1, 2], [2, 4]]))


def test_strict_feasibility():
    half = Fraction(1, 2)
    # 0 < x < 1, x + y > 1, y < 1
    rows = [
        Inequality((Fraction(1), Fraction(0)), Fraction(0), True),
        Inequality((Fraction(-1), Fraction(0)), Fraction(-1), True),
        Inequality((Fraction(1), Fraction(1)), Fraction(1), True),
        Inequality((Fraction(0), Fraction(-1)), Fraction(-1), True),
    ]
    point = strict_feasible_point(rows, 2)
    assert point is not None
    assert all(r.holds(point) for r in rows)
    # x > 1/2 and x < 1/2 is empty, x >= 1/2 and x <= 1/2 is the single point
    assert strict_feasible_point([Inequality((Fraction(1),), half, True), Inequality((Fraction(-1),), -half, True)], 1) is None
    assert strict_feasible_point([Inequality((Fraction(1),), half, False), Inequality((Fraction(-1),), -half, False)], 1) == (half,)


def test_strict_feasibility_random_boxes():
    rng = random.Random(3)
    for _ in range(20):
        lo = [Fraction(rng.randint(-5, 5)) for _ in range(3)]
        width = [Fraction(rng.randint(0, 3)) for _ in range(3)]
        rows = []
        for i in range(3):
            e = [Fraction(0)] * 3
            e[i] = Fraction(1)
            rows.append(Inequality(tuple(e), lo[i], True))
            rows.append(Inequality(tuple(-x for x in e), -(lo[i] + width[i]), True))
        point = strict_feasible_point(rows, 3)
        if all(width):
            assert point is not None and all(r.holds(point) for r in rows)
        else:
            assert point is None
