"""Exact integer and rational linear algebra.

The public API speaks Python ints and :class:`fractions.Fraction`; the heavy
lifting (determinants, row reduction, Smith and Hermite forms, inverses) is done
by sympy's :class:`~sympy.polys.matrices.DomainMatrix` over ZZ and QQ. There are
no tolerances anywhere.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Literal, Union

import attrs
from sympy.polys.domains import QQ, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import hermite_normal_form, smith_normal_decomp

Vector = tuple[int, ...]
QVector = tuple[Fraction, ...]
Number = Union[int, Fraction]

INFINITE: Literal["infinite"] = "infinite"


def _zz(rows: Sequence[Sequence[int]], ncols: int) -> DomainMatrix:
    return DomainMatrix([[ZZ(int(x)) for x in row] for row in rows], (len(rows), ncols), ZZ)


def _qq(rows: Sequence[Sequence[Number]], ncols: int) -> DomainMatrix:
    converted = []
    for row in rows:
        fractions = (Fraction(x) for x in row)
        converted.append([QQ(f.numerator, f.denominator) for f in fractions])
    return DomainMatrix(converted, (len(rows), ncols), QQ)


def _int_rows(dm: DomainMatrix) -> list[list[int]]:
    return [[int(x) for x in row] for row in dm.to_list()]


def _fraction_rows(dm: DomainMatrix) -> list[list[Fraction]]:
    return [[Fraction(int(x.numerator), int(x.denominator)) for x in row] for row in dm.to_list()]


def _check_rows(instance: IntMatrix, attribute: attrs.Attribute, value: tuple[tuple[int, ...], ...]) -> None:
    for row in value:
        if len(row) != instance.ncols:
            raise ValueError(f"ragged matrix: expected {instance.ncols} columns, got {len(row)}")
        for entry in row:
            if not isinstance(entry, int) or isinstance(entry, bool):
                raise TypeError(f"matrix entries must be int, got {type(entry).__name__}")


@attrs.frozen
class IntMatrix:
    """Immutable integer matrix; ``ncols`` is explicit so that empty shapes stay meaningful."""

    ncols: int
    rows: tuple[tuple[int, ...], ...] = attrs.field(validator=_check_rows)

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]], ncols: int | None = None) -> IntMatrix:
        materialized = tuple(tuple(int(x) for x in row) for row in rows)
        if ncols is None:
            if not materialized:
                raise ValueError("ncols is required for a matrix without rows")
            ncols = len(materialized[0])
        return cls(ncols=ncols, rows=materialized)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], nrows: int) -> IntMatrix:
        return cls.from_rows(([col[i] for col in columns] for i in range(nrows)), ncols=len(columns))

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls.from_rows(([1 if i == j else 0 for j in range(n)] for i in range(n)), ncols=n)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> IntMatrix:
        return cls.from_rows(([0] * ncols for _ in range(nrows)), ncols=ncols)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def column(self, j: int) -> Vector:
        return tuple(row[j] for row in self.rows)

    def columns(self) -> tuple[Vector, ...]:
        return tuple(self.column(j) for j in range(self.ncols))

    def transpose(self) -> IntMatrix:
        return IntMatrix.from_rows(self.columns(), ncols=self.nrows)

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch: {self.shape} @ {other.shape}")
        cols = other.columns()
        return IntMatrix.from_rows(
            ([sum(a * b for a, b in zip(row, col, strict=True)) for col in cols] for row in self.rows),
            ncols=other.ncols,
        )

    def apply(self, vector: Sequence[Number]) -> tuple:
        """Matrix-vector product; works for integer and rational vectors alike."""
        if len(vector) != self.ncols:
            raise ValueError(f"vector of length {len(vector)} does not fit {self.shape}")
        return tuple(sum((a * x for a, x in zip(row, vector, strict=True)), 0) for row in self.rows)

    def det(self) -> int:
        if self.nrows != self.ncols:
            raise ValueError("determinant of a non-square matrix")
        if self.nrows == 0:
            return 1
        return int(self.to_domain().det())

    def rank(self) -> int:
        if self.nrows == 0 or self.ncols == 0:
            return 0
        return int(self.to_domain().rank())

    def to_domain(self) -> DomainMatrix:
        return _zz(self.rows, self.ncols)

    def is_unimodular(self) -> bool:
        return self.nrows == self.ncols and abs(self.det()) == 1

    def to_list(self) -> list[list[int]]:
        return [list(row) for row in self.rows]


@attrs.frozen
class SmithForm:
    """``U @ m @ V == D`` with U, V unimodular and D diagonal with d_i | d_{i+1}."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix

    @property
    def diagonal(self) -> Vector:
        return tuple(self.D.rows[i][i] for i in range(min(self.D.shape)))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


def smith_normal_form(m: IntMatrix) -> SmithForm:
    """Smith normal form with transformation matrices, via ``smith_normal_decomp``."""
    nr, nc = m.shape
    if nr == 0 or nc == 0:
        return SmithForm(U=IntMatrix.identity(nr), D=m, V=IntMatrix.identity(nc))
    smf, s, t = smith_normal_decomp(m.to_domain())
    d = _int_rows(smf.to_dense())
    u = _int_rows(s.to_dense())
    for i in range(min(nr, nc)):
        if d[i][i] < 0:
            d[i] = [-x for x in d[i]]
            u[i] = [-x for x in u[i]]
    return SmithForm(
        U=IntMatrix.from_rows(u, ncols=nr),
        D=IntMatrix.from_rows(d, ncols=nc),
        V=IntMatrix.from_rows(_int_rows(t.to_dense()), ncols=nc),
    )


def rref(rows: Sequence[Sequence[Number]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over the rationals; returns (nonzero rows, pivot columns)."""
    if not rows or ncols == 0:
        return [], []
    reduced, pivots = _qq(rows, ncols).rref()
    return _fraction_rows(reduced)[: len(pivots)], list(pivots)


def rank(rows: Sequence[Sequence[Number]], ncols: int) -> int:
    return len(rref(rows, ncols)[1])


def nullspace(rows: Sequence[Sequence[Number]], ncols: int) -> list[QVector]:
    """Basis of {x : rows·x = 0} over the rationals, one vector per free column."""
    reduced, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis: list[QVector] = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(reduced, pivots, strict=True):
            x[p] = -row[f]
        basis.append(tuple(x))
    return basis


@dataclass(slots=True, frozen=True)
class AffineSolution:
    """Solution set ``point + span(directions)`` of a linear system."""

    point: QVector
    directions: tuple[QVector, ...]

    @property
    def dimension(self) -> int:
        return len(self.directions)


def solve(rows: Sequence[Sequence[Number]], rhs: Sequence[Number], ncols: int) -> AffineSolution | None:
    """Solve ``rows·x = rhs`` exactly; None when inconsistent."""
    augmented = [[*row, value] for row, value in zip(rows, rhs, strict=True)]
    reduced, pivots = rref(augmented, ncols + 1)
    if ncols in pivots:
        return None
    point = [Fraction(0)] * ncols
    for row, p in zip(reduced, pivots, strict=True):
        point[p] = row[ncols]
    directions = nullspace(rows, ncols)
    return AffineSolution(point=tuple(point), directions=tuple(directions))


def express(basis: Sequence[Sequence[Number]], vector: Sequence[Number]) -> QVector | None:
    """Coordinates of ``vector`` in a linearly independent ``basis``; None if outside its span."""
    n = len(vector)
    if not basis:
        return () if all(x == 0 for x in vector) else None
    rows = [[b[i] for b in basis] for i in range(n)]
    solution = solve(rows, vector, len(basis))
    if solution is None:
        return None
    if solution.directions:
        raise ValueError("basis vectors are linearly dependent")
    return solution.point


def integral_length(vector: Sequence[int]) -> int:
    """Largest λ with λ⁻¹·v integral; 0 for the zero vector."""
    return reduce(gcd, (abs(x) for x in vector), 0)


def primitive(vector: Sequence[Number]) -> Vector:
    """Primitive integer vector on the ray through a rational vector."""
    denominators = [Fraction(x).denominator for x in vector]
    scale = reduce(lcm, denominators, 1)
    scaled = [int(Fraction(x) * scale) for x in vector]
    g = integral_length(scaled)
    if g == 0:
        return tuple(scaled)
    return tuple(x // g for x in scaled)


def common_denominator(values: Iterable[Number]) -> int:
    return reduce(lcm, (Fraction(x).denominator for x in values), 1)


def dot(a: Sequence[Number], b: Sequence[Number]) -> Number:
    return sum((x * y for x, y in zip(a, b, strict=True)), 0)


def hermite_rows(rows: Sequence[Sequence[int]], ncols: int) -> list[Vector]:
    """Row-style Hermite normal form of the group generated by ``rows`` (nonzero rows only).

    Leading entries are positive and move right from row to row; entries above a
    pivot lie in ``[0, pivot)``. sympy puts the column-style form's pivots in the
    rightmost columns, so coordinates are reversed going in and coming back out.
    """
    if not rows or ncols == 0:
        return []
    flipped = _zz([list(row)[::-1] for row in rows], ncols).transpose()
    columns = _int_rows(hermite_normal_form(flipped).to_dense().transpose())
    return [tuple(col[::-1]) for col in reversed(columns)]


def integer_kernel(m: IntMatrix) -> list[Vector]:
    """Saturated ℤ-basis of ker(m) ∩ ℤⁿ, read off the Smith form."""
    if m.nrows == 0:
        return list(IntMatrix.identity(m.ncols).rows)
    form = smith_normal_form(m)
    return [form.V.column(j) for j in range(form.rank, m.ncols)]


def lattice_basis(generators: Sequence[Sequence[int]], ncols: int) -> list[Vector]:
    """ℤ-basis (Hermite-reduced) of the group generated by ``generators``."""
    return hermite_rows(generators, ncols)


def saturated_basis(vectors: Sequence[Sequence[int]], ncols: int) -> list[Vector]:
    """ℤ-basis of span_ℚ(vectors) ∩ ℤⁿ in Hermite form."""
    nonzero = [tuple(v) for v in vectors if any(v)]
    if not nonzero:
        return []
    annihilator = integer_kernel(IntMatrix.from_rows(nonzero, ncols=ncols))
    if not annihilator:
        return list(IntMatrix.identity(ncols).rows)
    return hermite_rows(integer_kernel(IntMatrix.from_rows(annihilator, ncols=ncols)), ncols)


def sublattice_index(generators: Sequence[Sequence[int]], ncols: int) -> int | Literal["infinite"]:
    """Index of the generated subgroup in ℤⁿ, or ``INFINITE`` when it is not of full rank."""
    if ncols == 0:
        return 1
    if not generators:
        return INFINITE
    form = smith_normal_form(IntMatrix.from_rows(generators, ncols=ncols))
    if form.rank < ncols:
        return INFINITE
    return reduce(lambda x, y: x * y, (abs(d) for d in form.diagonal), 1)


def inverse(m: IntMatrix) -> list[list[Fraction]]:
    """Rational inverse of a square nonsingular matrix (rows)."""
    if m.nrows != m.ncols:
        raise ValueError("inverse of a non-square matrix")
    if m.nrows == 0:
        return []
    if m.det() == 0:
        raise ZeroDivisionError("singular matrix")
    return _fraction_rows(m.to_domain().convert_to(QQ).inv())


# ---------------------------------------------------------------------------
# Feasibility of strict/non-strict inequality systems
# ---------------------------------------------------------------------------


@dataclass(slots=True, frozen=True)
class Inequality:
    """``coeffs·x > rhs`` when strict, ``coeffs·x >= rhs`` otherwise."""

    coeffs: QVector
    rhs: Fraction
    strict: bool
    label: str = ""

    def holds(self, point: Sequence[Number]) -> bool:
        value = dot(self.coeffs, point)
        return value > self.rhs if self.strict else value >= self.rhs


def _normalized(ineq: Inequality) -> Inequality:
    scale = max((abs(c) for c in ineq.coeffs), default=Fraction(0))
    if scale == 0:
        return ineq
    return Inequality(
        coeffs=tuple(c / scale for c in ineq.coeffs),
        rhs=ineq.rhs / scale,
        strict=ineq.strict,
        label=ineq.label,
    )


def _dedupe(rows: Iterable[Inequality]) -> list[Inequality]:
    seen: dict[tuple[QVector, Fraction], Inequality] = {}
    for ineq in rows:
        key = (ineq.coeffs, ineq.rhs)
        current = seen.get(key)
        if current is None or (ineq.strict and not current.strict):
            seen[key] = ineq
    return list(seen.values())


def _violated_constant(ineq: Inequality) -> bool:
    return ineq.rhs > 0 or (ineq.strict and ineq.rhs == 0)


def strict_feasible_point(rows: Sequence[Inequality], nvars: int) -> QVector | None:
    """Exact Fourier–Motzkin elimination; returns a rational solution or None when infeasible.

    Variables are eliminated from the last to the first, keeping every stage so
    that a solution can be rebuilt by back-substitution one coordinate at a time.
    """
    current = _dedupe(_normalized(Inequality(tuple(Fraction(c) for c in r.coeffs), Fraction(r.rhs), r.strict, r.label)) for r in rows)
    stages: list[list[Inequality]] = [[] for _ in range(nvars)]
    for k in reversed(range(nvars)):
        stages[k] = current
        positive = [r for r in current if r.coeffs[k] > 0]
        negative = [r for r in current if r.coeffs[k] < 0]
        projected = [r for r in current if r.coeffs[k] == 0]
        for p in positive:
            for n in negative:
                a, b = -n.coeffs[k], p.coeffs[k]
                combined = Inequality(
                    coeffs=tuple(a * x + b * y for x, y in zip(p.coeffs, n.coeffs, strict=True)),
                    rhs=a * p.rhs + b * n.rhs,
                    strict=p.strict or n.strict,
                )
                projected.append(_normalized(combined))
        constant = [r for r in projected if not any(r.coeffs)]
        if any(_violated_constant(r) for r in constant):
            return None
        current = _dedupe(r for r in projected if any(r.coeffs))
    if any(_violated_constant(r) for r in current):
        return None

    x = [Fraction(0)] * nvars
    for k in range(nvars):
        lower: tuple[Fraction, bool] | None = None
        upper: tuple[Fraction, bool] | None = None
        for r in stages[k]:
            c = r.coeffs[k]
            if c == 0:
                continue
            bound = (r.rhs - sum((r.coeffs[j] * x[j] for j in range(k)), Fraction(0))) / c
            if c > 0:
                if lower is None or bound > lower[0] or (bound == lower[0] and r.strict):
                    lower = (bound, r.strict)
            elif upper is None or bound < upper[0] or (bound == upper[0] and r.strict):
                upper = (bound, r.strict)
        if lower is not None and upper is not None:
            if lower[0] == upper[0]:
                if lower[1] or upper[1]:
                    return None
                x[k] = lower[0]
            else:
                x[k] = (lower[0] + upper[0]) / 2
        elif lower is not None:
            x[k] = lower[0] + 1 if lower[1] else lower[0]
        elif upper is not None:
            x[k] = upper[0] - 1 if upper[1] else upper[0]
    if not all(r.holds(x) for r in rows):
        raise ArithmeticError("Fourier–Motzkin back-substitution produced an infeasible point")
    return tuple(x)
