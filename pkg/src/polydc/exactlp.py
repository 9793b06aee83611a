"""Exact rational linear algebra and a deterministic simplex LP solver.

Every decision procedure in this package bottoms out here.  All numbers are
`fractions.Fraction` (arbitrary precision, always in lowest terms); there is
no floating point anywhere, so "satisfies a constraint" always means exact
equality or inequality of rationals.

The solver is a two-phase simplex on a dense tableau with Bland's
anti-cycling rule (lowest-index entering column, lowest-index tie break on
the ratio test).  That makes every outcome a pure function of the input,
which the rest of the package relies on: selection maps in the DCA module
must be deterministic, and reports must be byte-identical across runs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional, Sequence

Vector = tuple[Fraction, ...]
Row = tuple[Vector, Fraction]  # (coefficients, right-hand side)

ZERO = Fraction(0)
ONE = Fraction(1)


def frac(value) -> Fraction:
    """Coerce ints/strings/Fractions to Fraction, rejecting floats."""
    if isinstance(value, float):
        raise TypeError("floats are not exact; pass int, str or Fraction")
    return Fraction(value)


def vector(values: Iterable) -> Vector:
    return tuple(frac(v) for v in values)


def dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    if len(a) != len(b):
        raise ValueError(f"dot of vectors with lengths {len(a)} and {len(b)}")
    return sum((x * y for x, y in zip(a, b)), ZERO)


def vadd(a: Vector, b: Vector) -> Vector:
    return tuple(x + y for x, y in zip(a, b))


def vsub(a: Vector, b: Vector) -> Vector:
    return tuple(x - y for x, y in zip(a, b))


def vscale(c: Fraction, a: Vector) -> Vector:
    return tuple(c * x for x in a)


def vneg(a: Vector) -> Vector:
    return tuple(-x for x in a)


def zero_vector(dimension: int) -> Vector:
    return (ZERO,) * dimension


def midpoint(a: Vector, b: Vector) -> Vector:
    return tuple((x + y) / 2 for x, y in zip(a, b))


class ExtendedRational:
    """A rational number extended with +infinity and -infinity.

    Ordering is total.  Subtraction follows the convention
    (+inf) - (+inf) = +inf used by DC objective values; the symmetric case
    (-inf) - (-inf) never arises for proper data and raises.
    """

    __slots__ = ("sign", "value")

    def __init__(self, sign: int, value: Optional[Fraction]):
        # sign: -1 for -inf, 0 for finite, +1 for +inf
        self.sign = sign
        self.value = value

    @classmethod
    def finite(cls, value) -> "ExtendedRational":
        return cls(0, frac(value))

    @property
    def is_finite(self) -> bool:
        return self.sign == 0

    def as_fraction(self) -> Fraction:
        if self.sign != 0:
            raise ValueError(f"{self} is not finite")
        return self.value

    def _key(self):
        if self.sign != 0:
            return (self.sign, ZERO)
        return (0, self.value)

    def __eq__(self, other):
        if not isinstance(other, ExtendedRational):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __lt__(self, other):
        return self._key() < other._key()

    def __le__(self, other):
        return self._key() <= other._key()

    def __gt__(self, other):
        return self._key() > other._key()

    def __ge__(self, other):
        return self._key() >= other._key()

    def __sub__(self, other: "ExtendedRational") -> "ExtendedRational":
        if self.sign == 0 and other.sign == 0:
            return ExtendedRational.finite(self.value - other.value)
        if self.sign == 1:
            # covers (+inf) - (+inf) = +inf
            return PLUS_INF
        if other.sign == 1:
            return MINUS_INF
        if self.sign == -1 and other.sign == -1:
            raise ArithmeticError("(-inf) - (-inf) is undefined")
        return MINUS_INF if self.sign == -1 else PLUS_INF

    def __add__(self, other: "ExtendedRational") -> "ExtendedRational":
        if self.sign == 0 and other.sign == 0:
            return ExtendedRational.finite(self.value + other.value)
        if self.sign == -other.sign and self.sign != 0:
            raise ArithmeticError("(+inf) + (-inf) is undefined")
        return PLUS_INF if 1 in (self.sign, other.sign) else MINUS_INF

    def __neg__(self) -> "ExtendedRational":
        if self.sign == 0:
            return ExtendedRational.finite(-self.value)
        return MINUS_INF if self.sign == 1 else PLUS_INF

    def __repr__(self):
        return f"ExtendedRational({self})"

    def __str__(self):
        if self.sign == 1:
            return "+inf"
        if self.sign == -1:
            return "-inf"
        return str(self.value)


PLUS_INF = ExtendedRational(1, None)
MINUS_INF = ExtendedRational(-1, None)


@dataclass(frozen=True)
class LinearProgram:
    """minimize <objective, x> subject to equality and `row . x <= rhs` rows."""

    objective: Vector
    equalities: tuple[Row, ...]
    inequalities: tuple[Row, ...]
    dimension: int

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be positive")
        object.__setattr__(self, "objective", vector(self.objective))
        object.__setattr__(self, "equalities", _normalize_rows(self.equalities))
        object.__setattr__(self, "inequalities", _normalize_rows(self.inequalities))
        for coeffs, _ in itertools.chain(self.equalities, self.inequalities):
            if len(coeffs) != self.dimension:
                raise ValueError(
                    f"row of length {len(coeffs)} in LP of dimension {self.dimension}"
                )
        if len(self.objective) != self.dimension:
            raise ValueError("objective length does not match dimension")


def _normalize_rows(rows) -> tuple[Row, ...]:
    return tuple((vector(coeffs), frac(rhs)) for coeffs, rhs in rows)


class LpStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LpOutcome:
    status: LpStatus
    value: Optional[Fraction] = None
    point: Optional[Vector] = None
    tight_inequalities: Optional[frozenset[int]] = None

    @property
    def is_optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


INFEASIBLE = LpOutcome(LpStatus.INFEASIBLE)
UNBOUNDED = LpOutcome(LpStatus.UNBOUNDED)


def row_space_basis(rows: Sequence[Sequence[Fraction]]) -> list[Vector]:
    """Linearly independent spanning set of the row space (RREF rows).

    The empty matrix and the zero matrix both yield [].
    """
    rows = [vector(r) for r in rows]
    if not rows:
        return []
    width = len(rows[0])
    for r in rows:
        if len(r) != width:
            raise ValueError("rows of unequal length")
    matrix = [list(r) for r in rows]
    basis: list[Vector] = []
    pivot_row = 0
    for col in range(width):
        pivot = next(
            (r for r in range(pivot_row, len(matrix)) if matrix[r][col] != 0), None
        )
        if pivot is None:
            continue
        matrix[pivot_row], matrix[pivot] = matrix[pivot], matrix[pivot_row]
        row = matrix[pivot_row]
        inv = ONE / row[col]
        matrix[pivot_row] = [x * inv for x in row]
        for r in range(len(matrix)):
            if r != pivot_row and matrix[r][col] != 0:
                factor = matrix[r][col]
                matrix[r] = [
                    x - factor * y for x, y in zip(matrix[r], matrix[pivot_row])
                ]
        pivot_row += 1
        if pivot_row == len(matrix):
            break
    for r in range(pivot_row):
        basis.append(tuple(matrix[r]))
    return basis


def _eliminate_equalities(equalities: Sequence[Row], dimension: int):
    """Solve A x = b by Gaussian elimination.

    Returns None when inconsistent, otherwise (x0, null_basis) with the
    solution set {x0 + sum_k z_k * null_basis[k]}.
    """
    matrix = [list(coeffs) + [rhs] for coeffs, rhs in equalities]
    pivots: list[int] = []  # pivot column per reduced row
    pivot_row = 0
    for col in range(dimension):
        pivot = next(
            (r for r in range(pivot_row, len(matrix)) if matrix[r][col] != 0), None
        )
        if pivot is None:
            continue
        matrix[pivot_row], matrix[pivot] = matrix[pivot], matrix[pivot_row]
        inv = ONE / matrix[pivot_row][col]
        matrix[pivot_row] = [x * inv for x in matrix[pivot_row]]
        for r in range(len(matrix)):
            if r != pivot_row and matrix[r][col] != 0:
                factor = matrix[r][col]
                matrix[r] = [
                    x - factor * y for x, y in zip(matrix[r], matrix[pivot_row])
                ]
        pivots.append(col)
        pivot_row += 1
        if pivot_row == len(matrix):
            break
    for r in range(pivot_row, len(matrix)):
        if matrix[r][dimension] != 0:
            return None  # 0 = nonzero
    free_cols = [c for c in range(dimension) if c not in pivots]
    x0 = [ZERO] * dimension
    for r, col in enumerate(pivots):
        x0[col] = matrix[r][dimension]
    null_basis = []
    for fc in free_cols:
        direction = [ZERO] * dimension
        direction[fc] = ONE
        for r, col in enumerate(pivots):
            direction[col] = -matrix[r][fc]
        null_basis.append(tuple(direction))
    return tuple(x0), null_basis


def _bland_simplex(tableau, basis, costs, n_cols, artificial_start):
    """Minimize over the standard-form tableau in place; Bland's rule.

    `tableau` rows have length n_cols + 1 (rhs last).  Columns at index >=
    artificial_start never enter the basis.  Returns "optimal" or
    "unbounded"; on return the reduced-cost row logic is left to callers.
    """
    m = len(tableau)
    # reduced costs z_j = c_j - c_B . T[:, j]; objective offset tracked too
    reduced = list(costs) + [ZERO]
    for r in range(m):
        cb = costs[basis[r]]
        if cb != 0:
            row = tableau[r]
            for j in range(n_cols + 1):
                if row[j] != 0:
                    reduced[j] -= cb * row[j]
    while True:
        entering = next(
            (
                j
                for j in range(min(n_cols, artificial_start))
                if reduced[j] < 0
            ),
            None,
        )
        if entering is None:
            return "optimal"
        leaving = None
        best_ratio = None
        for r in range(m):
            coeff = tableau[r][entering]
            if coeff > 0:
                ratio = tableau[r][n_cols] / coeff
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and basis[r] < basis[leaving])
                ):
                    best_ratio = ratio
                    leaving = r
        if leaving is None:
            return "unbounded"
        _pivot(tableau, reduced, basis, leaving, entering, n_cols)


def _pivot(tableau, reduced, basis, row, col, n_cols):
    pivot_row = tableau[row]
    inv = ONE / pivot_row[col]
    if inv != 1:
        tableau[row] = pivot_row = [x * inv for x in pivot_row]
    for r in range(len(tableau)):
        if r != row:
            factor = tableau[r][col]
            if factor != 0:
                tableau[r] = [
                    x - factor * y for x, y in zip(tableau[r], pivot_row)
                ]
    factor = reduced[col]
    if factor != 0:
        for j in range(n_cols + 1):
            reduced[j] -= factor * pivot_row[j]
    basis[row] = col


def _solve_standard_form(rows, rhs, costs):
    """min costs . y  s.t.  rows y = rhs, y >= 0, via two-phase simplex.

    Returns (status, y) with status in {"optimal", "infeasible", "unbounded"}.
    """
    m = len(rows)
    n = len(costs)
    # sign-normalize so rhs >= 0, then add one artificial per row
    tableau = []
    for r in range(m):
        row = list(rows[r])
        b = rhs[r]
        if b < 0:
            row = [-x for x in row]
            b = -b
        tableau.append(row + [ZERO] * m + [b])
    for r in range(m):
        tableau[r][n + r] = ONE
    basis = [n + r for r in range(m)]
    phase1_costs = [ZERO] * n + [ONE] * m
    _bland_simplex(tableau, basis, phase1_costs, n + m, n + m)
    infeasibility = sum(
        (tableau[r][n + m] for r in range(m) if basis[r] >= n), ZERO
    )
    if infeasibility != 0:
        return "infeasible", None
    # drive artificials out of the basis; drop redundant rows
    keep = []
    for r in range(m):
        if basis[r] < n:
            keep.append(r)
            continue
        entering = next((j for j in range(n) if tableau[r][j] != 0), None)
        if entering is None:
            continue  # redundant constraint
        _pivot(tableau, [ZERO] * (n + m + 1), basis, r, entering, n + m)
        keep.append(r)
    tableau = [tableau[r][:n] + [tableau[r][n + m]] for r in keep]
    basis = [basis[r] for r in keep]
    status = _bland_simplex(tableau, basis, list(costs), n, n)
    if status == "unbounded":
        return "unbounded", None
    y = [ZERO] * n
    for r, col in enumerate(basis):
        y[col] = tableau[r][n]
    return "optimal", y


def lp_solve(lp: LinearProgram) -> LpOutcome:
    """Exact optimum of `lp` with a basic optimal point, deterministically.

    Equalities are eliminated by substitution first; the remaining free
    variables are split into nonnegative pairs for the simplex.
    """
    eliminated = _eliminate_equalities(lp.equalities, lp.dimension)
    if eliminated is None:
        return INFEASIBLE
    x0, null_basis = eliminated
    f = len(null_basis)

    projected = []  # (coeffs over z, rhs)
    for coeffs, rhs in lp.inequalities:
        reduced_rhs = rhs - dot(coeffs, x0)
        reduced_row = tuple(dot(coeffs, direction) for direction in null_basis)
        if all(c == 0 for c in reduced_row):
            if reduced_rhs < 0:
                return INFEASIBLE
            continue
        projected.append((reduced_row, reduced_rhs))

    constant = dot(lp.objective, x0)
    if f == 0:
        return _optimal_outcome(lp, x0, constant)

    reduced_objective = tuple(dot(lp.objective, d) for d in null_basis)
    m = len(projected)
    # variables: z+ (f), z- (f), slack (m)
    rows = []
    rhs = []
    for row, b in projected:
        rows.append(list(row) + [-c for c in row] + [ZERO] * m)
        rhs.append(b)
    for i in range(m):
        rows[i][2 * f + i] = ONE
    costs = (
        list(reduced_objective)
        + [-c for c in reduced_objective]
        + [ZERO] * m
    )
    status, y = _solve_standard_form(rows, rhs, costs)
    if status == "infeasible":
        return INFEASIBLE
    if status == "unbounded":
        return UNBOUNDED
    z = [y[k] - y[f + k] for k in range(f)]
    point = list(x0)
    for k, direction in enumerate(null_basis):
        if z[k] != 0:
            point = [p + z[k] * d for p, d in zip(point, direction)]
    return _optimal_outcome(lp, tuple(point), dot(lp.objective, point))


def _optimal_outcome(lp: LinearProgram, point: Vector, value: Fraction) -> LpOutcome:
    tight = frozenset(
        i
        for i, (coeffs, rhs) in enumerate(lp.inequalities)
        if dot(coeffs, point) == rhs
    )
    return LpOutcome(LpStatus.OPTIMAL, value, point, tight)


def lp_feasible(
    equalities: Sequence[Row],
    inequalities: Sequence[Row],
    dimension: int,
) -> Optional[Vector]:
    """A point satisfying all constraints exactly, or None if there is none."""
    lp = LinearProgram(
        objective=zero_vector(dimension),
        equalities=tuple(equalities),
        inequalities=tuple(inequalities),
        dimension=dimension,
    )
    outcome = lp_solve(lp)
    return outcome.point if outcome.is_optimal else None


def max_slack(
    equalities: Sequence[Row],
    weak_inequalities: Sequence[Row],
    strict_inequalities: Sequence[Row],
    dimension: int,
) -> tuple[ExtendedRational, Optional[Vector]]:
    """Largest margin by which the strict rows can hold simultaneously.

    Returns (slack, witness): slack is the supremum of eps >= 0 such that
    some x satisfies the equalities, the weak rows, and every strict row
    `r.x <= b` tightened to `r.x <= b - eps`.  The strict system has a
    solution iff slack > 0.  Slack 0 with witness None means even the weak
    system is empty; slack may be +inf, in which case the witness has
    margin 1.
    """

    def embed(rows, strict):
        out = []
        for coeffs, rhs in rows:
            out.append((tuple(coeffs) + (ONE if strict else ZERO,), rhs))
        return out

    eq = embed(equalities, False)
    weak = embed(weak_inequalities, False)
    strict = embed(strict_inequalities, True)
    eps_nonneg = ((zero_vector(dimension) + (-ONE,)), ZERO)
    objective = zero_vector(dimension) + (-ONE,)  # maximize eps

    lp = LinearProgram(
        objective=objective,
        equalities=tuple(eq),
        inequalities=tuple(weak + strict + [eps_nonneg]),
        dimension=dimension + 1,
    )
    outcome = lp_solve(lp)
    if outcome.status is LpStatus.INFEASIBLE:
        return ExtendedRational.finite(0), None
    if outcome.status is LpStatus.UNBOUNDED:
        cap = ((zero_vector(dimension) + (ONE,)), ONE)  # eps <= 1
        capped = LinearProgram(
            objective=objective,
            equalities=tuple(eq),
            inequalities=tuple(weak + strict + [eps_nonneg, cap]),
            dimension=dimension + 1,
        )
        witness = lp_solve(capped).point
        return PLUS_INF, witness[:dimension]
    return ExtendedRational.finite(-outcome.value), outcome.point[:dimension]


def optimality_certificate(
    lp: LinearProgram, outcome: LpOutcome
) -> tuple[Vector, Vector]:
    """Lagrange multipliers proving optimality of an Optimal outcome.

    Returns (eq_multipliers, ineq_multipliers) with the inequality
    multipliers nonnegative, supported on the tight rows, and satisfying
    objective + E^T mu + A^T lam = 0 exactly; then
    -mu.e - lam.b equals the optimal value (verified by the caller's tests).
    """
    if not outcome.is_optimal:
        raise ValueError("certificate requires an Optimal outcome")
    n_eq = len(lp.equalities)
    n_in = len(lp.inequalities)
    dim = n_eq + n_in
    if dim == 0:
        if any(c != 0 for c in lp.objective):
            raise ValueError("unconstrained LP with nonzero objective")
        return (), ()
    equalities = []
    for d in range(lp.dimension):
        coeffs = [lp.equalities[e][0][d] for e in range(n_eq)]
        coeffs += [lp.inequalities[i][0][d] for i in range(n_in)]
        equalities.append((tuple(coeffs), -lp.objective[d]))
    for i in range(n_in):
        if i not in outcome.tight_inequalities:
            row = [ZERO] * dim
            row[n_eq + i] = ONE
            equalities.append((tuple(row), ZERO))
    inequalities = []
    for i in range(n_in):
        row = [ZERO] * dim
        row[n_eq + i] = -ONE
        inequalities.append((tuple(row), ZERO))
    witness = lp_feasible(equalities, inequalities, dim)
    if witness is None:
        raise RuntimeError("no complementary-slack multipliers found")
    return witness[:n_eq], witness[n_eq:]
