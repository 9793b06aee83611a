"""Shared fixtures-in-code: worked problems, random generators, oracles.

The vertex-enumeration oracle is an independent implementation (plain
Gaussian elimination over Fractions) used to cross-check the simplex.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from polydc import DcProblem, LinearProgram, MaxAffine, PolyhedralSet
from polydc.exactlp import dot


def vec(*values):
    return tuple(Fraction(v) for v in values)


def interval_problem() -> DcProblem:
    """C = [-2, 3], g = 0, h = max(-x - 1, 0, x - 1) on the line.

    Worked example used throughout: the local solution set is
    {-2} U (-1, 1) U {3}, the critical set adds the points -1 and 1,
    and the unique global solution is 3 with value -2.
    """
    C = PolyhedralSet(1, inequalities=((vec(-1), Fraction(2)), (vec(1), Fraction(3))))
    g = MaxAffine.constant(0, 1)
    h = MaxAffine.from_pieces(
        [(vec(-1), Fraction(-1)), (vec(0), Fraction(0)), (vec(1), Fraction(-1))], 1
    )
    return DcProblem(g=g, h=h, C=C)


def abs_problem() -> DcProblem:
    """g = 0, h = |x| on the whole line: 0 is critical but not stationary."""
    g = MaxAffine.constant(0, 1)
    h = MaxAffine.from_pieces([(vec(1), Fraction(0)), (vec(-1), Fraction(0))], 1)
    return DcProblem(g=g, h=h, C=PolyhedralSet.whole_space(1))


# ---------------------------------------------------------------------------
# independent linear-algebra oracle


def solve_square(rows, rhs, n):
    """Unique solution of rows . x = rhs, or None (no or many solutions)."""
    matrix = [list(row) + [b] for row, b in zip(rows, rhs)]
    pivots = []
    pivot_row = 0
    for col in range(n):
        pivot = next(
            (r for r in range(pivot_row, len(matrix)) if matrix[r][col] != 0),
            None,
        )
        if pivot is None:
            continue
        matrix[pivot_row], matrix[pivot] = matrix[pivot], matrix[pivot_row]
        inv = Fraction(1) / matrix[pivot_row][col]
        matrix[pivot_row] = [x * inv for x in matrix[pivot_row]]
        for r in range(len(matrix)):
            if r != pivot_row and matrix[r][col] != 0:
                f = matrix[r][col]
                matrix[r] = [a - f * b for a, b in zip(matrix[r], matrix[pivot_row])]
        pivots.append(col)
        pivot_row += 1
    for r in range(pivot_row, len(matrix)):
        if matrix[r][n] != 0:
            return None
    if len(pivots) < n:
        return None  # not unique
    x = [Fraction(0)] * n
    for r, col in enumerate(pivots):
        x[col] = matrix[r][n]
    return tuple(x)


def vertex_enumeration_minimum(lp: LinearProgram):
    """("optimal", value) via brute force over candidate vertices, or
    ("infeasible", None).  Assumes the feasible set is bounded, so a
    nonempty set has a vertex and the minimum is attained at one."""
    n = lp.dimension
    eq_rows = [row for row, _ in lp.equalities]
    eq_rhs = [b for _, b in lp.equalities]
    best = None
    indices = range(len(lp.inequalities))
    for k in range(n + 1):
        for subset in itertools.combinations(indices, k):
            rows = eq_rows + [lp.inequalities[i][0] for i in subset]
            rhs = eq_rhs + [lp.inequalities[i][1] for i in subset]
            candidate = solve_square(rows, rhs, n)
            if candidate is None:
                continue
            if any(
                dot(row, candidate) > b for row, b in lp.inequalities
            ) or any(dot(row, candidate) != b for row, b in lp.equalities):
                continue
            value = dot(lp.objective, candidate)
            if best is None or value < best:
                best = value
    if best is None:
        return "infeasible", None
    return "optimal", best


# ---------------------------------------------------------------------------
# random generators (all integer/rational data, deterministic under a seed)


def random_bounded_lp(rng: random.Random) -> LinearProgram:
    """Feasibility is not guaranteed; boundedness is, via a full box."""
    n = rng.randint(1, 4)
    inequalities = []
    for i in range(n):
        lo = rng.randint(-4, 2)
        hi = lo + rng.randint(0, 5)
        e = [Fraction(0)] * n
        e[i] = Fraction(1)
        inequalities.append((tuple(e), Fraction(hi)))
        inequalities.append((tuple(-c for c in e), Fraction(-lo)))
    for _ in range(rng.randint(0, 10 - 2 * n)):
        row = tuple(Fraction(rng.randint(-3, 3)) for _ in range(n))
        inequalities.append((row, Fraction(rng.randint(-4, 6))))
    equalities = []
    if n >= 2 and rng.random() < 0.3:
        row = [Fraction(rng.randint(-2, 2)) for _ in range(n)]
        if any(c != 0 for c in row):
            equalities.append((tuple(row), Fraction(rng.randint(-2, 2))))
    objective = tuple(Fraction(rng.randint(-3, 3)) for _ in range(n))
    return LinearProgram(
        objective=objective,
        equalities=tuple(equalities),
        inequalities=tuple(inequalities),
        dimension=n,
    )


def _distinct_pieces(rng: random.Random, count: int, gradients, offsets):
    pieces = set()
    while len(pieces) < count:
        u = rng.choice(gradients)
        alpha = Fraction(rng.choice(offsets))
        pieces.add((tuple(Fraction(c) for c in u), alpha))
    return tuple(sorted(pieces))


def random_dc_instance(rng: random.Random, n_max: int = 3) -> DcProblem:
    """Bounded instance on a box with full-space domains.

    Piece gradients have entries in -2..2 and offsets in -2..2 (sometimes
    halves), so the structure hypotheses hold trivially and every DCA
    subproblem is bounded.
    """
    n = rng.randint(1, n_max)
    lo, hi = [], []
    for _ in range(n):
        a = Fraction(rng.randint(-3, 0))
        b = a + rng.randint(1, 4)
        if rng.random() < 0.3:
            a -= Fraction(1, 2)
        lo.append(a)
        hi.append(b)
    C = PolyhedralSet.box(lo, hi)
    gradients = list(itertools.product(range(-2, 3), repeat=n))
    offsets = [Fraction(k) for k in range(-2, 3)] + [
        Fraction(1, 2),
        Fraction(-1, 2),
    ]
    g = MaxAffine.from_pieces(
        _distinct_pieces(rng, rng.randint(1, 4), gradients, offsets), n
    )
    h = MaxAffine.from_pieces(
        _distinct_pieces(rng, rng.randint(1, 4), gradients, offsets), n
    )
    return DcProblem(g=g, h=h, C=C)


def random_grid_instance(rng: random.Random) -> DcProblem:
    """Instance for grid cross-checks: n <= 2, integer box and offsets.

    Within each function the piece gradients vary along a single axis with
    entries in -1..1, so every breakpoint hyperplane of g and of h is
    axis-parallel at a multiple of 1/8.  Consequently f is linear on every
    1/8 grid-step segment (no kink strictly between neighbors) and every
    nonempty descent cone contains an axis direction, which makes the
    grid-neighborhood checks sound at step 1/8.
    """
    n = rng.randint(1, 2)
    lo = [Fraction(rng.randint(-2, 0)) for _ in range(n)]
    hi = [l + rng.randint(1, 3) for l in lo]
    C = PolyhedralSet.box(lo, hi)
    offsets = list(range(-2, 3))

    def single_axis_gradients():
        axis = rng.randint(0, n - 1)
        base = rng.randint(-1, 1)
        gradients = []
        for t in (-1, 0, 1):
            v = [Fraction(base)] * n
            v[axis] = Fraction(t)
            gradients.append(tuple(v))
        return gradients

    g = MaxAffine.from_pieces(
        _distinct_pieces(rng, rng.randint(1, 3), single_axis_gradients(), offsets),
        n,
    )
    h = MaxAffine.from_pieces(
        _distinct_pieces(rng, rng.randint(1, 4), single_axis_gradients(), offsets),
        n,
    )
    return DcProblem(g=g, h=h, C=C)
