"""Exact LP solver: golden cases, invariants, and the brute-force oracle."""

import random
from fractions import Fraction

import pytest

from polydc import (
    ExtendedRational,
    LinearProgram,
    LpStatus,
    PLUS_INF,
    MINUS_INF,
    lp_feasible,
    lp_solve,
    max_slack,
    optimality_certificate,
    row_space_basis,
)
from polydc.exactlp import dot

import gens
from gens import vec


def interval_lp(objective):
    # constraint set [-2, 3] on the line
    return LinearProgram(
        objective=objective,
        equalities=(),
        inequalities=((vec(-1), Fraction(2)), (vec(1), Fraction(3))),
        dimension=1,
    )


class TestLpSolve:
    def test_interval_endpoint(self):
        out = lp_solve(interval_lp(vec(1)))
        assert out.status is LpStatus.OPTIMAL
        assert out.value == Fraction(-2)
        assert out.point == vec(-2)
        assert out.tight_inequalities == frozenset({0})

    def test_contradictory_bounds(self):
        lp = LinearProgram(
            objective=vec(0),
            equalities=(),
            inequalities=((vec(1), Fraction(0)), (vec(-1), Fraction(-1))),
            dimension=1,
        )
        assert lp_solve(lp).status is LpStatus.INFEASIBLE

    def test_open_ray(self):
        lp = LinearProgram(
            objective=vec(-1),
            equalities=(),
            inequalities=((vec(-1), Fraction(0)),),
            dimension=1,
        )
        assert lp_solve(lp).status is LpStatus.UNBOUNDED

    def test_equality_elimination(self):
        # minimize x2 on {x1 = 1, x1 + x2 <= 3, -x2 <= 0}
        lp = LinearProgram(
            objective=vec(0, 1),
            equalities=((vec(1, 0), Fraction(1)),),
            inequalities=((vec(1, 1), Fraction(3)), (vec(0, -1), Fraction(0))),
            dimension=2,
        )
        out = lp_solve(lp)
        assert out.status is LpStatus.OPTIMAL
        assert out.point == vec(1, 0)
        assert out.value == 0
        assert out.tight_inequalities == frozenset({1})

    def test_inconsistent_equalities(self):
        lp = LinearProgram(
            objective=vec(0),
            equalities=((vec(1), Fraction(0)), (vec(1), Fraction(1))),
            inequalities=(),
            dimension=1,
        )
        assert lp_solve(lp).status is LpStatus.INFEASIBLE

    def test_redundant_equalities(self):
        # rank-deficient but consistent: x1 + x2 = 2 stated twice (scaled)
        lp = LinearProgram(
            objective=vec(1, 0),
            equalities=(
                (vec(1, 1), Fraction(2)),
                (vec(2, 2), Fraction(4)),
            ),
            inequalities=((vec(-1, 0), Fraction(0)), (vec(0, -1), Fraction(0))),
            dimension=2,
        )
        out = lp_solve(lp)
        assert out.status is LpStatus.OPTIMAL
        assert out.value == 0
        assert out.point == vec(0, 2)

    def test_equalities_fix_the_point(self):
        # equalities of full rank leave no freedom; inequalities only checked
        lp = LinearProgram(
            objective=vec(5, -1),
            equalities=((vec(1, 0), Fraction(2)), (vec(0, 1), Fraction(-1))),
            inequalities=((vec(1, 1), Fraction(1)),),
            dimension=2,
        )
        out = lp_solve(lp)
        assert out.status is LpStatus.OPTIMAL
        assert out.point == vec(2, -1)
        assert out.value == 11
        assert out.tight_inequalities == frozenset({0})
        tight_violation = LinearProgram(
            objective=vec(0, 0),
            equalities=lp.equalities,
            inequalities=((vec(1, 1), Fraction(0)),),
            dimension=2,
        )
        assert lp_solve(tight_violation).status is LpStatus.INFEASIBLE

    def test_exactness_of_reported_data(self):
        rng = random.Random(7)
        for _ in range(50):
            lp = gens.random_bounded_lp(rng)
            out = lp_solve(lp)
            if not out.is_optimal:
                continue
            assert dot(lp.objective, out.point) == out.value
            for row, rhs in lp.equalities:
                assert dot(row, out.point) == rhs
            tight = set()
            for i, (row, rhs) in enumerate(lp.inequalities):
                lhs = dot(row, out.point)
                assert lhs <= rhs
                if lhs == rhs:
                    tight.add(i)
            assert tight == set(out.tight_inequalities)

    def test_determinism(self):
        rng = random.Random(11)
        for _ in range(25):
            lp = gens.random_bounded_lp(rng)
            assert lp_solve(lp) == lp_solve(lp)

    def test_oracle_equivalence_small(self):
        rng = random.Random(13)
        for _ in range(40):
            lp = gens.random_bounded_lp(rng)
            status, value = gens.vertex_enumeration_minimum(lp)
            out = lp_solve(lp)
            assert out.status.value == status
            if status == "optimal":
                assert out.value == value

    def test_degenerate_cycling_guard(self):
        # classic degenerate instance; Bland's rule must terminate
        lp = LinearProgram(
            objective=vec(Fraction(-3, 4), 150, Fraction(-1, 50), 6),
            equalities=(),
            inequalities=(
                (vec(Fraction(1, 4), -60, Fraction(-1, 25), 9), Fraction(0)),
                (vec(Fraction(1, 2), -90, Fraction(-1, 50), 3), Fraction(0)),
                (vec(0, 0, 1, 0), Fraction(1)),
                (vec(-1, 0, 0, 0), Fraction(0)),
                (vec(0, -1, 0, 0), Fraction(0)),
                (vec(0, 0, -1, 0), Fraction(0)),
                (vec(0, 0, 0, -1), Fraction(0)),
            ),
            dimension=4,
        )
        out = lp_solve(lp)
        assert out.status is LpStatus.OPTIMAL
        assert out.value == Fraction(-1, 20)


class TestCertificate:
    def test_multipliers_prove_optimality(self):
        rng = random.Random(17)
        checked = 0
        while checked < 30:
            lp = gens.random_bounded_lp(rng)
            out = lp_solve(lp)
            if not out.is_optimal:
                continue
            mu, lam = optimality_certificate(lp, out)
            assert all(l >= 0 for l in lam)
            # complementary slackness: multipliers vanish off the tight set
            for i, l in enumerate(lam):
                if i not in out.tight_inequalities:
                    assert l == 0
            # stationarity
            for d in range(lp.dimension):
                total = lp.objective[d]
                total += sum(
                    m * lp.equalities[e][0][d] for e, m in enumerate(mu)
                )
                total += sum(
                    l * lp.inequalities[i][0][d] for i, l in enumerate(lam)
                )
                assert total == 0
            # dual value equals primal value
            dual = -sum(
                m * lp.equalities[e][1] for e, m in enumerate(mu)
            ) - sum(l * lp.inequalities[i][1] for i, l in enumerate(lam))
            assert dual == out.value
            checked += 1


class TestFeasible:
    def test_witness(self):
        assert lp_feasible(
            ((vec(1), Fraction(3)),), ((vec(1), Fraction(3)),), 1
        ) == vec(3)

    def test_empty(self):
        assert (
            lp_feasible(
                (), ((vec(1), Fraction(-2)), (vec(-1), Fraction(-3))), 1
            )
            is None
        )

    def test_interval_witness_rechecked(self):
        rows = ((vec(-1), Fraction(2)), (vec(1), Fraction(3)))
        witness = lp_feasible((), rows, 1)
        assert witness is not None
        assert all(dot(a, witness) <= b for a, b in rows)


class TestMaxSlack:
    def test_witness_achieves_the_margin(self):
        rng = random.Random(19)
        checked = 0
        while checked < 30:
            n = rng.randint(1, 2)
            box = []
            for i in range(n):
                e = [Fraction(0)] * n
                e[i] = Fraction(1)
                box.append((tuple(e), Fraction(rng.randint(1, 3))))
                box.append((tuple(-c for c in e), Fraction(rng.randint(0, 3))))
            strict = [
                (
                    tuple(Fraction(rng.randint(-2, 2)) for _ in range(n)),
                    Fraction(rng.randint(-1, 3)),
                )
                for _ in range(rng.randint(1, 3))
            ]
            slack, witness = max_slack((), box, strict, n)
            if not slack.is_finite or slack.as_fraction() == 0:
                continue
            checked += 1
            s = slack.as_fraction()
            assert all(dot(a, witness) <= b for a, b in box)
            margins = [b - dot(a, witness) for a, b in strict]
            assert min(margins) == s  # the witness attains the maximum margin

    def test_margin_over_interval(self):
        # weak -x <= 2, x <= 3; strict x < 1.  Brute force over the interval
        # endpoints: margin 1 - x is largest at x = -2, giving 3.
        weak = [(vec(-1), Fraction(2)), (vec(1), Fraction(3))]
        oracle = max(Fraction(1) - x for x in (Fraction(-2), Fraction(3)))
        assert oracle == 3
        slack, witness = max_slack((), weak, [(vec(1), Fraction(1))], 1)
        assert slack == ExtendedRational.finite(3)
        assert witness == vec(-2)

    def test_zero_slack_means_empty_strict_system(self):
        slack, witness = max_slack(
            (), [], [(vec(1), Fraction(0)), (vec(-1), Fraction(0))], 1
        )
        assert slack == ExtendedRational.finite(0)
        assert witness == vec(0)

    def test_unconstrained_strict_row(self):
        slack, witness = max_slack((), [], [(vec(1), Fraction(5))], 1)
        assert slack == PLUS_INF
        assert witness is not None and witness[0] < 5

    def test_infeasible_weak_system(self):
        slack, witness = max_slack(
            (), [(vec(1), Fraction(-2)), (vec(-1), Fraction(-3))], [], 1
        )
        assert slack == ExtendedRational.finite(0)
        assert witness is None


class TestRowSpaceBasis:
    def test_rank_one(self):
        assert row_space_basis([vec(1, 0), vec(2, 0)]) == [vec(1, 0)]

    def test_empty(self):
        assert row_space_basis([]) == []
        assert row_space_basis([vec(0, 0)]) == []

    def test_full_rank_by_hand(self):
        # Gaussian elimination of {(1,1),(1,-1)}: pivots in both columns
        basis = row_space_basis([vec(1, 1), vec(1, -1)])
        assert len(basis) == 2
        # spans Q^2: both unit vectors are combinations; RREF makes it exact
        assert basis == [vec(1, 0), vec(0, 1)]


class TestExtendedRational:
    def test_total_order(self):
        three = ExtendedRational.finite(3)
        assert MINUS_INF < three < PLUS_INF
        assert sorted([PLUS_INF, three, MINUS_INF]) == [MINUS_INF, three, PLUS_INF]

    def test_subtraction_convention(self):
        assert PLUS_INF - PLUS_INF == PLUS_INF
        assert ExtendedRational.finite(1) - PLUS_INF == MINUS_INF
        assert PLUS_INF - ExtendedRational.finite(1) == PLUS_INF
        with pytest.raises(ArithmeticError):
            MINUS_INF - MINUS_INF

    def test_finite_arithmetic(self):
        a = ExtendedRational.finite(Fraction(1, 3))
        b = ExtendedRational.finite(Fraction(1, 6))
        assert (a - b).as_fraction() == Fraction(1, 6)
        assert (a + b).as_fraction() == Fraction(1, 2)
