"""Classifiers: critical / stationary / local / global, and their chain."""

import itertools
import random
from fractions import Fraction

import pytest

from polydc import (
    ConvexBody,
    DcProblem,
    GlobalStatus,
    LocalStatus,
    MaxAffine,
    OutsideDomain,
    PolyhedralSet,
    bodies_intersect,
    body_in_body,
    classify,
    is_critical,
    is_local_solution,
    is_stationary,
)
from polydc.exactlp import row_space_basis
from polydc.optimality import subdifferential_g_plus_indicator, subdifferential_h

import gens
from gens import vec

F = Fraction


class TestBodyOperations:
    def test_hull_containment_on_a_line(self):
        P = ConvexBody(1, points=(vec(0), vec(1)))
        Q = ConvexBody(1, points=(vec(-1), vec(0), vec(1)))
        assert body_in_body(P, Q)

    def test_halfline_reaches_the_segment(self):
        P = ConvexBody(1, points=(vec(0), vec(1)))
        Q = ConvexBody(1, points=(vec(0),), rays=(vec(1),))
        assert body_in_body(P, Q)
        assert not body_in_body(ConvexBody(1, points=(vec(-1), vec(0))), Q)

    def test_intersection_witnesses(self):
        P = ConvexBody(1, points=(vec(0), vec(1)))
        assert bodies_intersect(P, ConvexBody(1, points=(vec(1), vec(2)))) == vec(1)
        assert bodies_intersect(P, ConvexBody(1, points=(vec(2), vec(3)))) is None

    def test_critical_but_not_stationary_witness(self, abs_problem):
        dh = subdifferential_h(abs_problem, vec(0))
        dgc = subdifferential_g_plus_indicator(abs_problem, vec(0))
        assert bodies_intersect(dh, dgc) == vec(0)
        assert not body_in_body(dh, dgc)


class TestCritical:
    def test_interval_probes(self, interval_problem):
        assert is_critical(interval_problem, vec(1))
        assert not is_critical(interval_problem, vec(2))

    def test_absolute_value_origin(self, abs_problem):
        assert is_critical(abs_problem, vec(0))

    def test_precondition_names_failing_set(self, interval_problem):
        with pytest.raises(OutsideDomain, match="constraint set C"):
            is_critical(interval_problem, vec(10))


class TestStationary:
    def test_interval_probes(self, interval_problem):
        assert is_stationary(interval_problem, vec(0))
        assert not is_stationary(interval_problem, vec(1))

    def test_absolute_value_origin(self, abs_problem):
        assert not is_stationary(abs_problem, vec(0))


class TestLocal:
    def test_interval_probes(self, interval_problem):
        assert is_local_solution(interval_problem, vec(-2)) is LocalStatus.YES
        assert is_local_solution(interval_problem, vec(-1)) is LocalStatus.NO

    def test_boundary_of_dom_h_gives_unknown(self):
        # h finite only on [0, oo); at 0 stationarity holds but the
        # interiority hypothesis fails, so no local claim is made
        dom_h = PolyhedralSet(1, inequalities=((vec(-1), F(0)),))
        prob = DcProblem(
            g=MaxAffine.constant(0, 1),
            h=MaxAffine.from_pieces([(vec(0), F(0))], 1, domain=dom_h),
            C=PolyhedralSet.box([F(0)], [F(1)]),
        )
        assert is_stationary(prob, vec(0))
        assert is_local_solution(prob, vec(0)) is LocalStatus.UNKNOWN_HYPOTHESIS_NOT_MET
        # stationarity failing still yields a definite "no", even at a
        # boundary point of dom(h): here f = -x decreases through 0
        sloped = DcProblem(
            g=MaxAffine.constant(0, 1),
            h=MaxAffine.from_pieces([(vec(1), F(0))], 1, domain=dom_h),
            C=PolyhedralSet.box([F(0)], [F(1)]),
        )
        assert not sloped.h.domain.is_interior_point(vec(0))
        assert is_local_solution(sloped, vec(0)) is LocalStatus.NO


class TestClassify:
    def test_global_solution(self, interval_problem):
        c = classify(interval_problem, vec(3), compute_global=True)
        assert (c.critical, c.stationary) == (True, True)
        assert c.local is LocalStatus.YES
        assert c.global_ is GlobalStatus.YES

    def test_local_but_not_global(self, interval_problem):
        c = classify(interval_problem, vec(-2), compute_global=True)
        assert c.local is LocalStatus.YES
        assert c.global_ is GlobalStatus.NO

    def test_slope_region_is_nothing(self, interval_problem):
        # f = 1 - x strictly decreases through 2, so 2 is no local solution
        c = classify(interval_problem, vec(2), compute_global=True)
        assert (c.critical, c.stationary) == (False, False)
        assert c.local is LocalStatus.NO
        assert c.global_ is GlobalStatus.NO

    def test_infeasible_point(self, interval_problem):
        c = classify(interval_problem, vec(7))
        assert not c.feasible
        assert c.local is LocalStatus.NO
        assert c.global_ is GlobalStatus.NOT_COMPUTED

    def test_chain_on_random_instances(self):
        rng = random.Random(31)
        for _ in range(12):
            prob = gens.random_dc_instance(rng)
            lo, hi = prob.C.bounding_box()
            for _ in range(6):
                x = tuple(
                    l + F(rng.randint(0, 3), 3) * (u - l) for l, u in zip(lo, hi)
                )
                c = classify(prob, x)
                if c.local is LocalStatus.YES:
                    assert c.stationary
                if c.stationary:
                    assert c.critical

    def test_global_implies_local(self):
        rng = random.Random(37)
        for _ in range(8):
            prob = gens.random_dc_instance(rng)
            lo, hi = prob.C.bounding_box()
            x = tuple(
                l + F(rng.randint(0, 2), 2) * (u - l) for l, u in zip(lo, hi)
            )
            c = classify(prob, x, compute_global=True)
            if c.global_ is GlobalStatus.YES:
                assert c.local is LocalStatus.YES


class TestConcurrentUse:
    def test_parallel_classification_is_consistent(self, interval_problem):
        # all operations are pure functions of immutable values
        from concurrent.futures import ThreadPoolExecutor

        probes = [vec(F(k, 8)) for k in range(-16, 25)]
        expected = [classify(interval_problem, x) for x in probes]
        with ThreadPoolExecutor(max_workers=8) as pool:
            results = list(
                pool.map(lambda x: classify(interval_problem, x), probes)
            )
        assert results == expected


class TestTwoRouteEquivalence:
    """The classifier's generator machinery must agree with the raw
    active-set formulas at points interior to both domains."""

    def _direct_bodies(self, prob, x):
        dh = ConvexBody(
            prob.dimension,
            points=tuple(
                prob.h.pieces[j - 1][0]
                for j in sorted(prob.h.active_indices(x))
            ),
        )
        tight = tuple(
            a for a, b in prob.C.inequalities if sum(
                c * v for c, v in zip(a, x)
            ) == b
        )
        dgc = ConvexBody(
            prob.dimension,
            points=tuple(
                prob.g.pieces[i - 1][0]
                for i in sorted(prob.g.active_indices(x))
            ),
            rays=tight,
            lineality=tuple(a for a, _ in prob.C.equalities),
        )
        return dh, dgc

    def test_hull_plus_cone_route(self):
        rng = random.Random(41)
        for _ in range(10):
            prob = gens.random_dc_instance(rng)
            lo, hi = prob.C.bounding_box()
            probes = [
                tuple(l + F(k, 2) * (u - l) for l, u in zip(lo, hi))
                for k in range(3)
            ]
            for x in probes:
                dh, dgc = self._direct_bodies(prob, x)
                assert body_in_body(dh, dgc) == is_stationary(prob, x)

    def test_equality_rows_as_lineality(self):
        # constraint set: the segment {x1 = 0} x [-1, 1], so the normal
        # cone mixes a lineality space with tight-row rays
        C = PolyhedralSet(
            2,
            equalities=((vec(1, 0), F(0)),),
            inequalities=((vec(0, 1), F(1)), (vec(0, -1), F(1))),
        )
        g = MaxAffine.constant(0, 2)
        h = MaxAffine.from_pieces([(vec(0, 1), F(0)), (vec(0, -1), F(0))], 2)
        prob = DcProblem(g=g, h=h, C=C)
        # at (0, 1): N_C = span{(1,0)} + pos{(0,1)}; dh = {(0,1)} fits
        assert is_stationary(prob, vec(0, 1))
        # at (0, 0): dh = conv{(0,1),(0,-1)}, N_C = span{(1,0)}: not stationary
        assert not is_stationary(prob, vec(0, 0))
        assert is_critical(prob, vec(0, 0))
        # replacing the lineality by the raw equality row changes nothing
        basis = row_space_basis([vec(1, 0)])
        assert basis == [vec(1, 0)]
