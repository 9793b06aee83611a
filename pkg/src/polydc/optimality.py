"""Point classifiers for polyhedral DC programs.

Three nested conditions are decided exactly at a feasible point x:

* critical:    the subdifferentials of h and of g + indicator(C) intersect;
* stationary:  the subdifferential of h is contained in that of
               g + indicator(C) (necessary for local optimality);
* local:       equivalent to stationary when x is interior to dom(h);
               without that interiority the classifier refuses to assert
               local optimality (stationarity failing still means "no").

All set comparisons reduce to rational LPs over generator weights.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from .model import ConvexBody, DcProblem, Vector


class LocalStatus(Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN_HYPOTHESIS_NOT_MET = "unknown-hypothesis-not-met"


class GlobalStatus(Enum):
    YES = "yes"
    NO = "no"
    NOT_COMPUTED = "not-computed"


@dataclass(frozen=True)
class HypothesisFlags:
    """Which interiority hypotheses held at the classified point."""

    interior_dom_g: bool
    interior_dom_h: bool


@dataclass(frozen=True)
class Classification:
    feasible: bool
    critical: bool
    stationary: bool
    local: LocalStatus
    global_: GlobalStatus
    hypothesis_flags: HypothesisFlags


def body_in_body(P: ConvexBody, Q: ConvexBody) -> bool:
    """Decide P subset of Q exactly (generator containment LPs)."""
    return P.issubset(Q)


def bodies_intersect(P: ConvexBody, Q: ConvexBody) -> Optional[Vector]:
    """A witness point of P ∩ Q, or None when disjoint."""
    return P.intersection_witness(Q)


def subdifferential_h(prob: DcProblem, x: Sequence) -> ConvexBody:
    return prob.h.subdifferential(x)


def subdifferential_g_plus_indicator(prob: DcProblem, x: Sequence) -> ConvexBody:
    """Subdifferential of g + indicator(C): the sum of the subdifferential
    of g and the normal cone of C, built by generator concatenation."""
    return prob.g.subdifferential(x).minkowski_sum(prob.C.normal_cone(x))


def is_critical(prob: DcProblem, x: Sequence) -> bool:
    x = prob.require_classifiable(x)
    witness = bodies_intersect(
        subdifferential_h(prob, x), subdifferential_g_plus_indicator(prob, x)
    )
    return witness is not None


def is_stationary(prob: DcProblem, x: Sequence) -> bool:
    x = prob.require_classifiable(x)
    return body_in_body(
        subdifferential_h(prob, x), subdifferential_g_plus_indicator(prob, x)
    )


def is_local_solution(prob: DcProblem, x: Sequence) -> LocalStatus:
    x = prob.require_classifiable(x)
    stationary = is_stationary(prob, x)
    if not stationary:
        return LocalStatus.NO
    if prob.h.domain.is_interior_point(x):
        return LocalStatus.YES
    return LocalStatus.UNKNOWN_HYPOTHESIS_NOT_MET


def classify(
    prob: DcProblem,
    x: Sequence,
    compute_global: bool = False,
) -> Classification:
    """Aggregate classification of one point.

    With compute_global the global solution value is obtained from the
    solution-set decomposition and compared with f(x); a point achieving
    the optimal value is upgraded to local=YES even when the interiority
    hypothesis failed, since global minimizers are local minimizers
    unconditionally.
    """
    from . import structure  # deferred: structure sits above this module

    feasible = (
        prob.C.contains(x)
        and prob.g.domain.contains(x)
        and prob.h.domain.contains(x)
    )
    flags = HypothesisFlags(
        interior_dom_g=prob.g.domain.is_interior_point(x),
        interior_dom_h=prob.h.domain.is_interior_point(x),
    )
    if not feasible:
        global_ = GlobalStatus.NO if compute_global else GlobalStatus.NOT_COMPUTED
        return Classification(
            feasible=False,
            critical=False,
            stationary=False,
            local=LocalStatus.NO,
            global_=global_,
            hypothesis_flags=flags,
        )
    critical = is_critical(prob, x)
    stationary = is_stationary(prob, x) if critical else False
    if not stationary:
        local = LocalStatus.NO
    elif flags.interior_dom_h:
        local = LocalStatus.YES
    else:
        local = LocalStatus.UNKNOWN_HYPOTHESIS_NOT_MET
    global_ = GlobalStatus.NOT_COMPUTED
    if compute_global:
        alpha_bar, _, _ = structure.global_solutions(prob)
        if alpha_bar.is_finite and prob.objective_value(x) == alpha_bar:
            global_ = GlobalStatus.YES
            local = LocalStatus.YES
        else:
            global_ = GlobalStatus.NO
    return Classification(
        feasible=True,
        critical=critical,
        stationary=stationary,
        local=local,
        global_=global_,
        hypothesis_flags=flags,
    )
