"""Error-tradeoff relations as LHS/RHS/slack reports.

Every relation has the form ``lhs >= rhs``. Scalar relations are evaluated
from the two :class:`ErrorBreakdown` objects and the :class:`ScenarioStats`
of one scenario; the derivation-chain checks need the operators and take
a :class:`Scenario`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import operators as ops
from .analysis import Analysis, ErrorBreakdown, Scenario, ScenarioStats
from .exceptions import InvalidArgumentError, UnsupportedRelationError

SLACK_TOL = 1e-9
PRECONDITION_TOL = 1e-10


class Relation(enum.Enum):
    FUZZ_TRADEOFF = "fuzz_tradeoff"
    MAIN = "main"
    OZAWA = "ozawa"
    HALL = "hall"
    HALL_IMPROVED = "hall_improved"
    WESTON = "weston"
    WESTON_IMPROVED = "weston_improved"
    ROBERTSON_TYPE = "robertson_type"
    HEISENBERG_TYPE = "heisenberg_type"
    ROBERTSON_LIKE_COMMUTING = "robertson_like_commuting"
    COND_UNBIASED_A = "cond_unbiased_a"
    COND_UNBIASED_A_PROJ_B = "cond_unbiased_a_proj_b"
    COND_BOTH_UNBIASED = "cond_both_unbiased"
    # boundary curve only; valid for sigma_A = sigma_B = c_AB = 1
    BRANCIARD_SPECIAL = "branciard_special"


UNIVERSAL = (
    Relation.FUZZ_TRADEOFF,
    Relation.MAIN,
    Relation.OZAWA,
    Relation.HALL,
    Relation.HALL_IMPROVED,
    Relation.WESTON,
    Relation.WESTON_IMPROVED,
    Relation.ROBERTSON_TYPE,
    Relation.HEISENBERG_TYPE,
    Relation.ROBERTSON_LIKE_COMMUTING,
)
CONDITIONAL = (Relation.COND_UNBIASED_A, Relation.COND_UNBIASED_A_PROJ_B, Relation.COND_BOTH_UNBIASED)
EVALUABLE = UNIVERSAL + CONDITIONAL


@dataclass(frozen=True)
class RelationReport:
    relation: Relation
    lhs: float
    rhs: float
    slack: float
    satisfied: bool
    applicable: bool = True
    residuals: dict = field(default_factory=dict)
    mode: str = "scalar"


def _report(rel, lhs, rhs, applicable=True, residuals=None, mode="scalar"):
    slack = lhs - rhs
    return RelationReport(rel, lhs, rhs, slack, bool(slack >= -SLACK_TOL), applicable, residuals or {}, mode)


def _lhs_rhs(rel: Relation, a: ErrorBreakdown, b: ErrorBreakdown, s: ScenarioStats):
    c = s.c_ab
    if rel is Relation.FUZZ_TRADEOFF:
        return a.fuzziness * b.fuzziness, s.fuzz_bound
    if rel is Relation.MAIN:
        return a.fuzziness * b.fuzziness + a.bias * b.bias + a.bias * s.sigma_b + s.sigma_a * b.bias, c
    if rel is Relation.OZAWA:
        return a.total * b.total + a.total * s.sigma_b + s.sigma_a * b.total, c
    if rel is Relation.HALL:
        return a.total * b.total + a.total * s.sigma_joint_b + s.sigma_joint_a * b.total, c
    if rel is Relation.HALL_IMPROVED:
        return a.bias * b.bias + a.fuzziness * b.fuzziness + a.bias * s.sigma_joint_b + s.sigma_joint_a * b.bias, c
    if rel is Relation.WESTON:
        return a.total * (s.sigma_joint_b + s.sigma_b) / 2 + b.total * (s.sigma_joint_a + s.sigma_a) / 2, c
    if rel is Relation.WESTON_IMPROVED:
        return (
            a.fuzziness * b.fuzziness
            + a.bias * (s.sigma_bar_b + s.sigma_b) / 2
            + b.bias * (s.sigma_bar_a + s.sigma_a) / 2
        ), c
    if rel is Relation.ROBERTSON_TYPE:
        return s.sigma_bar_a * s.sigma_bar_b + a.bias * b.bias + a.bias * s.sigma_b + s.sigma_a * b.bias, c
    if rel is Relation.HEISENBERG_TYPE:
        return (a.bias + s.sigma_bar_a) * (b.bias + s.sigma_bar_b), c
    if rel is Relation.ROBERTSON_LIKE_COMMUTING:
        return s.sigma_joint_a * s.sigma_joint_b, 2 * s.fuzz_bound
    if rel is Relation.COND_UNBIASED_A:
        return math.sqrt(a.total**2 + s.sigma_a**2) * b.total, c
    if rel is Relation.COND_UNBIASED_A_PROJ_B:
        return b.total * s.sigma_a, c
    if rel is Relation.COND_BOTH_UNBIASED:
        return a.total * b.total, c
    raise UnsupportedRelationError(f"{rel.name} cannot be evaluated from a scenario")


def _preconditions(rel: Relation, a: ErrorBreakdown, b: ErrorBreakdown) -> dict:
    if rel is Relation.COND_UNBIASED_A:
        return {"unbiased_a": a.unbiased_residual}
    if rel is Relation.COND_UNBIASED_A_PROJ_B:
        return {"unbiased_a": a.unbiased_residual, "projective_b": b.sharpness_residual}
    if rel is Relation.COND_BOTH_UNBIASED:
        return {"unbiased_a": a.unbiased_residual, "unbiased_b": b.unbiased_residual}
    return {}


def evaluate(rel: Relation, a: ErrorBreakdown, b: ErrorBreakdown, stats: ScenarioStats) -> RelationReport:
    """Evaluate one relation for a single scenario.

    Conditional relations carry their precondition residuals and are marked
    not applicable when any residual reaches ``PRECONDITION_TOL``
    (including residuals that were never computed, i.e. NaN).
    """
    tags = {t for t in (a.tag, b.tag, stats.tag) if t is not None}
    if len(tags) > 1:
        raise InvalidArgumentError(f"inputs come from different scenarios: {sorted(tags)}")
    lhs, rhs = _lhs_rhs(rel, a, b, stats)
    residuals = _preconditions(rel, a, b)
    applicable = all(r < PRECONDITION_TOL for r in residuals.values())
    return _report(rel, float(lhs), float(rhs), applicable, residuals)


def evaluate_all(analysis: Analysis, relations=EVALUABLE) -> list[RelationReport]:
    return [evaluate(r, analysis.a, analysis.b, analysis.stats) for r in relations]


def all_universal_satisfied(reports) -> bool:
    return all(r.satisfied for r in reports if r.relation in UNIVERSAL)


@dataclass(frozen=True)
class Link:
    """One ``lhs >= rhs`` step of an inequality chain."""

    name: str
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.lhs - self.rhs

    @property
    def holds(self) -> bool:
        return self.slack >= -SLACK_TOL


@dataclass(frozen=True)
class ChainReport:
    links: tuple

    @property
    def holds(self) -> bool:
        return all(link.holds for link in self.links)

    @property
    def min_slack(self) -> float:
        return min(link.slack for link in self.links)

    def __getitem__(self, name) -> Link:
        for link in self.links:
            if link.name == name:
                return link
        raise KeyError(name)


def dominance_check(a: ErrorBreakdown, b: ErrorBreakdown, stats: ScenarioStats) -> ChainReport:
    """Steps by which the bias/fuzziness relations imply the total-error ones."""
    s = stats
    main, _ = _lhs_rhs(Relation.MAIN, a, b, s)
    ozawa, _ = _lhs_rhs(Relation.OZAWA, a, b, s)
    hall_i, _ = _lhs_rhs(Relation.HALL_IMPROVED, a, b, s)
    hall, _ = _lhs_rhs(Relation.HALL, a, b, s)
    weston_i, _ = _lhs_rhs(Relation.WESTON_IMPROVED, a, b, s)
    weston, _ = _lhs_rhs(Relation.WESTON, a, b, s)
    return ChainReport((
        Link("schwarz", a.total * b.total, a.bias * b.bias + a.fuzziness * b.fuzziness),
        Link("total_a_ge_bias_a", a.total, a.bias),
        Link("total_b_ge_bias_b", b.total, b.bias),
        Link("ozawa_ge_main", ozawa, main),
        Link("hall_ge_hall_improved", hall, hall_i),
        Link("weston_ge_weston_improved", weston, weston_i),
    ))


def _half_abs_comm(x, y, rho) -> float:
    return abs(ops.cexpectation(ops.commutator(x, y), rho)) / 2


def _rms(o, rho) -> float:
    return ops.clipped_sqrt(ops.expectation(o @ o, rho))


def _robertson(name, x, y, rho, scale=1.0) -> Link:
    """scale*sqrt<x^2>sqrt<y^2> >= scale*|<[x,y]>|/2, evaluated on operators."""
    return Link(name, scale * _rms(x, rho) * _rms(y, rho), scale * _half_abs_comm(x, y, rho))


def derivation_chain_check(scenario: Scenario) -> ChainReport:
    """Evaluate, link by link, the Robertson-term chains behind MAIN and WESTON_IMPROVED."""
    rho, a, b, j = scenario.rho, scenario.a, scenario.b, scenario.joint
    an = scenario.analyze()
    ea, eb, s = an.a, an.b, an.stats
    abar, bbar = j.bar("A"), j.bar("B")
    eye = np.eye(rho.shape[0])
    da, db = abar - a, bbar - b
    ca = a - ops.expectation(a, rho) * eye
    cb = b - ops.expectation(b, rho) * eye
    cabar = abar - ops.expectation(abar, rho) * eye
    cbbar = bbar - ops.expectation(bbar, rho) * eye
    c = s.c_ab

    # fuzziness term via the joint-space pair {A - bar(A) (x) 1, B - bar(B) (x) 1}
    rho_j = j.joint_state(rho)
    fa_op = j.obs_a - j.embed(abar)
    fb_op = j.obs_b - j.embed(bbar)
    t1 = _half_abs_comm(abar, bbar, rho)
    fuzz_link = Link("main.robertson.fuzz", ea.fuzziness * eb.fuzziness, t1)
    fuzz_joint = _robertson("main.robertson.fuzz_joint_space", fa_op, fb_op, rho_j)

    r_bias = _robertson("main.robertson.bias_bias", da, db, rho)
    r_bias_a = _robertson("main.robertson.bias_a_sigma_b", da, cb, rho)
    r_bias_b = _robertson("main.robertson.sigma_a_bias_b", ca, db, rho)
    main_lhs, _ = _lhs_rhs(Relation.MAIN, ea, eb, s)
    main_terms = t1 + r_bias.rhs + r_bias_a.rhs + r_bias_b.rhs
    main_combined = abs(ops.cexpectation(
        ops.commutator(bbar, abar) + ops.commutator(da, bbar) + ops.commutator(a, db), rho)) / 2

    q1 = _robertson("weston_improved.robertson.bias_a_sigma_barb", da, cbbar, rho, 0.5)
    q2 = _robertson("weston_improved.robertson.bias_a_sigma_b", da, cb, rho, 0.5)
    q3 = _robertson("weston_improved.robertson.sigma_bara_bias_b", cabar, db, rho, 0.5)
    q4 = _robertson("weston_improved.robertson.sigma_a_bias_b", ca, db, rho, 0.5)
    wi_lhs, _ = _lhs_rhs(Relation.WESTON_IMPROVED, ea, eb, s)
    wi_terms = t1 + q1.rhs + q2.rhs + q3.rhs + q4.rhs
    wi_middle = t1 + abs(ops.cexpectation(ops.commutator(a, b) - ops.commutator(abar, bbar), rho)) / 2

    return ChainReport((
        fuzz_link,
        fuzz_joint,
        Link("main.fuzz_joint_space_matches_bar", fuzz_joint.rhs, t1),
        Link("main.bar_matches_fuzz_joint_space", t1, fuzz_joint.rhs),
        r_bias, r_bias_a, r_bias_b,
        Link("main.sum_of_robertson_terms", main_lhs, main_terms),
        Link("main.triangle", main_terms, main_combined),
        Link("main.combined_equals_c", main_combined, c),
        Link("main.c_equals_combined", c, main_combined),
        q1, q2, q3, q4,
        Link("weston_improved.sum_of_robertson_terms", wi_lhs, wi_terms),
        Link("weston_improved.triangle", wi_terms, wi_middle),
        Link("weston_improved.final_triangle", wi_middle, c),
    ))


def boundary_slack(rel: Relation, eps_a: float, eps_b: float, stats: ScenarioStats) -> float:
    """Slack of a total-error relation at the point (eps_a, eps_b)."""
    sa, sb, c = stats.sigma_a, stats.sigma_b, stats.c_ab
    if rel is Relation.OZAWA:
        return eps_a * eps_b + eps_a * sb + sa * eps_b - c
    if rel is Relation.BRANCIARD_SPECIAL:
        return eps_a**2 + eps_b**2 - 1.0
    if rel is Relation.COND_BOTH_UNBIASED:
        return eps_a * eps_b - c
    if rel is Relation.COND_UNBIASED_A_PROJ_B:
        return eps_b * sa - c
    if rel is Relation.COND_UNBIASED_A:
        return math.sqrt(eps_a**2 + sa**2) * eps_b - c
    raise UnsupportedRelationError(f"{rel.name} has no closed-form boundary")


BOUNDARY_RELATIONS = (
    Relation.OZAWA,
    Relation.BRANCIARD_SPECIAL,
    Relation.COND_BOTH_UNBIASED,
    Relation.COND_UNBIASED_A_PROJ_B,
    Relation.COND_UNBIASED_A,
)


def branciard_valid(stats: ScenarioStats, tol: float = 1e-12) -> bool:
    return all(abs(v - 1.0) <= tol for v in (stats.sigma_a, stats.sigma_b, stats.c_ab))


def region_boundary(rel: Relation, stats: ScenarioStats, eps_a_grid) -> list[tuple[float, float]]:
    """Smallest eps_B allowed by ``rel`` at each eps_A.

    Returns 0.0 where the relation holds for every eps_B >= 0 and ``inf``
    where no finite eps_B satisfies it.
    """
    sa, sb, c = stats.sigma_a, stats.sigma_b, stats.c_ab
    if min(sa, sb, c) <= 0:
        raise InvalidArgumentError("region boundaries need sigma_A, sigma_B, c_AB > 0")
    if rel is Relation.BRANCIARD_SPECIAL and not branciard_valid(stats):
        raise UnsupportedRelationError("the Branciard special case needs sigma_A = sigma_B = c_AB = 1")
    out = []
    for ea in eps_a_grid:
        ea = float(ea)
        if ea < 0:
            raise InvalidArgumentError("errors are non-negative")
        if rel is Relation.OZAWA:
            eb = max(0.0, (c - ea * sb) / (ea + sa))
        elif rel is Relation.BRANCIARD_SPECIAL:
            eb = math.sqrt(max(0.0, 1.0 - ea * ea))
        elif rel is Relation.COND_BOTH_UNBIASED:
            eb = c / ea if ea > 0 else math.inf
        elif rel is Relation.COND_UNBIASED_A_PROJ_B:
            eb = c / sa
        elif rel is Relation.COND_UNBIASED_A:
            eb = c / math.sqrt(ea * ea + sa * sa)
        else:
            raise UnsupportedRelationError(f"{rel.name} has no closed-form boundary")
        out.append((ea, eb))
    return out
