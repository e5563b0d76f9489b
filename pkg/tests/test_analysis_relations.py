import math

import numpy as np
import pytest

from errtradeoff import operators as ops
from errtradeoff.analysis import ErrorBreakdown, Scenario, ScenarioStats, error_breakdown
from errtradeoff.ensembles import (
    projective_scenario,
    random_qubit_scenario,
    random_scenario,
    unbiased_a_projective_b_scenario,
    unbiased_scenario,
)
from errtradeoff.exceptions import InvalidArgumentError, NumericalConsistencyError, UnsupportedRelationError
from errtradeoff.models import joint_from_indirect, projective_model, vienna_model
from errtradeoff.relations import (
    CONDITIONAL,
    UNIVERSAL,
    Relation,
    boundary_slack,
    dominance_check,
    evaluate,
    evaluate_all,
    region_boundary,
)


def vienna(phi):
    rho = ops.projector([1, 0])
    return Scenario(joint_from_indirect(vienna_model(phi), ops.Y), ops.X, ops.Y, rho)


def test_projective_measurement_has_zero_error():
    sc = projective_scenario(3)
    br = error_breakdown(sc.joint, sc.a, sc.rho)
    assert br.total == br.bias == br.fuzziness == 0.0


def test_vienna_components():
    phi = math.pi / 3
    an = vienna(phi).analyze()
    assert abs(an.a.total - 1.0) < 1e-12
    assert abs(an.a.fuzziness) < 1e-12
    assert abs(an.b.bias - abs(math.cos(phi))) < 1e-12
    assert abs(an.b.fuzziness - abs(math.cos(phi))) < 1e-12
    assert abs(an.stats.c_ab - 1.0) < 1e-12


def test_breakdown_rejects_inconsistent_components():
    with pytest.raises(NumericalConsistencyError):
        ErrorBreakdown(1.0, 0.5, 0.5)


def test_stats_reject_negative():
    with pytest.raises(InvalidArgumentError):
        ScenarioStats(-1, 1, 1, 1, 1, 1, 1, 0)


def test_scenario_dimension_mismatch():
    with pytest.raises(InvalidArgumentError):
        Scenario(projective_model(ops.Z), np.eye(3), ops.X, np.eye(2) / 2)


def test_mixed_tags_rejected():
    a1, a2 = random_scenario(1).analyze(), random_scenario(2).analyze()
    with pytest.raises(InvalidArgumentError):
        evaluate(Relation.MAIN, a1.a, a2.b, a1.stats)


def test_main_saturated_at_precise_measurement():
    rep = evaluate(Relation.MAIN, *_parts(vienna(0.0)))
    assert abs(rep.slack) < 1e-12
    rep = evaluate(Relation.OZAWA, *_parts(vienna(0.0)))
    assert abs(rep.slack - (math.sqrt(2) - 1)) < 1e-12


def _parts(sc):
    an = sc.analyze()
    return an.a, an.b, an.stats


@pytest.mark.parametrize("make", [random_scenario, random_qubit_scenario, unbiased_scenario, unbiased_a_projective_b_scenario])
def test_universal_relations_and_dominance(make):
    for seed in range(60):
        an = make(seed).analyze()
        for r in evaluate_all(an, UNIVERSAL):
            assert r.satisfied, (seed, r)
        assert dominance_check(an.a, an.b, an.stats).holds


def test_conditional_relations_apply_where_expected():
    for seed in range(40):
        reps = {r.relation: r for r in evaluate_all(unbiased_scenario(seed).analyze(), CONDITIONAL)}
        assert reps[Relation.COND_BOTH_UNBIASED].applicable and reps[Relation.COND_BOTH_UNBIASED].satisfied
        assert reps[Relation.COND_UNBIASED_A].applicable and reps[Relation.COND_UNBIASED_A].satisfied
        reps = {r.relation: r for r in evaluate_all(unbiased_a_projective_b_scenario(seed).analyze(), CONDITIONAL)}
        r = reps[Relation.COND_UNBIASED_A_PROJ_B]
        assert r.applicable and r.satisfied
        assert set(r.residuals) == {"unbiased_a", "projective_b"}


def test_conditional_relation_not_applicable_for_biased_measurement():
    reps = {r.relation: r for r in evaluate_all(vienna(0.5).analyze(), CONDITIONAL)}
    assert not reps[Relation.COND_BOTH_UNBIASED].applicable
    assert reps[Relation.COND_BOTH_UNBIASED].residuals["unbiased_a"] > 1e-3


def test_region_boundaries_unit_triple():
    s = ScenarioStats(1, 1, 0, 0, 0, 0, 1, 0)
    assert region_boundary(Relation.BRANCIARD_SPECIAL, s, [0.0, 1.0]) == [(0.0, 1.0), (1.0, 0.0)]
    assert region_boundary(Relation.OZAWA, s, [0.0])[0][1] == 1.0
    assert region_boundary(Relation.COND_BOTH_UNBIASED, s, [1.0])[0][1] == 1.0
    assert math.isinf(region_boundary(Relation.COND_BOTH_UNBIASED, s, [0.0])[0][1])
    assert region_boundary(Relation.COND_BOTH_UNBIASED, s, [1e9])[0][1] < 1e-8


def test_region_boundaries_general_triple():
    s = ScenarioStats(2.0, 0.5, 0, 0, 0, 0, 0.7, 0)
    for rel in (Relation.OZAWA, Relation.COND_UNBIASED_A, Relation.COND_UNBIASED_A_PROJ_B):
        for ea, eb in region_boundary(rel, s, np.linspace(0, 3, 31)):
            if eb > 0:
                assert abs(boundary_slack(rel, ea, eb, s)) < 1e-12
    assert {eb for _, eb in region_boundary(Relation.COND_UNBIASED_A_PROJ_B, s, [0, 1, 2])} == {0.35}
    with pytest.raises(UnsupportedRelationError):
        region_boundary(Relation.BRANCIARD_SPECIAL, s, [0.0])
    with pytest.raises(UnsupportedRelationError):
        region_boundary(Relation.MAIN, s, [0.0])
