import math

import numpy as np
import pytest

from errtradeoff import circuit as ci
from errtradeoff import operators as ops
from errtradeoff.ensembles import random_scenario
from errtradeoff.exceptions import InvalidArgumentError
from errtradeoff.scenario import load_scenario


def vienna_suite(phi):
    sc = load_scenario("vienna").build({"phi": phi})
    return sc, ci.CircuitSuite.for_scenario(sc.rho, sc.joint, sc.a, sc.b)


def test_final_state_cross_check():
    rng = np.random.default_rng(0)
    for d in (1, 2, 3):
        rho = ops.random_density(d, rng)
        rho_f = ci.final_state(rho)
        ops.require_density(rho_f)


def test_vienna_estimators():
    _, suite = vienna_suite(math.pi / 3)
    assert abs(ci.estimate_error_disturbance_exact(suite.error) - 1.0) < 1e-12
    assert abs(ci.estimate_error_disturbance_exact(suite.disturbance) - math.sqrt(0.5)) < 1e-12
    fa, fb = ci.estimate_fuzziness_exact(suite.fuzziness)
    assert fa == 0.0 and abs(fb - 0.5) < 1e-12
    _, suite = vienna_suite(math.pi / 2)
    assert ci.estimate_fuzziness_exact(suite.fuzziness)[0] == 0.0


def test_estimators_check_run_mode():
    _, suite = vienna_suite(0.3)
    with pytest.raises(InvalidArgumentError):
        ci.estimate_fuzziness_exact(suite.error)
    with pytest.raises(InvalidArgumentError):
        ci.estimate_commutator_bound_exact(suite.fuzziness)
    with pytest.raises(InvalidArgumentError):
        ci.estimate_error_disturbance_exact(suite.fuzziness)


def test_singlet_variant_restricted_to_qubits():
    sc = next(s for s in map(random_scenario, range(50)) if s.rho.shape[0] == 3)
    with pytest.raises(InvalidArgumentError):
        ci.CircuitConfig(sc.rho, sc.joint, variant=ci.Variant.SINGLET_PROJECTION, target_a=sc.a, target_b=sc.b)


def test_distribution_marginals():
    _, suite = vienna_suite(0.4)
    dist = ci.joint_distribution(suite.fuzziness)
    m = dist.marginal(["x"])
    assert abs(m.probs.sum() - 1) < 1e-12
    assert set(m.outcomes[:, 0]) <= {-1.0, 1.0}


def test_sampling_is_deterministic_and_consistent():
    _, suite = vienna_suite(math.pi / 3)
    a = ci.sample(suite.error, 20_000, 11)
    b = ci.sample(suite.error, 20_000, 11)
    assert a == b
    est = a["error_a_sq"]
    assert abs(est.value - 1.0) < 6 * est.std_error
    single = ci.sample(suite.error, 1, 3)["error_a_sq"]
    assert not single.defined


def test_suite_sample_uses_independent_streams():
    _, suite = vienna_suite(1.0)
    est = suite.sample(50_000, 5)
    exact = suite.exact()
    assert set(est) == set(exact)
    for k, v in est.items():
        assert abs(v.value - exact[k]) < 6 * v.std_error + 1e-12
    with pytest.raises(InvalidArgumentError):
        ci.sample(suite.error, 0, 1)
