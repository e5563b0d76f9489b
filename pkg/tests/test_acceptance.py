"""Acceptance criteria, one test per criterion.

A PASS/FAIL line per criterion is printed at the end of the pytest run
(see conftest.py).
"""

import math
import time

import numpy as np
import pytest

from errtradeoff import circuit as ci
from errtradeoff import operators as ops
from errtradeoff.analysis import fuzziness, operator_bias, total_error
from errtradeoff.cli import run_region
from errtradeoff.ensembles import random_scenario
from errtradeoff.relations import (
    UNIVERSAL,
    Relation,
    boundary_slack,
    derivation_chain_check,
    evaluate_all,
)
from errtradeoff.scenario import Grid, load_scenario


def test_criterion_1_universality():
    t0 = time.perf_counter()
    worst = math.inf
    for seed in range(1000):
        for r in evaluate_all(random_scenario(seed).analyze(), UNIVERSAL):
            worst = min(worst, r.slack)
            assert r.slack >= -1e-9, (seed, r)
    elapsed = time.perf_counter() - t0
    print(f"\n[criterion 1] min slack {worst:.3e}, {elapsed:.1f} s")
    assert elapsed < 60


def _vienna_oracle(phi):
    """Direct 2x2 evaluation: error of X_phi for X, and disturbance of Y by the Luders channel."""
    rho = np.array([[1, 0], [0, 0]], dtype=complex)
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    y = np.array([[0, -1j], [1j, 0]], dtype=complex)
    xp = math.cos(phi) * x + math.sin(phi) * y
    diff = xp - x
    err = math.sqrt(np.trace(diff @ diff @ rho).real)
    projs = [(np.eye(2) + s * xp) / 2 for s in (1, -1)]
    y_bar = sum(p @ y @ p for p in projs)
    # <(B_meas - Y)^2> = <bar(B_meas^2)> - 2<Y y_bar> + <Y^2> with bar(B_meas^2) = 1
    dist = math.sqrt(max(0.0, (2 - 2 * np.trace(y @ y_bar @ rho)).real))
    return err, dist


def test_criterion_2_vienna():
    spec = load_scenario("vienna")
    points = spec.parameter_points()
    assert len(points) == 181 and points[0]["phi"] == 0.0
    products = []
    for p in points:
        phi = p["phi"]
        an = spec.build(p).analyze()
        rep = {r.relation: r for r in evaluate_all(an, (Relation.MAIN, Relation.OZAWA))}
        if phi == 0.0:
            assert abs(rep[Relation.MAIN].slack) < 1e-9
        assert rep[Relation.OZAWA].slack > 1e-6, phi
        err, dist = _vienna_oracle(phi)
        assert abs(an.a.total - err) < 1e-10
        assert abs(an.b.total - dist) < 1e-10
        assert abs(an.a.total - 2 * abs(math.sin(phi / 2))) < 1e-10
        assert abs(an.b.total - math.sqrt(2) * abs(math.cos(phi))) < 1e-10
        products.append(an.a.total * an.b.total - an.stats.c_ab)
    signs = np.sign(products)
    assert np.any(signs < 0) and np.any(np.diff(signs[signs != 0]) != 0)


def test_criterion_3_region():
    header, rows = run_region(1.0, 1.0, 1.0, Grid(0.0, 2.0, 201))
    table = {h: np.array([r[i] for r in rows]) for i, h in enumerate(header)}
    ea = table["eps_a"]
    assert table["eps_b_branciard_special"][0] == 1.0
    assert table["eps_b_branciard_special"][ea == 1.0][0] == 0.0
    assert table["eps_b_ozawa"][0] == 1.0
    assert table["eps_b_both_unbiased"][ea == 1.0][0] == 1.0

    from errtradeoff.analysis import ScenarioStats
    from errtradeoff.cli import REGION_COLUMNS

    stats = ScenarioStats(1.0, 1.0, 0, 0, 0, 0, 1.0, 0)
    active = 0
    for rel, col in REGION_COLUMNS.items():
        for x, eb in zip(ea, table[col]):
            if math.isinf(eb):
                continue
            s = boundary_slack(rel, x, eb, stats)
            if eb > 0:
                active += 1
                assert abs(s) < 1e-9, (rel, x, eb, s)
            else:
                # clipped point: the relation already holds at eps_B = 0
                assert s >= -1e-9, (rel, x, s)
    assert active > 0


def test_criterion_4_decomposition():
    for seed in range(500):
        sc = random_scenario(10_000 + seed)
        j = sc.joint
        rng = np.random.default_rng(seed)
        for which, target in (("A", sc.a), ("B", sc.b)):
            e, eb, ef = total_error(j, target, sc.rho, which), operator_bias(j, target, sc.rho, which), fuzziness(j, sc.rho, which)
            assert abs(e**2 - eb**2 - ef**2) < 1e-10
            # fuzziness^2 = <(O - T(x)1)^2> - <(bar O - T)^2> for any T; T = 0 and T = target are the special cases
            rho_j = j.joint_state(sc.rho)
            o, bar = j.side(which), j.bar(which)
            for t in (np.zeros_like(target), target, ops.random_hermitian(j.system_dim, rng)):
                d1 = o - j.embed(t)
                d2 = bar - t
                rhs = ops.expectation(d1 @ d1, rho_j) - ops.expectation(d2 @ d2, sc.rho)
                assert abs(ef**2 - rhs) < 1e-10


def test_criterion_5_circuit():
    for seed in range(200):
        sc = random_scenario(20_000 + seed)
        an = sc.analyze()
        suite = ci.CircuitSuite.for_scenario(sc.rho, sc.joint, sc.a, sc.b)
        fa, fb = ci.estimate_fuzziness_exact(suite.fuzziness)
        assert abs(fa - an.a.fuzziness) < 1e-10 and abs(fb - an.b.fuzziness) < 1e-10
        assert abs(ci.estimate_error_disturbance_exact(suite.error) - an.a.total) < 1e-10
        assert abs(ci.estimate_error_disturbance_exact(suite.disturbance) - an.b.total) < 1e-10
        assert abs(ci.estimate_commutator_bound_exact(suite.commutator) - an.stats.fuzz_bound) < 1e-10

        d = sc.rho.shape[0]
        u = ci.controlled_swap(d)
        conj = u @ ci.build_initial_state(sc.rho) @ u.conj().T
        assert ops.maxnorm(conj - ci.final_state_closed_form(sc.rho)) < 1e-12

    checked = 0
    for seed in range(200):
        sc = random_scenario(30_000 + seed, max_system=2)
        suite = ci.CircuitSuite.for_scenario(sc.rho, sc.joint, sc.a, sc.b)
        for cfg in (suite.fuzziness, suite.error, suite.disturbance):
            p = ci.joint_distribution(cfg)
            q = ci.joint_distribution(cfg.replace(variant=ci.Variant.SINGLET_PROJECTION))
            assert p.names == q.names and np.array_equal(p.outcomes, q.outcomes)
            assert np.max(np.abs(p.probs - q.probs)) < 1e-10
            checked += 1
    assert checked == 600


VIENNA_MC_PHIS = (0.0, math.pi / 3, math.pi / 4, 2.0)


@pytest.mark.slow
def test_criterion_6_monte_carlo():
    t0 = time.perf_counter()
    spec = load_scenario("vienna")
    for phi in VIENNA_MC_PHIS:
        sc = spec.build({"phi": phi})
        suite = ci.CircuitSuite.for_scenario(sc.rho, sc.joint, sc.a, sc.b)
        for cfg in suite.runs.values():
            dist = ci.joint_distribution(cfg)
            exact = ci.exact_statistics(cfg, dist)
            misses = {k: 0 for k in exact}
            for seed in range(100):
                for k, est in ci.sample(cfg, 1_000_000, seed, dist).items():
                    if abs(est.value - exact[k]) > 5 * est.std_error + 1e-12:
                        misses[k] += 1
            assert all(m <= 1 for m in misses.values()), (phi, misses)

            small = ci.sample(cfg, 10_000, 7, dist)
            large = ci.sample(cfg, 1_000_000, 7, dist)
            for k in exact:
                if large[k].std_error > 0:
                    ratio = small[k].std_error / large[k].std_error
                    assert abs(ratio / 10 - 1) < 0.2, (phi, k, ratio)
    elapsed = time.perf_counter() - t0
    print(f"\n[criterion 6] {elapsed:.1f} s")
    assert elapsed < 300


def test_criterion_7_derivation_chains():
    for seed in range(500):
        chain = derivation_chain_check(random_scenario(40_000 + seed))
        assert chain.holds, (seed, [(l.name, l.slack) for l in chain.links if not l.holds])
