"""Command-line front end.

Subcommands emit CSV (header row, ``.`` decimals, shortest round-trip float
formatting) to ``--out`` or stdout. Exit codes: 0 success, 1 a universal
relation reported violated, 2 input error, 3 numerical-consistency error.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys

import numpy as np

from . import circuit as ci
from .exceptions import InvalidArgumentError, NumericalConsistencyError, UnsupportedRelationError
from .relations import (
    EVALUABLE,
    Relation,
    all_universal_satisfied,
    branciard_valid,
    evaluate_all,
    region_boundary,
)
from .analysis import ScenarioStats
from .scenario import load_scenario, parse_grid

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_NUMERICAL = 0, 1, 2, 3


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _write(rows, header, out):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    text = buf.getvalue()
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _spec(args):
    spec = load_scenario(args.scenario)
    if getattr(args, "grid", None):
        spec = spec.with_grid(parse_grid(args.grid))
    return spec


def _points(spec):
    """(parameter column names, list of (values, params))."""
    points = spec.parameter_points()
    names = sorted(points[0])
    return names, [([p[n] for n in names], p) for p in points]


def run_verify(spec):
    """Rows of relation reports per sweep point, plus the overall universal verdict."""
    names, pts = _points(spec)
    rows, ok = [], True
    for values, params in pts:
        reports = evaluate_all(spec.build(params).analyze(), EVALUABLE)
        ok &= all_universal_satisfied(reports)
        for r in reports:
            resid = ";".join(f"{k}={fmt(v)}" for k, v in r.residuals.items())
            rows.append(values + [r.relation.name, r.lhs, r.rhs, r.slack, r.satisfied, r.applicable, resid])
    header = names + ["relation_id", "lhs", "rhs", "slack", "satisfied", "applicable", "precondition_residuals"]
    return header, rows, ok


SWEEP_COLUMNS = [
    "eps_a", "bias_a", "fuzz_a", "eps_b", "bias_b", "fuzz_b",
    "sigma_a", "sigma_b", "sigma_joint_a", "sigma_joint_b", "sigma_bar_a", "sigma_bar_b",
    "c_ab", "fuzz_bound", "product", "ozawa_lhs", "main_lhs",
]


def run_sweep(spec):
    names, pts = _points(spec)
    rows = []
    for values, params in pts:
        an = spec.build(params).analyze()
        a, b, s = an.a, an.b, an.stats
        reports = {r.relation: r for r in evaluate_all(an, (Relation.OZAWA, Relation.MAIN))}
        rows.append(values + [
            a.total, a.bias, a.fuzziness, b.total, b.bias, b.fuzziness,
            s.sigma_a, s.sigma_b, s.sigma_joint_a, s.sigma_joint_b, s.sigma_bar_a, s.sigma_bar_b,
            s.c_ab, s.fuzz_bound, a.total * b.total,
            reports[Relation.OZAWA].lhs, reports[Relation.MAIN].lhs,
        ])
    return names + SWEEP_COLUMNS, rows


REGION_COLUMNS = {
    Relation.OZAWA: "eps_b_ozawa",
    Relation.BRANCIARD_SPECIAL: "eps_b_branciard_special",
    Relation.COND_BOTH_UNBIASED: "eps_b_both_unbiased",
    Relation.COND_UNBIASED_A_PROJ_B: "eps_b_unbiased_a_proj_b",
    Relation.COND_UNBIASED_A: "eps_b_unbiased_a",
}


def run_region(sigma_a, sigma_b, c_ab, grid, branciard=None):
    """Forbidden-region boundaries on an eps_A grid.

    ``branciard=None`` includes the Branciard special-case column exactly
    when (sigma_A, sigma_B, c_AB) = (1, 1, 1); ``True`` demands it.
    """
    stats = ScenarioStats(sigma_a, sigma_b, 0.0, 0.0, 0.0, 0.0, c_ab, 0.0)
    valid = branciard_valid(stats)
    if branciard and not valid:
        raise UnsupportedRelationError("the Branciard special case needs sigma_A = sigma_B = c_AB = 1")
    rels = [r for r in REGION_COLUMNS if r is not Relation.BRANCIARD_SPECIAL or (valid and branciard is not False)]
    xs = grid.points()
    cols = [[eb for _, eb in region_boundary(r, stats, xs)] for r in rels]
    rows = [[float(x)] + [c[i] for c in cols] for i, x in enumerate(xs)]
    return ["eps_a"] + [REGION_COLUMNS[r] for r in rels], rows


CIRCUIT_QUANTITIES = [
    # (row name, statistic, run, operator-route attribute)
    ("fuzz_a", "fuzz_a_sq", "fuzziness", lambda an: an.a.fuzziness),
    ("fuzz_b", "fuzz_b_sq", "fuzziness", lambda an: an.b.fuzziness),
    ("error_a", "error_a_sq", "error", lambda an: an.a.total),
    ("disturbance_b", "disturbance_b_sq", "disturbance", lambda an: an.b.total),
    ("commutator_bound", "commutator", "commutator", lambda an: an.stats.fuzz_bound),
]


def _root_estimate(est: ci.SampleEstimate):
    """sqrt of a sampled radicand with a delta-method standard error (NaN when undefined)."""
    if est.value < 0:
        return float("nan"), float("nan")
    root = math.sqrt(est.value)
    se = est.std_error / (2 * root) if root > 0 else float("nan")
    return root, se


def run_circuit(spec, shots, seed, basis=None, variant="cswap"):
    names, pts = _points(spec)
    variant = ci.Variant(variant)
    rows = []
    for values, params in pts:
        sc = spec.build(params)
        an = sc.analyze()
        suite = ci.CircuitSuite.for_scenario(sc.rho, sc.joint, sc.a, sc.b, variant=variant)
        runs = {k: v for k, v in suite.runs.items() if basis is None or v.basis is ci.Basis(basis)}
        sampled, exact, roots = {}, {}, {}
        children = dict(zip(suite.runs, np.random.SeedSequence(seed).spawn(len(suite.runs))))
        for run, cfg in runs.items():
            dist = ci.joint_distribution(cfg)
            exact.update(ci.exact_statistics(cfg, dist))
            if cfg.basis is ci.Basis.X:
                roots.update(ci.exact_roots(cfg, dist))
            run_seed = int(children[run].generate_state(1, dtype=np.uint64)[0])
            sampled.update(ci.sample(cfg, shots, run_seed, dist))
        for name, stat, run, op_route in CIRCUIT_QUANTITIES:
            if run not in runs:
                continue
            est = sampled[stat]
            if stat == "commutator":
                rows.append(values + [name, abs(exact[stat]), op_route(an), abs(est.value), est.std_error, shots, seed])
                continue
            root, se = _root_estimate(est)
            exact_root = roots[stat]
            rows.append(values + [name, exact_root, op_route(an), root, se, shots, seed])
            rows.append(values + [f"{name}_sq", exact[stat], op_route(an) ** 2, est.value, est.std_error, shots, seed])
    return names + ["quantity", "exact", "operator_route", "sampled", "std_error", "shots", "seed"], rows


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="errtradeoff", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, scenario=True):
        if scenario:
            sp.add_argument("--scenario", default="vienna", help="preset name or scenario file (default: vienna)")
            sp.add_argument("--grid", help="override the sweep grid, start:stop:count (inclusive)")
        sp.add_argument("--out", help="CSV output path (default: stdout)")

    sp = sub.add_parser("verify", help="evaluate every relation at every sweep point")
    common(sp)
    sp = sub.add_parser("sweep", help="error, bias and fuzziness of both sides per sweep point")
    common(sp)
    sp = sub.add_parser("region", help="forbidden-region boundary curves")
    common(sp, scenario=False)
    sp.add_argument("--sigma-a", type=float, default=1.0)
    sp.add_argument("--sigma-b", type=float, default=1.0)
    sp.add_argument("--c-ab", type=float, default=1.0)
    sp.add_argument("--grid", default="0:2:201", help="eps_A grid start:stop:count (default 0:2:201)")
    sp.add_argument("--branciard", action=argparse.BooleanOptionalAction, default=None,
                    help="force or suppress the Branciard special-case column")
    sp = sub.add_parser("circuit", help="exact and sampled estimators of the controlled-swap circuit")
    common(sp)
    sp.add_argument("--shots", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--basis", choices=["x", "y"], help="restrict to runs with this qubit readout")
    sp.add_argument("--variant", choices=["cswap", "singlet"], default="cswap")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            header, rows, ok = run_verify(_spec(args))
            _write(rows, header, args.out)
            return EXIT_OK if ok else EXIT_VIOLATION
        if args.command == "sweep":
            header, rows = run_sweep(_spec(args))
        elif args.command == "region":
            header, rows = run_region(args.sigma_a, args.sigma_b, args.c_ab, parse_grid(args.grid), args.branciard)
        else:
            if args.shots < 1:
                raise InvalidArgumentError("--shots must be at least 1")
            header, rows = run_circuit(_spec(args), args.shots, args.seed, args.basis, args.variant)
        _write(rows, header, args.out)
        return EXIT_OK
    except NumericalConsistencyError as exc:
        print(f"errtradeoff: numerical consistency error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (InvalidArgumentError, ValueError, OSError) as exc:
        print(f"errtradeoff: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
