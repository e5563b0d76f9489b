"""Total RMS error, operator bias, fuzziness and the standard deviations of a scenario."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from . import operators as ops
from .exceptions import InvalidArgumentError, NumericalConsistencyError
from .models import JointObservables, is_unbiased, sharpness_residual

RADICAND_TOL = 1e-10
DECOMPOSITION_TOL = 1e-10


@dataclass(frozen=True)
class ErrorBreakdown:
    """Total error with its operator bias and fuzziness components for one side.

    On the B-side of an error-disturbance scenario the total is the disturbance.
    """

    total: float
    bias: float
    fuzziness: float
    unbiased_residual: float = float("nan")
    sharpness_residual: float = float("nan")
    tag: str | None = None

    def __post_init__(self):
        resid = abs(self.total**2 - self.bias**2 - self.fuzziness**2)
        if resid > DECOMPOSITION_TOL * max(1.0, self.total**2):
            raise NumericalConsistencyError(f"error decomposition residual {resid:.3e}")


@dataclass(frozen=True)
class ScenarioStats:
    sigma_a: float
    sigma_b: float
    sigma_joint_a: float
    sigma_joint_b: float
    sigma_bar_a: float
    sigma_bar_b: float
    c_ab: float
    fuzz_bound: float
    tag: str | None = None

    def __post_init__(self):
        for name in ("sigma_a", "sigma_b", "sigma_joint_a", "sigma_joint_b", "sigma_bar_a", "sigma_bar_b", "c_ab", "fuzz_bound"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise InvalidArgumentError(f"{name} must be finite and non-negative, got {v}")


def _check(joint: JointObservables, rho, target=None):
    rho = ops.as_operator(rho, "state")
    if rho.shape[0] != joint.system_dim:
        raise InvalidArgumentError(f"state dimension {rho.shape[0]} != system dimension {joint.system_dim}")
    if target is not None:
        target = ops.require_hermitian(target, "target", tol=1e-10)
        if target.shape[0] != joint.system_dim:
            raise InvalidArgumentError(f"target dimension {target.shape[0]} != system dimension {joint.system_dim}")
    return rho, target


def total_error(joint: JointObservables, target, rho, which: str = "A") -> float:
    """sqrt(<(O - target (x) 1)^2>) in rho (x) rho_a, evaluated on the full space."""
    rho, target = _check(joint, rho, target)
    o, t = joint.side(which), joint.embed(target)
    rho_j = joint.joint_state(rho)
    diff = o - t
    scale = ops.expectation(o @ o, rho_j) + ops.expectation(t @ t, rho_j)
    return ops.clipped_sqrt(ops.expectation(diff @ diff, rho_j), "squared error", RADICAND_TOL, scale)


def fuzziness(joint: JointObservables, rho, which: str = "A") -> float:
    rho, _ = _check(joint, rho)
    b = joint.bar(which)
    second = ops.expectation(joint.bar_square(which), rho)
    return ops.clipped_sqrt(second - ops.expectation(b @ b, rho), "squared fuzziness", RADICAND_TOL, 2 * second)


def operator_bias(joint: JointObservables, target, rho, which: str = "A") -> float:
    rho, target = _check(joint, rho, target)
    b = joint.bar(which)
    d = b - target
    scale = ops.expectation(b @ b, rho) + ops.expectation(target @ target, rho)
    return ops.clipped_sqrt(ops.expectation(d @ d, rho), "squared bias", RADICAND_TOL, scale)


def povm_error(povm, target, rho) -> float:
    """Total error from the POVM alone: <M2 - M1 T - T M1 + T^2> with M_k the k-th moment operators."""
    m1 = povm.first_moment()
    m2 = povm.second_moment()
    val = ops.expectation(m2 - m1 @ target - target @ m1 + target @ target, rho)
    scale = ops.expectation(m2, rho) + ops.expectation(target @ target, rho)
    return ops.clipped_sqrt(val, "squared error", RADICAND_TOL, 2 * scale)


def error_breakdown(joint: JointObservables, target, rho, which: str = "A", tag: str | None = None) -> ErrorBreakdown:
    rho, target = _check(joint, rho, target)
    return ErrorBreakdown(
        total=total_error(joint, target, rho, which),
        bias=operator_bias(joint, target, rho, which),
        fuzziness=fuzziness(joint, rho, which),
        unbiased_residual=is_unbiased(joint, target, which)[1],
        sharpness_residual=sharpness_residual(joint, which),
        tag=tag,
    )


def scenario_stats(joint: JointObservables, a, b, rho, tag: str | None = None) -> ScenarioStats:
    rho, a = _check(joint, rho, a)
    _, b = _check(joint, rho, b)
    rho_j = joint.joint_state(rho)
    bar_a, bar_b = joint.bar("A"), joint.bar("B")
    return ScenarioStats(
        sigma_a=ops.std(a, rho),
        sigma_b=ops.std(b, rho),
        sigma_joint_a=ops.std(joint.obs_a, rho_j),
        sigma_joint_b=ops.std(joint.obs_b, rho_j),
        sigma_bar_a=ops.std(bar_a, rho),
        sigma_bar_b=ops.std(bar_b, rho),
        c_ab=abs(ops.cexpectation(ops.commutator(a, b), rho)) / 2,
        fuzz_bound=abs(ops.cexpectation(ops.commutator(bar_a, bar_b), rho)) / 2,
        tag=tag,
    )


def _fingerprint(*arrays) -> str:
    h = hashlib.sha1()
    for a in arrays:
        h.update(np.ascontiguousarray(np.asarray(a, dtype=complex)).tobytes())
    return h.hexdigest()[:16]


@dataclass(frozen=True)
class Scenario:
    """A state, two target observables and a joint measurement approximating them."""

    joint: JointObservables
    a: np.ndarray
    b: np.ndarray
    rho: np.ndarray

    def __post_init__(self):
        rho = ops.require_density(self.rho)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "a", _check(self.joint, rho, self.a)[1])
        object.__setattr__(self, "b", _check(self.joint, rho, self.b)[1])

    @property
    def tag(self) -> str:
        j = self.joint
        return _fingerprint(self.rho, self.a, self.b, j.obs_a, j.obs_b, j.apparatus_state)

    def analyze(self) -> "Analysis":
        tag = self.tag
        return Analysis(
            a=error_breakdown(self.joint, self.a, self.rho, "A", tag),
            b=error_breakdown(self.joint, self.b, self.rho, "B", tag),
            stats=scenario_stats(self.joint, self.a, self.b, self.rho, tag),
        )


@dataclass(frozen=True)
class Analysis:
    a: ErrorBreakdown
    b: ErrorBreakdown
    stats: ScenarioStats
