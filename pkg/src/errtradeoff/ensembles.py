"""Seeded random scenarios for property tests and the acceptance suite."""

from __future__ import annotations

import numpy as np

from . import operators as ops
from .analysis import Scenario
from .models import IndirectModel, JointObservables, joint_from_indirect, projective_model, unbiased_joint_model


def _dims(rng, max_system, max_apparatus):
    return int(rng.integers(2, max_system + 1)), int(rng.integers(1, max_apparatus + 1))


def _maybe_degenerate(o, rng):
    """Occasionally collapse the spectrum to two values to exercise degenerate meters."""
    if o.shape[0] > 2 and rng.random() < 0.25:
        w, v = np.linalg.eigh(o)
        w = np.where(w > np.median(w), 1.0, -1.0)
        return (v * w) @ v.conj().T
    return o


def random_indirect_model(seed, max_system: int = 4, max_apparatus: int = 4) -> IndirectModel:
    rng = np.random.default_rng(seed)
    d_s, d_a = _dims(rng, max_system, max_apparatus)
    rank = int(rng.integers(1, d_a + 1))
    return IndirectModel(
        d_s,
        ops.random_density(d_a, rng, rank=rank),
        ops.random_unitary(d_s * d_a, rng),
        _maybe_degenerate(ops.random_hermitian(d_a, rng), rng),
    )


def random_scenario(seed, max_system: int = 4, max_apparatus: int = 4) -> Scenario:
    """Random state, random targets, random indirect model followed by an ideal B readout.

    The B measured after the interaction is an independent random
    observable, so the B-side is generally biased.
    """
    rng = np.random.default_rng(seed)
    model = random_indirect_model(rng, max_system, max_apparatus)
    d = model.system_dim
    rank = int(rng.integers(1, d + 1))
    rho = ops.random_density(d, rng, rank=rank)
    a = ops.random_hermitian(d, rng)
    b = ops.random_hermitian(d, rng)
    b_meas = b if rng.random() < 0.5 else ops.random_hermitian(d, rng)
    return Scenario(joint_from_indirect(model, b_meas), a, b, rho)


def random_qubit_scenario(seed) -> Scenario:
    """d_s = 2 scenario with an apparatus of dimension at most 4."""
    return random_scenario(seed, max_system=2, max_apparatus=4)


def unbiased_scenario(seed, max_system: int = 4) -> Scenario:
    """Both sides unbiased: coin-flip joint measurement of random A and B."""
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, max_system + 1))
    a = ops.random_hermitian(d, rng)
    b = ops.random_hermitian(d, rng)
    rho = ops.random_density(d, rng, rank=int(rng.integers(1, d + 1)))
    return Scenario(unbiased_joint_model(a, b), a, b, rho)


def unbiased_a_projective_b_scenario(seed, max_system: int = 4, max_apparatus: int = 4) -> Scenario:
    """A-side A (x) 1 + 1 (x) N with <N> = 0 (unbiased, fuzzy); B-side g(A) (x) 1 (projective)."""
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, max_system + 1))
    d_a = int(rng.integers(2, max_apparatus + 1))
    a = ops.random_hermitian(d, rng)
    b = ops.random_hermitian(d, rng)
    rho = ops.random_density(d, rng)
    rho_a = ops.random_density(d_a, rng)
    n = ops.random_hermitian(d_a, rng)
    n = n - ops.expectation(n, rho_a) * np.eye(d_a)
    w, v = np.linalg.eigh(a)
    g = (v * rng.standard_normal(d)) @ v.conj().T
    obs_a = np.kron(a, np.eye(d_a)) + np.kron(np.eye(d), n)
    obs_b = np.kron(g, np.eye(d_a))

    return Scenario(JointObservables(d, obs_a, obs_b, rho_a, commutator_tol=1e-8), a, b, rho)


def projective_scenario(seed, max_system: int = 4) -> Scenario:
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, max_system + 1))
    a = ops.random_hermitian(d, rng)
    return Scenario(projective_model(a), a, ops.random_hermitian(d, rng), ops.random_density(d, rng))
