"""Measurement models on system (x) apparatus.

A joint measurement of two system observables is represented by a pair of
commuting Hermitian operators on system (x) apparatus together with the
apparatus state. Indirect models (apparatus state, interaction unitary,
meter) and POVMs are converted to and from that representation here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space

from . import operators as ops
from .exceptions import InvalidArgumentError, NonJointMeasurementError

SIDES = ("A", "B")
UNBIASED_TOL = 1e-10


def _apparatus_dims(o, rho_a):
    o = ops.as_operator(o)
    rho_a = ops.as_operator(rho_a, "apparatus state")
    d_a = rho_a.shape[0]
    if o.shape[0] % d_a:
        raise InvalidArgumentError(f"operator dimension {o.shape[0]} is not a multiple of apparatus dimension {d_a}")
    return o, rho_a, o.shape[0] // d_a, d_a


def bar_map(o, rho_a) -> np.ndarray:
    """System observable tr_a[o (1 (x) rho_a)]."""
    o, rho_a, d_s, d_a = _apparatus_dims(o, rho_a)
    return ops.partial_trace(o @ np.kron(np.eye(d_s), rho_a), [d_s, d_a], keep=[0])


@dataclass(frozen=True)
class IndirectModel:
    """Apparatus preparation, joint unitary, then projective meter readout."""

    system_dim: int
    apparatus_state: np.ndarray
    unitary: np.ndarray
    meter: np.ndarray

    def __post_init__(self):
        rho_a = ops.require_density(self.apparatus_state, "apparatus state")
        d_a = rho_a.shape[0]
        u = ops.require_unitary(self.unitary)
        if u.shape[0] != self.system_dim * d_a:
            raise InvalidArgumentError(
                f"unitary dimension {u.shape[0]} != system_dim*apparatus_dim = {self.system_dim * d_a}"
            )
        meter = ops.require_hermitian(self.meter, "meter", tol=1e-10)
        if meter.shape[0] != d_a:
            raise InvalidArgumentError(f"meter acts on dimension {meter.shape[0]}, apparatus has {d_a}")
        object.__setattr__(self, "apparatus_state", rho_a)
        object.__setattr__(self, "unitary", u)
        object.__setattr__(self, "meter", meter)

    @property
    def apparatus_dim(self) -> int:
        return self.apparatus_state.shape[0]

    def meter_observable(self) -> np.ndarray:
        """Heisenberg-picture meter U^dagger (1 (x) M) U."""
        u = self.unitary
        return u.conj().T @ np.kron(np.eye(self.system_dim), self.meter) @ u

    def kraus_povm(self, degeneracy_tol: float = ops.DEGENERACY_TOL) -> "Povm":
        """POVM from Kraus operators <m_j| U |psi_k> sqrt(p_k).

        Builds the effects from the eigen-decompositions of the apparatus
        state and the meter, without going through the bar map.
        """
        d_s, d_a = self.system_dim, self.apparatus_dim
        p, psi = np.linalg.eigh(self.apparatus_state)
        spec = ops.spectral_decompose(self.meter, degeneracy_tol)
        u4 = self.unitary.reshape(d_s, d_a, d_s, d_a)
        effects = []
        for proj in spec.projectors:
            w, vecs = np.linalg.eigh(proj)
            basis = vecs[:, w > 0.5]
            e = np.zeros((d_s, d_s), dtype=complex)
            for k in range(d_a):
                if p[k] <= 0:
                    continue
                # U restricted to input apparatus vector psi_k
                u_k = np.einsum("iajb,b->iaj", u4, psi[:, k])
                for j in range(basis.shape[1]):
                    kr = np.einsum("a,iaj->ij", basis[:, j].conj(), u_k)
                    e += p[k] * kr.conj().T @ kr
            effects.append(e)
        return Povm(spec.eigenvalues, tuple(effects))


@dataclass(frozen=True)
class JointObservables:
    """Commuting Hermitian pair (A-side, B-side) on system (x) apparatus."""

    system_dim: int
    obs_a: np.ndarray
    obs_b: np.ndarray
    apparatus_state: np.ndarray
    commutator_tol: float = 1e-10
    commutator_norm: float = field(init=False)

    def __post_init__(self):
        rho_a = ops.require_density(self.apparatus_state, "apparatus state")
        dim = self.system_dim * rho_a.shape[0]
        a = ops.require_hermitian(self.obs_a, "A-side observable", tol=1e-10)
        b = ops.require_hermitian(self.obs_b, "B-side observable", tol=1e-10)
        if a.shape[0] != dim or b.shape[0] != dim:
            raise InvalidArgumentError(
                f"joint observables must act on dimension {dim}, got {a.shape[0]} and {b.shape[0]}"
            )
        cnorm = ops.maxnorm(ops.commutator(a, b))
        if cnorm > self.commutator_tol:
            raise NonJointMeasurementError(f"joint observables do not commute (norm {cnorm:.3e})")
        object.__setattr__(self, "apparatus_state", rho_a)
        object.__setattr__(self, "obs_a", a)
        object.__setattr__(self, "obs_b", b)
        object.__setattr__(self, "commutator_norm", cnorm)

    @property
    def apparatus_dim(self) -> int:
        return self.apparatus_state.shape[0]

    @property
    def dim(self) -> int:
        return self.obs_a.shape[0]

    def side(self, which: str) -> np.ndarray:
        if which == "A":
            return self.obs_a
        if which == "B":
            return self.obs_b
        raise InvalidArgumentError(f"side must be 'A' or 'B', got {which!r}")

    def bar(self, which: str) -> np.ndarray:
        return bar_map(self.side(which), self.apparatus_state)

    def bar_square(self, which: str) -> np.ndarray:
        o = self.side(which)
        return bar_map(o @ o, self.apparatus_state)

    def joint_state(self, rho) -> np.ndarray:
        return np.kron(rho, self.apparatus_state)

    def embed(self, system_op) -> np.ndarray:
        """system_op (x) 1_apparatus."""
        return np.kron(system_op, np.eye(self.apparatus_dim))

    def joint_effects(self, degeneracy_tol: float = ops.DEGENERACY_TOL):
        """Joint outcome labels (alpha, beta) and system effects bar(P_alpha Q_beta).

        Pairs whose joint projector vanishes are dropped.
        """
        sa = ops.spectral_decompose(self.obs_a, degeneracy_tol)
        sb = ops.spectral_decompose(self.obs_b, degeneracy_tol)
        labels, effects = [], []
        for alpha, p in zip(sa.eigenvalues, sa.projectors):
            for beta, q in zip(sb.eigenvalues, sb.projectors):
                pq = p @ q
                if np.trace(pq).real < 0.5:
                    continue
                labels.append((alpha, beta))
                effects.append(bar_map(0.5 * (pq + pq.conj().T), self.apparatus_state))
        return labels, effects


@dataclass(frozen=True)
class Povm:
    outcomes: tuple
    effects: tuple

    def __post_init__(self):
        if len(self.outcomes) != len(self.effects):
            raise InvalidArgumentError("POVM needs one effect per outcome")
        d = np.asarray(self.effects[0]).shape[0]
        for e in self.effects:
            if ops.is_hermitian(e, 1e-10) is False or np.linalg.eigvalsh(0.5 * (e + e.conj().T))[0] < -1e-10:
                raise InvalidArgumentError("POVM effects must be positive semidefinite")
        resid = ops.maxnorm(sum(self.effects) - np.eye(d))
        if resid > 1e-10:
            raise InvalidArgumentError(f"POVM effects do not sum to identity (residual {resid:.3e})")

    @property
    def dim(self) -> int:
        return np.asarray(self.effects[0]).shape[0]

    def first_moment(self) -> np.ndarray:
        return sum(a * e for a, e in zip(self.outcomes, self.effects))

    def second_moment(self) -> np.ndarray:
        return sum(a * a * e for a, e in zip(self.outcomes, self.effects))

    def probabilities(self, rho) -> np.ndarray:
        return np.array([ops.expectation(e, rho) for e in self.effects])


def joint_from_indirect(model: IndirectModel, target_b) -> JointObservables:
    """Combine an indirect measurement with a subsequent ideal measurement of B.

    The A-side is the Heisenberg-picture meter, the B-side the evolved
    system observable B (x) 1. They commute because the two factors act on
    disjoint tensor factors before the common conjugation.
    """
    b = ops.require_hermitian(target_b, "target B", tol=1e-10)
    if b.shape[0] != model.system_dim:
        raise InvalidArgumentError(f"target B has dimension {b.shape[0]}, system has {model.system_dim}")
    u = model.unitary
    obs_b = u.conj().T @ np.kron(b, np.eye(model.apparatus_dim)) @ u
    obs_a = model.meter_observable()
    return JointObservables(model.system_dim, _herm(obs_a), _herm(obs_b), model.apparatus_state, commutator_tol=1e-8)


def _herm(o):
    return 0.5 * (o + o.conj().T)


def povm_from_joint(joint: JointObservables, which: str = "A", degeneracy_tol: float = ops.DEGENERACY_TOL) -> Povm:
    spec = ops.spectral_decompose(joint.side(which), degeneracy_tol)
    effects = tuple(bar_map(p, joint.apparatus_state) for p in spec.projectors)
    return Povm(spec.eigenvalues, effects)


def projective_model(a, b=None) -> JointObservables:
    """Trivial apparatus (dimension 1): the A-side is ``a`` itself.

    ``b`` defaults to the zero observable; if given it must commute with ``a``.
    """
    a = ops.require_hermitian(a, "observable")
    b = np.zeros_like(a) if b is None else ops.require_hermitian(b, "B-side observable")
    return JointObservables(a.shape[0], a, b, np.ones((1, 1), dtype=complex))


def is_unbiased(joint: JointObservables, target, which: str = "A", tol: float = UNBIASED_TOL):
    """Arthurs-Kelly unbiasedness bar(side) == target; returns (flag, residual)."""
    resid = ops.maxnorm(joint.bar(which) - np.asarray(target))
    return resid < tol, resid


def sharpness_residual(joint: JointObservables, which: str = "A") -> float:
    """max-norm of bar(O^2) - bar(O)^2; zero iff the measurement is projective on the system."""
    b = joint.bar(which)
    return ops.maxnorm(joint.bar_square(which) - b @ b)


def luders_model(observable, degeneracy_tol: float = ops.DEGENERACY_TOL) -> IndirectModel:
    """Projective (Lueders) measurement of ``observable`` as an indirect model.

    The apparatus register has one level per distinct eigenvalue, starts in
    |0>, and is cyclically shifted by k when the system lies in the k-th
    eigenspace. The meter is diag(eigenvalues).
    """
    spec = ops.spectral_decompose(observable, degeneracy_tol)
    n = len(spec)
    d_s = spec.projectors[0].shape[0]
    shift = np.roll(np.eye(n, dtype=complex), 1, axis=0)
    u = sum(np.kron(p, np.linalg.matrix_power(shift, k)) for k, p in enumerate(spec.projectors))
    rho_a = np.zeros((n, n), dtype=complex)
    rho_a[0, 0] = 1.0
    return IndirectModel(d_s, rho_a, u, np.diag(np.asarray(spec.eigenvalues, dtype=complex)))


def vienna_model(phi: float) -> IndirectModel:
    """Projective X_phi measurement on a qubit with a qubit apparatus.

    U = P+ (x) 1 + P- (x) X copies the X_phi eigenbasis onto the meter Z.
    """
    xp = ops.x_phi(phi)
    p_plus = 0.5 * (ops.I2 + xp)
    p_minus = 0.5 * (ops.I2 - xp)
    u = np.kron(p_plus, ops.I2) + np.kron(p_minus, ops.X)
    return IndirectModel(2, ops.projector([1, 0]), u, ops.Z)


def dilation_unitary(effects) -> np.ndarray:
    """Unitary U on system (x) C^n with U(psi (x) |0>) = sum_k sqrt(E_k) psi (x) |k>."""
    effects = [np.asarray(e, dtype=complex) for e in effects]
    n = len(effects)
    d = effects[0].shape[0]
    roots = []
    for e in effects:
        w, v = np.linalg.eigh(0.5 * (e + e.conj().T))
        roots.append((v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T)
    # isometry columns indexed by system basis i, rows by (i', k)
    iso = np.zeros((d * n, d), dtype=complex)
    for k, r in enumerate(roots):
        iso[k::n, :] = r
    comp = null_space(iso.conj().T)
    u = np.zeros((d * n, d * n), dtype=complex)
    free = iter(comp.T)
    for i in range(d):
        u[:, i * n] = iso[:, i]
        for k in range(1, n):
            u[:, i * n + k] = next(free)
    return u


def naimark_dilation(povm: Povm) -> IndirectModel:
    """Canonical dilation of a POVM: pure apparatus |0>, meter diag(outcomes)."""
    n = len(povm.outcomes)
    u = dilation_unitary(povm.effects)
    rho_a = np.zeros((n, n), dtype=complex)
    rho_a[0, 0] = 1.0
    return IndirectModel(povm.dim, rho_a, u, np.diag(np.asarray(povm.outcomes, dtype=complex)))


def joint_from_povm(effects, labels_a, labels_b) -> JointObservables:
    """Joint observables realizing a joint POVM {G_k} with outcome labels (alpha_k, beta_k)."""
    n = len(effects)
    if len(labels_a) != n or len(labels_b) != n:
        raise InvalidArgumentError("one (alpha, beta) label pair per effect is required")
    u = dilation_unitary(effects)
    d = np.asarray(effects[0]).shape[0]
    rho_a = np.zeros((n, n), dtype=complex)
    rho_a[0, 0] = 1.0
    uh = u.conj().T
    obs_a = uh @ np.kron(np.eye(d), np.diag(np.asarray(labels_a, dtype=complex))) @ u
    obs_b = uh @ np.kron(np.eye(d), np.diag(np.asarray(labels_b, dtype=complex))) @ u
    return JointObservables(d, _herm(obs_a), _herm(obs_b), rho_a, commutator_tol=1e-8)


def unbiased_joint_model(a, b) -> JointObservables:
    """Joint measurement unbiased for both A and B.

    A fair coin selects a projective measurement of A or of B; the
    unmeasured side reports a uniformly random eigenvalue. Outcome labels
    are rescaled (2 a_j - mean(a)) so that bar(A-side) = A and
    bar(B-side) = B exactly.
    """
    sa = ops.spectral_decompose(a)
    sb = ops.spectral_decompose(b)
    na, nb = len(sa), len(sb)
    mean_a = float(np.mean(sa.eigenvalues))
    mean_b = float(np.mean(sb.eigenvalues))
    effects, la, lb = [], [], []
    for aj, p in zip(sa.eigenvalues, sa.projectors):
        for bk, q in zip(sb.eigenvalues, sb.projectors):
            effects.append(0.5 * (p / nb + q / na))
            la.append(2 * aj - mean_a)
            lb.append(2 * bk - mean_b)
    return joint_from_povm(effects, la, lb)
