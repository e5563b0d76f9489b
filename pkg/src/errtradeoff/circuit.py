"""Controlled-SWAP readout circuit for fuzziness, total error and the commutator bound.

The system (state rho) and a reference copy (maximally mixed) are coupled by
a swap controlled on an auxiliary qubit prepared in |+>. Afterwards the joint
measurement is applied to the system and to the reference (or an ideal
measurement of A or B to the reference) and the qubit is read out in the X
or Y basis. Estimators are averages of products of the recorded outcomes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import operators as ops
from .analysis import RADICAND_TOL
from .exceptions import InvalidArgumentError, NumericalConsistencyError
from .models import JointObservables

PROB_TOL = 1e-10
FINAL_STATE_TOL = 1e-12


class ReferenceMode(enum.Enum):
    JOINT = "joint"
    IDEAL_A = "ideal_a"
    IDEAL_B = "ideal_b"


class Basis(enum.Enum):
    X = "x"
    Y = "y"


class Variant(enum.Enum):
    CONTROLLED_SWAP = "cswap"
    SINGLET_PROJECTION = "singlet"


PLUS = ops.projector([1, 1])
KET0 = ops.projector([1, 0])
KET1 = ops.projector([0, 1])
# qubit readout projectors keyed by outcome +1 / -1
QUBIT_PROJECTORS = {
    Basis.X: {1: ops.projector([1, 1]), -1: ops.projector([1, -1])},
    Basis.Y: {1: ops.projector([1, 1j]), -1: ops.projector([1, -1j])},
}


@dataclass(frozen=True)
class CircuitConfig:
    rho: np.ndarray
    joint: JointObservables
    reference_mode: ReferenceMode = ReferenceMode.JOINT
    basis: Basis = Basis.X
    variant: Variant = Variant.CONTROLLED_SWAP
    target_a: np.ndarray | None = None
    target_b: np.ndarray | None = None

    def __post_init__(self):
        rho = ops.require_density(self.rho)
        if rho.shape[0] != self.joint.system_dim:
            raise InvalidArgumentError("state and joint measurement act on different system dimensions")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "reference_mode", ReferenceMode(self.reference_mode))
        object.__setattr__(self, "basis", Basis(self.basis))
        object.__setattr__(self, "variant", Variant(self.variant))
        if self.variant is Variant.SINGLET_PROJECTION and self.dim != 2:
            raise InvalidArgumentError("the singlet-projection variant needs a qubit system (d = 2)")
        if self.variant is Variant.SINGLET_PROJECTION and self.basis is not Basis.X:
            raise InvalidArgumentError("the singlet-projection variant replaces the X readout only")
        if self.reference_mode is ReferenceMode.IDEAL_A and self.target_a is None:
            raise InvalidArgumentError("IDEAL_A reference mode needs target_a")
        if self.reference_mode is ReferenceMode.IDEAL_B and self.target_b is None:
            raise InvalidArgumentError("IDEAL_B reference mode needs target_b")

    @property
    def dim(self) -> int:
        return self.joint.system_dim

    def replace(self, **changes) -> "CircuitConfig":
        kw = {f: getattr(self, f) for f in ("rho", "joint", "reference_mode", "basis", "variant", "target_a", "target_b")}
        kw.update(changes)
        return CircuitConfig(**kw)


@dataclass(frozen=True)
class OutcomeDistribution:
    """Finite joint distribution: one row of outcome values per support point."""

    names: tuple
    outcomes: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        if self.outcomes.shape != (len(self.probs), len(self.names)):
            raise InvalidArgumentError("outcome table shape does not match names/probabilities")
        if len(self.probs) and self.probs.min() < -1e-12:
            raise NumericalConsistencyError(f"negative probability {self.probs.min():.3e}")
        if abs(self.probs.sum() - 1.0) > PROB_TOL:
            raise NumericalConsistencyError(f"probabilities sum to {self.probs.sum()!r}")

    def column(self, name) -> np.ndarray:
        return self.outcomes[:, self.names.index(name)]

    def columns(self) -> dict:
        return {n: self.outcomes[:, i] for i, n in enumerate(self.names)}

    def mean(self, values) -> float:
        return float(np.dot(self.probs, values))

    def marginal(self, names) -> "OutcomeDistribution":
        idx = [self.names.index(n) for n in names]
        keys, inv = np.unique(self.outcomes[:, idx], axis=0, return_inverse=True)
        p = np.bincount(inv.reshape(-1), weights=self.probs, minlength=len(keys))
        return OutcomeDistribution(tuple(names), keys, p)


def build_initial_state(rho, d: int | None = None) -> np.ndarray:
    """rho (x) 1/d (x) |+><+| on system (x) reference (x) qubit."""
    rho = ops.require_density(rho)
    d = rho.shape[0] if d is None else d
    if rho.shape[0] != d:
        raise InvalidArgumentError(f"state has dimension {rho.shape[0]}, expected {d}")
    return ops.tensor(rho, np.eye(d) / d, PLUS)


def controlled_swap(d: int) -> np.ndarray:
    s = ops.swap_operator(d)
    return ops.tensor(np.eye(d * d), KET0) + ops.tensor(s, KET1)


def final_state_closed_form(rho) -> np.ndarray:
    """[rho(x)1(x)|0><0| + 1(x)rho(x)|1><1| + (rho(x)1)S(x)|0><1| + S(rho(x)1)(x)|1><0|] / 2d."""
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    eye = np.eye(d)
    s = ops.swap_operator(d)
    r1 = np.kron(rho, eye)
    k01 = np.array([[0, 1], [0, 0]], dtype=complex)
    return (
        np.kron(r1, KET0) + np.kron(np.kron(eye, rho), KET1) + np.kron(r1 @ s, k01) + np.kron(s @ r1, k01.conj().T)
    ) / (2 * d)


def final_state(cfg_or_rho) -> np.ndarray:
    """U_cs rho_i U_cs^dagger, cross-checked against the closed form."""
    rho = cfg_or_rho.rho if isinstance(cfg_or_rho, CircuitConfig) else ops.require_density(cfg_or_rho)
    d = rho.shape[0]
    u = controlled_swap(d)
    rho_f = u @ build_initial_state(rho) @ u.conj().T
    resid = ops.maxnorm(rho_f - final_state_closed_form(rho))
    if resid > FINAL_STATE_TOL:
        raise NumericalConsistencyError(f"closed-form final state mismatch {resid:.3e}")
    return rho_f


def _reference_effects(cfg: CircuitConfig):
    """(label names, label rows, effects) for the measurement on the reference copy."""
    if cfg.reference_mode is ReferenceMode.JOINT:
        labels, effects = cfg.joint.joint_effects()
        return ("alpha_ref", "beta_ref"), labels, effects
    if cfg.reference_mode is ReferenceMode.IDEAL_A:
        spec = ops.spectral_decompose(cfg.target_a)
        return ("a",), [(v,) for v in spec.eigenvalues], list(spec.projectors)
    spec = ops.spectral_decompose(cfg.target_b)
    return ("b",), [(v,) for v in spec.eigenvalues], list(spec.projectors)


def _table(cfg: CircuitConfig, blocks: dict) -> OutcomeDistribution:
    """Tabulate tr[(M (x) M') R_x] for each qubit outcome x, R_x given in ``blocks``."""
    d = cfg.dim
    sys_labels, sys_eff = cfg.joint.joint_effects()
    ref_names, ref_labels, ref_eff = _reference_effects(cfg)
    m = np.stack(sys_eff)
    mr = np.stack(ref_eff)
    qubit = "x" if cfg.basis is Basis.X else "y"
    names = ("alpha", "beta") + ref_names + (qubit,)
    rows, probs = [], []
    for x in (1, -1):
        r = blocks[x].reshape(d, d, d, d)
        # p[s, t] = sum M_s[j,i] M'_t[l,k] R[(i,k),(j,l)]
        p = np.einsum("sji,tlk,ikjl->st", m, mr, r, optimize=True)
        if ops.maxnorm(p.imag) > PROB_TOL:
            raise NumericalConsistencyError(f"complex outcome probabilities ({ops.maxnorm(p.imag):.3e})")
        for si, sl in enumerate(sys_labels):
            for ti, tl in enumerate(ref_labels):
                rows.append(tuple(sl) + tuple(tl) + (x,))
                probs.append(p[si, ti].real)
    probs = np.array(probs)
    if probs.min() < -PROB_TOL:
        raise NumericalConsistencyError(f"negative outcome probability {probs.min():.3e}")
    probs = np.clip(probs, 0.0, None)
    return OutcomeDistribution(names, np.array(rows, dtype=float), probs)


def _qubit_blocks(rho_f: np.ndarray, d: int, basis: Basis) -> dict:
    """tr_qubit[(1 (x) |x><x|) rho_f] for x = +1, -1."""
    t = rho_f.reshape(d * d, 2, d * d, 2)
    return {x: np.einsum("iajb,ba->ij", t, proj) for x, proj in QUBIT_PROJECTORS[basis].items()}


def joint_distribution(cfg: CircuitConfig) -> OutcomeDistribution:
    if cfg.variant is Variant.SINGLET_PROJECTION:
        return singlet_variant_distribution(cfg)
    d = cfg.dim
    return _table(cfg, _qubit_blocks(final_state(cfg), d, cfg.basis))


def singlet_variant_distribution(cfg: CircuitConfig) -> OutcomeDistribution:
    """Antisymmetric-projection measurement on rho (x) 1/d instead of the controlled swap.

    x = -1 when the antisymmetric projector fires, +1 otherwise; the
    joint measurements then act on the post-measurement state.
    """
    if cfg.dim != 2:
        raise InvalidArgumentError("the singlet-projection variant needs d = 2")
    d = cfg.dim
    s = ops.swap_operator(d)
    p_as = (np.eye(d * d) - s) / 2
    sigma = np.kron(cfg.rho, np.eye(d) / d)
    blocks = {-1: p_as @ sigma @ p_as, 1: (np.eye(d * d) - p_as) @ sigma @ (np.eye(d * d) - p_as)}
    return _table(cfg, blocks)


def singlet_projector() -> np.ndarray:
    return ops.projector([0, 1, -1, 0])


# per-shot statistics whose means give the estimator radicands, keyed by name
def _statistics(cfg: CircuitConfig, cols: dict) -> dict:
    d = cfg.dim
    mode, basis = cfg.reference_mode, cfg.basis
    if mode is ReferenceMode.JOINT and basis is Basis.X:
        al, be, x = cols["alpha"], cols["beta"], cols["x"]
        return {
            "fuzz_a_sq": d * al * (al - cols["alpha_ref"]) * x,
            "fuzz_b_sq": d * be * (be - cols["beta_ref"]) * x,
        }
    if mode is ReferenceMode.JOINT and basis is Basis.Y:
        return {"commutator": d * cols["alpha"] * cols["beta_ref"] * cols["y"]}
    if mode is ReferenceMode.IDEAL_A and basis is Basis.X:
        return {"error_a_sq": d * (cols["alpha"] - cols["a"]) ** 2 * cols["x"]}
    if mode is ReferenceMode.IDEAL_B and basis is Basis.X:
        return {"disturbance_b_sq": d * (cols["beta"] - cols["b"]) ** 2 * cols["x"]}
    raise InvalidArgumentError(f"no estimator for reference mode {mode.value} with {basis.value} readout")


def exact_statistics(cfg: CircuitConfig, dist: OutcomeDistribution | None = None) -> dict:
    dist = joint_distribution(cfg) if dist is None else dist
    return {k: dist.mean(v) for k, v in _statistics(cfg, dist.columns()).items()}


def exact_roots(cfg: CircuitConfig, dist: OutcomeDistribution | None = None) -> dict:
    """Square roots of the exact statistics, with round-off below E|v| snapped to zero."""
    dist = joint_distribution(cfg) if dist is None else dist
    return {
        k: ops.clipped_sqrt(dist.mean(v), k, RADICAND_TOL, dist.mean(np.abs(v)))
        for k, v in _statistics(cfg, dist.columns()).items()
    }


def estimate_fuzziness_exact(cfg: CircuitConfig) -> tuple[float, float]:
    """(fuzziness of A-side, fuzziness of B-side) as sqrt(d E[alpha (alpha - alpha') x])."""
    if cfg.reference_mode is not ReferenceMode.JOINT or cfg.basis is not Basis.X:
        raise InvalidArgumentError("fuzziness needs the JOINT reference mode and X readout")
    roots = exact_roots(cfg)
    return roots["fuzz_a_sq"], roots["fuzz_b_sq"]


def estimate_error_disturbance_exact(cfg: CircuitConfig) -> float:
    """Total error (IDEAL_A) or disturbance (IDEAL_B) as sqrt(d E[(alpha - a)^2 x])."""
    if cfg.basis is not Basis.X:
        raise InvalidArgumentError("total error needs X readout")
    if cfg.reference_mode is ReferenceMode.IDEAL_A:
        return exact_roots(cfg)["error_a_sq"]
    if cfg.reference_mode is ReferenceMode.IDEAL_B:
        return exact_roots(cfg)["disturbance_b_sq"]
    raise InvalidArgumentError("total error needs the IDEAL_A or IDEAL_B reference mode")


def estimate_commutator_bound_exact(cfg: CircuitConfig) -> float:
    """d |E[alpha beta' y]| = |<[bar A, bar B]>| / 2."""
    if cfg.reference_mode is not ReferenceMode.JOINT or cfg.basis is not Basis.Y:
        raise InvalidArgumentError("the commutator bound needs the JOINT reference mode and Y readout")
    return abs(exact_statistics(cfg)["commutator"])


@dataclass(frozen=True)
class SampleEstimate:
    value: float
    std_error: float
    shots: int
    seed: int

    @property
    def defined(self) -> bool:
        return bool(np.isfinite(self.std_error))


def draw(dist: OutcomeDistribution, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Support indices drawn by inverse CDF."""
    cdf = np.cumsum(dist.probs)
    cdf /= cdf[-1]
    idx = np.searchsorted(cdf, rng.random(shots), side="right")
    return np.minimum(idx, len(cdf) - 1)


def sample(cfg: CircuitConfig, shots: int, seed: int, dist: OutcomeDistribution | None = None) -> dict:
    """Monte Carlo estimates of the per-shot statistics of ``cfg``.

    Each estimate is the sample mean with standard error s/sqrt(shots);
    the error is NaN for a single shot.
    """
    if shots < 1:
        raise InvalidArgumentError("shots must be at least 1")
    dist = joint_distribution(cfg) if dist is None else dist
    counts = np.bincount(draw(dist, shots, np.random.default_rng(seed)), minlength=len(dist.probs))
    out = {}
    for name, v in _statistics(cfg, dist.columns()).items():
        mean = float(np.dot(counts, v)) / shots
        if shots > 1:
            var = float(np.dot(counts, (v - mean) ** 2)) / (shots - 1)
            se = float(np.sqrt(var / shots))
        else:
            se = float("nan")
        out[name] = SampleEstimate(mean, se, shots, seed)
    return out


@dataclass(frozen=True)
class CircuitSuite:
    """The four circuit runs that read out every quantity of a scenario."""

    fuzziness: CircuitConfig
    error: CircuitConfig
    disturbance: CircuitConfig
    commutator: CircuitConfig
    runs: dict = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "runs", {
            "fuzziness": self.fuzziness,
            "error": self.error,
            "disturbance": self.disturbance,
            "commutator": self.commutator,
        })

    @classmethod
    def for_scenario(cls, rho, joint, a, b, variant=Variant.CONTROLLED_SWAP) -> "CircuitSuite":
        base = CircuitConfig(rho, joint, target_a=a, target_b=b, variant=variant)
        cswap = base.replace(variant=Variant.CONTROLLED_SWAP)
        return cls(
            fuzziness=base,
            error=base.replace(reference_mode=ReferenceMode.IDEAL_A),
            disturbance=base.replace(reference_mode=ReferenceMode.IDEAL_B),
            # the Y readout has no singlet counterpart
            commutator=cswap.replace(basis=Basis.Y),
        )

    def exact(self) -> dict:
        st = {}
        for cfg in self.runs.values():
            st.update(exact_statistics(cfg))
        return st

    def sample(self, shots: int, seed: int) -> dict:
        """Sample every run; the runs use independent streams spawned from ``seed``."""
        children = np.random.SeedSequence(seed).spawn(len(self.runs))
        est = {}
        for child, cfg in zip(children, self.runs.values()):
            rng_seed = int(child.generate_state(1, dtype=np.uint64)[0])
            for k, v in sample(cfg, shots, rng_seed).items():
                est[k] = SampleEstimate(v.value, v.std_error, shots, seed)
        return est
