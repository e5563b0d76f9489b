"""Dense operator algebra on small Hilbert spaces.

Operators and density matrices are plain complex ``numpy`` arrays. The
helpers here validate them, build tensor products in lexicographic basis
order (first factor most significant), take partial traces and spectral
decompositions, and generate seeded random ensembles for property tests.

All tolerances are max-absolute-entry norms.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .exceptions import InvalidArgumentError, NumericalConsistencyError

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-10
DEGENERACY_TOL = 1e-8

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)

PAULIS = {"I": I2, "X": X, "Y": Y, "Z": Z}


def maxnorm(o) -> float:
    """Largest absolute entry."""
    o = np.asarray(o)
    return float(np.max(np.abs(o))) if o.size else 0.0


def x_phi(phi: float) -> np.ndarray:
    """cos(phi) X + sin(phi) Y."""
    return np.cos(phi) * X + np.sin(phi) * Y


def ket(vec) -> np.ndarray:
    v = np.asarray(vec, dtype=complex).reshape(-1)
    return v / np.linalg.norm(v)


def projector(vec) -> np.ndarray:
    v = ket(vec)
    return np.outer(v, v.conj())


def as_operator(o, name: str = "operator") -> np.ndarray:
    a = np.asarray(o, dtype=complex)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise InvalidArgumentError(f"{name} must be a non-empty square matrix, got shape {a.shape}")
    return a


def is_hermitian(o, tol: float = HERMITIAN_TOL) -> bool:
    o = np.asarray(o)
    return maxnorm(o - o.conj().T) <= tol


def require_hermitian(o, name: str = "operator", tol: float = HERMITIAN_TOL) -> np.ndarray:
    a = as_operator(o, name)
    resid = maxnorm(a - a.conj().T)
    if resid > tol:
        raise InvalidArgumentError(f"{name} is not Hermitian (residual {resid:.3e})")
    return a


def require_density(rho, name: str = "state") -> np.ndarray:
    """Validate a density matrix: Hermitian, unit trace, positive semidefinite."""
    a = require_hermitian(rho, name)
    tr_resid = abs(np.trace(a) - 1.0)
    if tr_resid > TRACE_TOL:
        raise InvalidArgumentError(f"{name} does not have unit trace (trace residual {tr_resid:.3e})")
    lmin = float(np.linalg.eigvalsh(0.5 * (a + a.conj().T))[0])
    if lmin < -POSITIVITY_TOL:
        raise InvalidArgumentError(f"{name} is not positive semidefinite (min eigenvalue {lmin:.3e})")
    return a


def require_unitary(u, name: str = "unitary", tol: float = 1e-10) -> np.ndarray:
    a = as_operator(u, name)
    resid = maxnorm(a @ a.conj().T - np.eye(a.shape[0]))
    if resid > tol:
        raise InvalidArgumentError(f"{name} is not unitary (residual {resid:.3e})")
    return a


def tensor(*ops) -> np.ndarray:
    """Kronecker product, first factor most significant."""
    if not ops:
        raise InvalidArgumentError("tensor needs at least one factor")
    return reduce(np.kron, (np.asarray(o, dtype=complex) for o in ops))


def partial_trace(o, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out every factor not listed in ``keep`` (zero-based indices).

    The kept factors stay in their original order.
    """
    o = as_operator(o)
    dims = [int(d) for d in dims]
    if any(d < 1 for d in dims) or int(np.prod(dims)) != o.shape[0]:
        raise InvalidArgumentError(f"dims {dims} do not match operator dimension {o.shape[0]}")
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise InvalidArgumentError(f"keep indices {keep} out of range for {len(dims)} factors")
    n = len(dims)
    t = o.reshape(dims + dims)
    # trace out from the highest index down so the remaining axis numbers stay valid
    for i in reversed(range(n)):
        if i in keep:
            continue
        m = t.ndim // 2
        t = np.trace(t, axis1=i, axis2=i + m)
    d_keep = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(d_keep, d_keep)


def expectation(o, rho) -> float:
    """Real expectation value tr(o rho)."""
    o = as_operator(o)
    rho = as_operator(rho, "state")
    if o.shape != rho.shape:
        raise InvalidArgumentError(f"operator shape {o.shape} does not match state shape {rho.shape}")
    val = np.trace(o @ rho)
    if abs(val.imag) > 1e-10:
        raise NumericalConsistencyError(f"expectation has imaginary part {val.imag:.3e}")
    return float(val.real)


def cexpectation(o, rho) -> complex:
    """tr(o rho) without discarding the imaginary part (for commutators)."""
    return complex(np.trace(np.asarray(o) @ np.asarray(rho)))


def variance(o, rho) -> float:
    return expectation(o @ o, rho) - expectation(o, rho) ** 2


def std(o, rho, tol: float = 1e-10) -> float:
    """Standard deviation sqrt(<o^2> - <o>^2), clipping tiny negative round-off."""
    second = expectation(o @ o, rho)
    return clipped_sqrt(second - expectation(o, rho) ** 2, "variance", tol, scale=2 * second)


ROUNDOFF_FACTOR = 64


def clipped_sqrt(x: float, what: str = "radicand", tol: float = 1e-10, scale: float = 0.0) -> float:
    """sqrt(x) for a radicand that is non-negative analytically.

    Values within ``-tol`` are clipped to zero, and values whose magnitude
    is below the round-off floor of the cancelled terms (``scale`` is the
    sum of their magnitudes) are treated as exact zeros.
    """
    if x < -tol:
        raise NumericalConsistencyError(f"negative {what} {x:.3e}")
    if abs(x) <= ROUNDOFF_FACTOR * np.finfo(float).eps * scale:
        return 0.0
    return float(np.sqrt(max(x, 0.0)))


def _check_pair(a, b):
    a = as_operator(a)
    b = as_operator(b)
    if a.shape != b.shape:
        raise InvalidArgumentError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a, b


def commutator(a, b) -> np.ndarray:
    a, b = _check_pair(a, b)
    return a @ b - b @ a


def anticommutator(a, b) -> np.ndarray:
    a, b = _check_pair(a, b)
    return a @ b + b @ a


@dataclass(frozen=True)
class SpectralDecomposition:
    """Distinct eigenvalues in increasing order with their eigenprojectors."""

    eigenvalues: tuple
    projectors: tuple

    def __len__(self):
        return len(self.eigenvalues)

    def reconstruct(self) -> np.ndarray:
        return sum(lam * p for lam, p in zip(self.eigenvalues, self.projectors))


def spectral_decompose(o, degeneracy_tol: float = DEGENERACY_TOL) -> SpectralDecomposition:
    """Spectral decomposition with near-degenerate eigenvalues merged.

    Sorted eigenvalues are split into clusters wherever consecutive values
    differ by more than ``degeneracy_tol``. Each cluster becomes one
    eigenvalue (the cluster mean) with the summed projector.
    """
    o = require_hermitian(o, tol=1e-10)
    h = 0.5 * (o + o.conj().T)
    w, v = np.linalg.eigh(h)
    groups = [[0]]
    for i in range(1, len(w)):
        if w[i] - w[i - 1] > degeneracy_tol:
            groups.append([i])
        else:
            groups[-1].append(i)
    eigenvalues = []
    projectors = []
    for g in groups:
        vecs = v[:, g]
        eigenvalues.append(float(np.mean(w[g])))
        projectors.append(vecs @ vecs.conj().T)
    return SpectralDecomposition(tuple(eigenvalues), tuple(projectors))


def swap_operator(d: int) -> np.ndarray:
    """S on C^d (x) C^d with S(u (x) v) = v (x) u."""
    if d < 1:
        raise InvalidArgumentError("swap dimension must be positive")
    s = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            s[j * d + i, i * d + j] = 1.0
    return s


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _ginibre(d: int, rng: np.random.Generator, cols: int | None = None) -> np.ndarray:
    cols = d if cols is None else cols
    return (rng.standard_normal((d, cols)) + 1j * rng.standard_normal((d, cols))) / np.sqrt(2)


def random_hermitian(d: int, seed=None) -> np.ndarray:
    """GUE-distributed Hermitian matrix."""
    g = _ginibre(d, _rng(seed))
    return 0.5 * (g + g.conj().T)


def random_density(d: int, seed=None, rank: int | None = None) -> np.ndarray:
    """Random state g g^dagger / tr, full rank unless ``rank`` is given."""
    g = _ginibre(d, _rng(seed), rank)
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def random_unitary(d: int, seed=None) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix with phase correction."""
    q, r = np.linalg.qr(_ginibre(d, _rng(seed)))
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))
