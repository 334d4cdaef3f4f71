"""Dense complex linear algebra and state primitives.

States are plain numpy arrays: a 1-D complex vector is a pure state, a
square 2-D complex array is a density matrix. Everything here is a pure
function of its inputs.
"""
from __future__ import annotations

from functools import reduce
from typing import Sequence

import numpy as np

# construction checks / physics invariants
CONSTRUCTION_TOL = 1e-12
PHYSICS_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
PAULIS = (I2, SX, SY, SZ)


class DimensionError(ValueError):
    """Operands have incompatible shapes."""


class StateError(ValueError):
    """A state or operator fails its validity invariants."""


def _square(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    return m


def tensor(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product of any number of matrices or vectors."""
    if not ops:
        raise DimensionError("tensor() needs at least one operand")
    return reduce(np.kron, (np.asarray(o, dtype=complex) for o in ops))


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conjugate(np.asarray(m)).T


def is_unitary(m: np.ndarray, tol: float = CONSTRUCTION_TOL) -> bool:
    m = _square(m)
    return bool(np.max(np.abs(dagger(m) @ m - np.eye(m.shape[0]))) <= tol)


def is_hermitian(m: np.ndarray, tol: float = PHYSICS_TOL) -> bool:
    m = _square(m)
    return bool(np.max(np.abs(m - dagger(m))) <= tol)


def is_density_matrix(rho: np.ndarray, tol: float = PHYSICS_TOL) -> bool:
    """Hermitian, unit trace and positive semidefinite within ``tol``."""
    rho = _square(rho)
    if not np.all(np.isfinite(rho)) or not is_hermitian(rho, tol):
        return False
    if abs(np.trace(rho) - 1) > tol:
        return False
    return bool(np.min(np.linalg.eigvalsh((rho + dagger(rho)) / 2)) >= -tol)


def normalize(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise StateError("cannot normalize the zero vector")
    return psi / norm


def as_state(amplitudes: Sequence[complex] | np.ndarray, tol: float = PHYSICS_TOL) -> np.ndarray:
    """Validate a pure-state vector (finite, unit norm within ``tol``)."""
    psi = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(psi)):
        raise StateError("state has non-finite amplitudes")
    norm2 = float(np.vdot(psi, psi).real)
    if abs(norm2 - 1) > tol:
        raise StateError(f"state is not normalized: sum |a|^2 = {norm2:.12g}")
    return psi


def density(state: np.ndarray) -> np.ndarray:
    """Density matrix of a pure state vector; density matrices pass through."""
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        return np.outer(state, state.conj())
    return _square(state)


def expectation(rho: np.ndarray, op: np.ndarray) -> float:
    return float(np.real(np.trace(density(rho) @ op)))


def state_fidelity(rho: np.ndarray, target: np.ndarray) -> float:
    """Overlap <target|rho|target> of a state with a pure target, clamped to [0, 1]."""
    target = np.asarray(target, dtype=complex).reshape(-1)
    rho = density(rho)
    if rho.shape[0] != target.shape[0]:
        raise DimensionError(f"state dim {rho.shape[0]} != target dim {target.shape[0]}")
    value = np.vdot(target, rho @ target)
    return float(np.clip(value.real, 0.0, 1.0))


def uhlmann_fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """(tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, computed as the squared nuclear norm of sqrt(rho) sqrt(sigma).

    State vectors are handled exactly; for rank-deficient matrices the
    matrix square roots limit the accuracy to about 1e-8.
    """
    if np.ndim(sigma) == 1:
        return state_fidelity(rho, sigma)
    if np.ndim(rho) == 1:
        return state_fidelity(sigma, rho)
    rho, sigma = density(rho), density(sigma)
    if rho.shape != sigma.shape:
        raise DimensionError(f"{rho.shape} vs {sigma.shape}")
    nuclear = np.linalg.svd(_psd_sqrt(rho) @ _psd_sqrt(sigma), compute_uv=False).sum()
    return float(np.clip(nuclear**2, 0.0, 1.0))


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh((m + dagger(m)) / 2)
    return (v * np.sqrt(np.clip(w, 0, None))) @ dagger(v)


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    diff = density(rho) - density(sigma)
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh((diff + dagger(diff)) / 2))))


def process_fidelity(u: np.ndarray, v: np.ndarray, tol: float = PHYSICS_TOL) -> float:
    """|tr(u^dag v)|^2 / d^2 between two unitaries; 1 iff equal up to global phase."""
    u, v = _square(u), _square(v)
    if u.shape != v.shape:
        raise DimensionError(f"{u.shape} vs {v.shape}")
    if not (is_unitary(u, tol) and is_unitary(v, tol)):
        raise StateError("process_fidelity needs unitary operands")
    d = u.shape[0]
    return float(min(abs(np.trace(dagger(u) @ v)) ** 2 / d**2, 1.0))


def global_phase(u: np.ndarray, v: np.ndarray) -> float:
    """Angle gamma maximizing Re tr(u^dag e^{-i gamma} v), i.e. arg tr(u^dag v)."""
    return float(np.angle(np.trace(dagger(_square(u)) @ _square(v))))


def partial_trace(rho: np.ndarray, keep: Sequence[int], dims: Sequence[int]) -> np.ndarray:
    """Reduced density matrix on the subsystems listed in ``keep``.

    ``dims`` lists subsystem dimensions in tensor order. The kept subsystems
    stay in their original relative order.
    """
    rho = density(rho)
    dims = [int(d) for d in dims]
    if int(np.prod(dims)) != rho.shape[0]:
        raise DimensionError(f"prod(dims)={int(np.prod(dims))} != {rho.shape[0]}")
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise DimensionError(f"keep indices {keep} out of range for {len(dims)} subsystems")
    n = len(dims)
    t = rho.reshape(dims + dims)
    # contract traced subsystems pairwise
    for axis in sorted(set(range(n)) - set(keep), reverse=True):
        t = np.trace(t, axis1=axis, axis2=axis + t.ndim // 2)
    d_keep = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(d_keep, d_keep)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary from the QR decomposition of a complex Ginibre matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_state(d: int, rng: np.random.Generator) -> np.ndarray:
    return normalize(rng.standard_normal(d) + 1j * rng.standard_normal(d))


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ dagger(g)
    return rho / np.trace(rho).real


def basis_state(index: int, dim: int) -> np.ndarray:
    psi = np.zeros(dim, dtype=complex)
    psi[index] = 1.0
    return psi


def mean_std(values: Sequence[float]) -> tuple[float, float]:
    """Sample mean and (ddof=1) standard deviation."""
    arr = np.asarray(values, dtype=float)
    std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return float(arr.mean()), std
