"""Quantum state tomography from simulated counts.

Two estimators: least-squares linear inversion (fast, may leave the
physical cone) and the iterative maximum-likelihood fixed point
rho <- N[R rho R], R = sum_i f_i / tr(P_i rho) P_i. When a full R-rho-R step
would lower the likelihood the step is diluted, (I + eps R) rho (I + eps R)
with eps halved until the likelihood rises, so the log-likelihood never
decreases.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit
from .measure import (
    CountTable,
    NoiseModel,
    all_settings,
    derive_rng,
    outcome_labels,
    simulate_count_table,
)
from .qcore import (
    PAULIS,
    DimensionError,
    dagger,
    mean_std,
    state_fidelity,
    tensor,
    trace_distance,
)

_EIGVECS = {
    "Z": (np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)),
    "X": (np.array([1, 1], dtype=complex) / np.sqrt(2), np.array([1, -1], dtype=complex) / np.sqrt(2)),
    "Y": (np.array([1, 1j], dtype=complex) / np.sqrt(2), np.array([1, -1j], dtype=complex) / np.sqrt(2)),
}


class TomographyError(ValueError):
    pass


@dataclass
class ProjectorSet:
    settings: list[str]
    outcomes: list[str]
    projectors: np.ndarray  # shape (K, d, d)
    complete: bool

    def __len__(self) -> int:
        return len(self.settings)

    @property
    def dim(self) -> int:
        return self.projectors.shape[1]

    def __iter__(self):
        return iter(zip(self.settings, self.outcomes, self.projectors))


def _design(projectors: np.ndarray) -> np.ndarray:
    """Real matrix A with A[i, k] = tr(P_i sigma_k) / d over the Pauli product basis."""
    d = projectors.shape[1]
    n = int(np.log2(d))
    basis = [tensor(*[PAULIS[(k // 4 ** (n - 1 - q)) % 4] for q in range(n)]) for k in range(4**n)]
    return np.real(np.einsum("kij,bji->kb", projectors, np.array(basis))) / d, basis


def standard_projectors(n_qubits: int) -> ProjectorSet:
    """Eigenprojectors of every {Z, X, Y}^n setting, two outcomes per qubit (6**n in total)."""
    if not 1 <= n_qubits <= 3:
        raise TomographyError(f"n_qubits must be 1, 2 or 3, got {n_qubits}")
    settings, outcomes, projs = [], [], []
    for s in all_settings(n_qubits):
        for o in outcome_labels(n_qubits):
            vec = tensor(*[_EIGVECS[b][int(bit)] for b, bit in zip(s.bases, o)])
            settings.append(s.label)
            outcomes.append(o)
            projs.append(np.outer(vec, vec.conj()))
    projs = np.array(projs)
    design, _ = _design(projs)
    complete = np.linalg.matrix_rank(design) == 4**n_qubits
    return ProjectorSet(settings, outcomes, projs, bool(complete))


def _frequencies(counts: CountTable, projectors: ProjectorSet) -> tuple[np.ndarray, np.ndarray]:
    """Raw counts and per-setting normalized frequencies aligned with ``projectors``."""
    raw = np.empty(len(projectors))
    for i, (s, o) in enumerate(zip(projectors.settings, projectors.outcomes)):
        try:
            raw[i] = counts.settings[s][o]
        except KeyError:
            raise TomographyError(f"count table has no entry for setting {s!r}, outcome {o!r}") from None
    freqs = np.empty_like(raw)
    for s in set(projectors.settings):
        idx = [i for i, t in enumerate(projectors.settings) if t == s]
        total = raw[idx].sum()
        freqs[idx] = raw[idx] / total if total > 0 else 0.0
    return raw, freqs


@dataclass
class TomographyResult:
    rho: np.ndarray
    method: str
    log_likelihood: float
    iterations: int = 0
    converged: bool = True
    positive: bool = True
    fidelity: tuple[float, float] | None = None
    likelihood_trace: list[float] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        out = {
            "method": self.method,
            "dim": int(self.rho.shape[0]),
            "rho": [[[float(z.real), float(z.imag)] for z in row] for row in self.rho],
            "log_likelihood": float(self.log_likelihood),
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
            "positive": bool(self.positive),
        }
        if self.fidelity is not None:
            out["fidelity"] = {"mean": float(self.fidelity[0]), "std": float(self.fidelity[1])}
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "TomographyResult":
        rho = np.array([[complex(re, im) for re, im in row] for row in data["rho"]])
        fid = data.get("fidelity")
        return cls(
            rho,
            data["method"],
            data["log_likelihood"],
            data.get("iterations", 0),
            data.get("converged", True),
            data.get("positive", True),
            None if fid is None else (fid["mean"], fid["std"]),
        )


def _log_likelihood(weights: np.ndarray, probs: np.ndarray) -> float:
    mask = weights > 0
    with np.errstate(divide="ignore"):
        return float(np.sum(weights[mask] * np.log(probs[mask])))


def _probs(projs: np.ndarray, rho: np.ndarray) -> np.ndarray:
    return np.clip(np.real(np.einsum("kij,ji->k", projs, rho)), 0.0, None)


def linear_inversion(counts: CountTable, projectors: ProjectorSet) -> TomographyResult:
    """Least-squares solution of tr(P_i rho) = f_i in the Pauli basis (Hermitian, unit trace)."""
    if not projectors.complete:
        raise TomographyError("projector set is not informationally complete")
    raw, freqs = _frequencies(counts, projectors)
    design, basis = _design(projectors.projectors)
    rhs = freqs - design[:, 0]
    coef, *_ = np.linalg.lstsq(design[:, 1:], rhs, rcond=None)
    d = projectors.dim
    rho = (basis[0] + np.einsum("b,bij->ij", coef, np.array(basis[1:]))) / d
    rho = (rho + dagger(rho)) / 2
    positive = bool(np.min(np.linalg.eigvalsh(rho)) >= -1e-12)
    ll = _log_likelihood(raw, _probs(projectors.projectors, rho)) if positive else float("nan")
    return TomographyResult(rho, "linear", ll, positive=positive)


def _psd_start(rho: np.ndarray, mix: float) -> np.ndarray:
    w, v = np.linalg.eigh((rho + dagger(rho)) / 2)
    w = np.clip(w, 0.0, None)
    rho = (v * w) @ dagger(v)
    rho = rho / np.trace(rho).real
    d = rho.shape[0]
    return (1 - mix) * rho + mix * np.eye(d) / d


def mle_reconstruct(
    counts: CountTable,
    projectors: ProjectorSet,
    max_iter: int = 10_000,
    tol: float = 1e-10,
    start: str = "linear",
) -> TomographyResult:
    """Maximum-likelihood density matrix by the diluted R-rho-R iteration.

    Stops when a step moves rho by less than ``tol`` in trace distance or
    after ``max_iter`` steps (``converged`` is then False). ``start`` is
    ``"linear"`` (PSD-projected linear inversion mixed with 1e-9 of I/d) or
    ``"mixed"`` (I/d).
    """
    raw, freqs = _frequencies(counts, projectors)
    if raw.sum() <= 0:
        raise TomographyError("all counts are zero")
    n_settings = len(set(projectors.settings))
    weights = freqs * raw.sum() / n_settings
    projs = projectors.projectors
    d = projectors.dim
    eye = np.eye(d)

    if start == "linear":
        rho = _psd_start(linear_inversion(counts, projectors).rho, 1e-9)
    elif start == "mixed":
        rho = eye / d
    else:
        raise ValueError(f"unknown start {start!r}")

    probs = _probs(projs, rho)
    ll = _log_likelihood(weights, probs)
    trace = [ll]
    converged = False
    it = 0
    total = weights.sum()
    for it in range(1, max_iter + 1):
        ratio = np.where(weights > 0, weights / np.maximum(probs, 1e-300), 0.0)
        r = np.einsum("k,kij->ij", ratio, projs) / total
        new = r @ rho @ r
        new = new / np.trace(new).real
        new_probs = _probs(projs, new)
        new_ll = _log_likelihood(weights, new_probs)
        eps = 1.0
        while new_ll < ll and eps > 1e-12:
            k = eye + eps * r
            new = k @ rho @ k
            new = new / np.trace(new).real
            new_probs = _probs(projs, new)
            new_ll = _log_likelihood(weights, new_probs)
            eps /= 2
        if new_ll < ll:
            # no ascent direction left at machine precision
            converged = True
            break
        new = (new + dagger(new)) / 2
        step = trace_distance(new, rho)
        rho, probs, ll = new, new_probs, new_ll
        trace.append(ll)
        if step < tol:
            converged = True
            break
    return TomographyResult(rho, "mle", ll, iterations=it, converged=converged, likelihood_trace=trace)


def reconstruct(counts: CountTable, projectors: ProjectorSet, method: str = "mle", **opts) -> TomographyResult:
    if method == "mle":
        return mle_reconstruct(counts, projectors, **opts)
    if method == "linear":
        return linear_inversion(counts, projectors)
    raise ValueError(f"unknown method {method!r}; use 'linear' or 'mle'")


def bootstrap_fidelity(
    counts: CountTable,
    projectors: ProjectorSet,
    target: np.ndarray,
    resamples: int = 100,
    seed: int = 0,
    method: str = "mle",
    **opts,
) -> tuple[float, float]:
    """Mean and standard deviation of the fidelity over Poisson-resampled count tables."""
    if resamples < 10:
        raise ValueError(f"need at least 10 resamples, got {resamples}")
    fids = []
    for r in range(resamples):
        rng = derive_rng(seed, r)
        fake = CountTable(counts.seed)
        for label, outcomes in counts.settings.items():
            keys = list(outcomes)
            fake.add(label, keys, rng.poisson([outcomes[k] for k in keys]))
        fids.append(state_fidelity(reconstruct(fake, projectors, method, **opts).rho, target))
    return mean_std(fids)


def gate_tomography(
    circuit: Circuit,
    input_state: np.ndarray,
    noise: NoiseModel = NoiseModel(),
    seed: int = 0,
    method: str = "mle",
    resamples: int = 0,
    target: np.ndarray | None = None,
) -> tuple[TomographyResult, CountTable]:
    """Simulate QST of ``circuit`` acting on ``input_state`` and score it against the ideal output.

    The target defaults to the noiseless circuit applied to the input. With
    ``resamples`` >= 10 the fidelity carries a bootstrap standard deviation,
    otherwise the standard deviation is reported as 0.
    """
    n = circuit.register.require_qubits()
    if n > 3:
        raise DimensionError("gate tomography supports registers of at most three qubits")
    target = circuit.compile() @ np.asarray(input_state, dtype=complex) if target is None else target
    counts = simulate_count_table(input_state, circuit, noise, seed)
    projectors = standard_projectors(n)
    result = reconstruct(counts, projectors, method)
    fid = state_fidelity(result.rho, target)
    if resamples:
        mean, std = bootstrap_fidelity(counts, projectors, target, resamples, seed, method)
        result.fidelity = (fid, std)
    else:
        result.fidelity = (fid, 0.0)
    return result, counts


def pauli_expectations(rho: np.ndarray) -> dict[str, float]:
    """<sigma> for every Pauli product label (e.g. 'ZX'), useful for inspecting reconstructions."""
    d = rho.shape[0]
    n = int(np.log2(d))
    out = {}
    letters = "IXYZ"
    for k in range(4**n):
        idx = [(k // 4 ** (n - 1 - q)) % 4 for q in range(n)]
        op = tensor(*[PAULIS[i] for i in idx])
        out["".join(letters[i] for i in idx)] = float(np.real(np.trace(rho @ op)))
    return out

