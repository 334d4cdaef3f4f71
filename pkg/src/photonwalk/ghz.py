"""Two photons, two three-qubit modules: entangled source, GHZ assembly and witnesses.

Joint states are ordered (signal photon) x (idler photon), each photon
register-ordered as in :mod:`photonwalk.circuit`, so with four paths per
photon the six qubits read (pol_s, path_s MSB, path_s LSB, pol_i, path_i
MSB, path_i LSB).
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Sequence

import numpy as np

from . import optics
from .circuit import BS, HWP, Circuit, Phase, compile_circuit, fixture, load_circuit, path_label
from .measure import (
    CountTable,
    FringeTable,
    MeasurementSetting,
    NoiseModel,
    analysis_circuit,
    apply_noise,
    derive_rng,
    fit_fringe,
    outcome_labels,
    sample_counts,
)
from .qcore import DimensionError, dagger, density, partial_trace, state_fidelity

_S2 = 1 / np.sqrt(2)
BELL = {
    "psi+": np.array([0, 1, 1, 0], dtype=complex) * _S2,
    "psi-": np.array([0, 1, -1, 0], dtype=complex) * _S2,
    "phi+": np.array([1, 0, 0, 1], dtype=complex) * _S2,
    "phi-": np.array([1, 0, 0, -1], dtype=complex) * _S2,
}


@dataclass(frozen=True)
class SourceModel:
    bell_target: str = "psi+"
    visibility_hv: float = 1.0
    visibility_ad: float = 1.0
    pair_rate: float = 16400.0
    accidental_rate: float = 0.0

    def __post_init__(self):
        if self.bell_target not in BELL:
            raise ValueError(f"unknown Bell target {self.bell_target!r}; have {sorted(BELL)}")
        for name in ("visibility_hv", "visibility_ad"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")

    @classmethod
    def lab(cls) -> "SourceModel":
        return cls("psi+", 0.986, 0.981, 16400.0, 16.0)

    @classmethod
    def from_dict(cls, data: dict) -> "SourceModel":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown source fields: {sorted(unknown)}")
        return cls(**data)


@dataclass
class TwoPhotonState:
    """Joint state (vector or density matrix) of signal and idler photons on ``paths`` paths each."""

    state: np.ndarray
    paths: tuple[int, int] = (4, 4)

    def __post_init__(self):
        self.state = np.asarray(self.state, dtype=complex)
        self.paths = (int(self.paths[0]), int(self.paths[1]))
        if self.state.shape[0] != self.dim:
            raise DimensionError(f"state dim {self.state.shape[0]} != {self.dims[0]} x {self.dims[1]}")
        norm = np.vdot(self.state, self.state).real if self.state.ndim == 1 else np.trace(self.state).real
        if abs(norm - 1) > 1e-10:
            raise ValueError(f"two-photon state is not normalized ({norm})")

    @property
    def dims(self) -> tuple[int, int]:
        return 2 * self.paths[0], 2 * self.paths[1]

    @property
    def dim(self) -> int:
        return self.dims[0] * self.dims[1]

    @property
    def rho(self) -> np.ndarray:
        return density(self.state)

    def evolve(self, u_s: np.ndarray, u_i: np.ndarray) -> "TwoPhotonState":
        u = np.kron(u_s, u_i)
        out = u @ self.state if self.state.ndim == 1 else u @ self.state @ dagger(u)
        return TwoPhotonState(out, self.paths)

    def polarization(self) -> np.ndarray:
        """Reduced two-qubit polarization state (paths traced out)."""
        ms, mi = self.paths
        return partial_trace(self.rho, [0, 2], [2, ms, 2, mi])


def _pol_isometry(paths: tuple[int, int]) -> np.ndarray:
    """Maps |a>_pol_s |b>_pol_i onto |a, path 0>_s |b, path 0>_i."""
    ms, mi = paths
    v = np.zeros((4 * ms * mi, 4), dtype=complex)
    for a in (0, 1):
        for b in (0, 1):
            v[(a * ms) * (2 * mi) + b * mi, 2 * a + b] = 1.0
    return v


def dephased_bell(target: str, visibility_hv: float, visibility_ad: float) -> np.ndarray:
    """Two-qubit state with the target's populations set by the H/V visibility and its
    coherence set by the A/D visibility.

    Equivalent to p|B><B| + (1 - p) D with p = visibility_ad and D diagonal.
    """
    bell = BELL[target]
    support = np.abs(bell) > 0
    w_on, w_off = (1 + visibility_hv) / 4, (1 - visibility_hv) / 4
    if visibility_ad / 2 > w_on + 1e-15:
        raise ValueError(
            f"A/D visibility {visibility_ad} is not reachable with H/V visibility {visibility_hv}"
        )
    rho = np.diag(np.where(support, w_on, w_off)).astype(complex)
    i, j = np.flatnonzero(support)
    coherence = visibility_ad / 2 * np.sign((bell[i] * np.conj(bell[j])).real)
    rho[i, j] = rho[j, i] = coherence
    return rho


def spdc_state(src: SourceModel = SourceModel(), paths: tuple[int, int] = (4, 4)) -> TwoPhotonState:
    """Entangled pair from the source model, both photons entering path 0."""
    v = _pol_isometry(paths)
    if src.visibility_hv == 1 and src.visibility_ad == 1:
        return TwoPhotonState(v @ BELL[src.bell_target], paths)
    pol = dephased_bell(src.bell_target, src.visibility_hv, src.visibility_ad)
    return TwoPhotonState(v @ pol @ dagger(v), paths)


def signal_hwp(paths: tuple[int, int], angle: float = np.pi / 4) -> np.ndarray:
    """Wave plate on the signal polarization, identity elsewhere."""
    ms, mi = paths
    return np.kron(np.kron(optics.hwp(angle), np.eye(ms)), np.eye(2 * mi))


def convert_pair(pair: TwoPhotonState) -> TwoPhotonState:
    """HWP at 45 degrees in the signal arm: (|HV> + |VH>)/sqrt2 -> (|HH> + |VV>)/sqrt2."""
    u = signal_hwp(pair.paths)
    out = u @ pair.state if pair.state.ndim == 1 else u @ pair.state @ dagger(u)
    return TwoPhotonState(out, pair.paths)


def canonical_module() -> Circuit:
    """Two polarization-controlled C-NOTs: V photons are routed to path |11>, H stay in |00>."""
    return fixture("ghz_module")


def assemble_ghz(pair: TwoPhotonState, module_s: Circuit | None = None, module_i: Circuit | None = None) -> TwoPhotonState:
    """Send each photon of ``pair`` through its module (default: the canonical GHZ module)."""
    module_s = canonical_module() if module_s is None else module_s
    module_i = canonical_module() if module_i is None else module_i
    if (module_s.paths, module_i.paths) != pair.paths:
        raise DimensionError(f"modules have {module_s.paths}/{module_i.paths} paths, pair has {pair.paths}")
    return pair.evolve(compile_circuit(module_s), compile_circuit(module_i))


def ghz_state(n_qubits: int = 6) -> np.ndarray:
    d = 2**n_qubits
    psi = np.zeros(d, dtype=complex)
    psi[0] = psi[-1] = _S2
    return psi


def ghz_fidelity(state: TwoPhotonState) -> float:
    return state_fidelity(state.rho, ghz_state(int(np.log2(state.dim))))


# -- witnesses -----------------------------------------------------------

DEFAULT_ARMS = (("00", "00"), ("11", "11"))


def _path_index(label: str, paths: int) -> int:
    idx = int(label, 2)
    if not 0 <= idx < paths or path_label(idx, paths) != label:
        raise ValueError(f"path label {label!r} does not fit {paths} paths")
    return idx


def _coincidence_probability(rho: np.ndarray, u_s, u_i, port_s: int, port_i: int, d_i: int) -> float:
    u = np.kron(u_s, u_i)
    k = port_s * d_i + port_i
    row = u[k]
    return float(np.real(row @ rho @ row.conj()))


def _rates(probs: np.ndarray, noise: NoiseModel, rng, shots: bool) -> np.ndarray:
    if shots:
        return sample_counts(probs, noise, rng)
    return noise.mean_counts * noise.heralding_efficiency * probs + noise.accidental_rate * noise.window


def _h_witness(state: TwoPhotonState, arms, noise: NoiseModel, rng, shots: bool = True) -> dict:
    ms, mi = state.paths
    d_i = 2 * mi
    rho = state.rho
    (s0, i0), (s1, i1) = [(_path_index(a, ms), _path_index(b, mi)) for a, b in arms]
    # analyzers: H in the first arm pair, V in the second
    ports_s = {0: 0 * ms + s0, 1: 1 * ms + s1}
    ports_i = {0: 0 * mi + i0, 1: 1 * mi + i1}
    eye_s, eye_i = np.eye(2 * ms), np.eye(d_i)
    counts = {}
    for a in (0, 1):
        for b in (0, 1):
            p = _coincidence_probability(rho, eye_s, eye_i, ports_s[a], ports_i[b], d_i)
            c = _rates(np.array([p, max(1 - p, 0.0)]), noise, rng, shots)[0]
            counts[f"{a}{b}"] = int(c) if shots else float(c)
    matched = counts["00"] + counts["11"]
    crossed = counts["01"] + counts["10"]
    if matched + crossed == 0:
        raise ValueError("no coincidences in the selected arms")
    return {"visibility": (matched - crossed) / (matched + crossed), "counts": counts}


def _d_analysis(paths: int, low: int, high: int, phase: float) -> Circuit:
    """Recombine arms (low, high) on a beam splitter after a phase on ``high``, then rotate D onto H in both ports."""
    return Circuit(paths, (Phase(high, phase), BS((low, high)), HWP(low, np.pi / 8), HWP(high, np.pi / 8)))


def _d_witness(
    state: TwoPhotonState, arms, phases, noise: NoiseModel, seed: int, shots: bool = True, draws: int = 16
) -> dict:
    ms, mi = state.paths
    rho = state.rho
    (s0, i0), (s1, i1) = [(_path_index(a, ms), _path_index(b, mi)) for a, b in arms]
    draws = draws if noise.phase_jitter_sigma > 0 else 1
    counts, other = [], []
    for k, phi in enumerate(phases):
        rng = derive_rng(seed, 1000 + k)
        p = q = 0.0
        for _ in range(draws):
            c_s = apply_noise(_d_analysis(ms, s0, s1, phi), noise, rng)
            c_i = apply_noise(_d_analysis(mi, i0, i1, 0.0), noise, rng)
            u_s, u_i = compile_circuit(c_s), compile_circuit(c_i)
            p += _coincidence_probability(rho, u_s, u_i, s0, i0, 2 * mi) / draws
            q += _coincidence_probability(rho, u_s, u_i, s1, i0, 2 * mi) / draws
        sampled = _rates(np.array([p, q, max(1 - p - q, 0.0)]), noise, rng, shots)
        counts.append(sampled[0])
        other.append(sampled[1])
    fringe = FringeTable(np.asarray(phases, dtype=float), np.array(other), np.array(counts), seed)
    fit = fit_fringe(fringe.phases, fringe.port1)
    return {"visibility": fit.visibility, "fit": fit, "fringe": fringe}


def witness_visibility(
    state: TwoPhotonState,
    basis: str,
    arms: Sequence[Sequence[str]] = DEFAULT_ARMS,
    phases: Sequence[float] | None = None,
    noise: NoiseModel = NoiseModel(),
    seed: int = 0,
    detail: bool = False,
    shots: bool = True,
    jitter_draws: int = 16,
):
    """Coincidence-visibility witness between two (signal arm, idler arm) pairs.

    ``basis="H"``: polarizers set to H on the first arm pair and V on the
    second; the visibility is (matched - crossed)/(matched + crossed)
    coincidences. ``basis="D"``: in each module the two arms are recombined on
    a beam splitter after an analysis phase (scanned on the signal side over
    ``phases``), a D polarizer follows, and the fitted fringe visibility of
    the coincidences is returned. Phase elements of the analysis stage pick
    up the model's jitter: each scan point averages ``jitter_draws``
    independent draws, i.e. the phase wanders within one counting window.
    ``shots=False`` replaces Poisson samples by their expected values.
    """
    if len(arms) != 2:
        raise ValueError("need exactly two arm pairs")
    if basis == "H":
        out = _h_witness(state, arms, noise, derive_rng(seed, 0), shots)
    elif basis == "D":
        if phases is None or len(phases) == 0:
            raise ValueError("D-basis witness needs a non-empty phase grid")
        out = _d_witness(state, arms, phases, noise, seed, shots, jitter_draws)
    else:
        raise ValueError(f"basis must be 'H' or 'D', got {basis!r}")
    return out if detail else out["visibility"]


def coincidence_counts(
    state: TwoPhotonState,
    setting_s: MeasurementSetting,
    setting_i: MeasurementSetting,
    noise: NoiseModel = NoiseModel(),
    seed: int = 0,
) -> CountTable:
    """Joint outcome counts for one analysis setting per photon (outcome = signal bits + idler bits)."""
    ms, mi = state.paths
    u = np.kron(
        compile_circuit(analysis_circuit(setting_s, ms)),
        compile_circuit(analysis_circuit(setting_i, mi)),
    )
    rho = state.rho
    probs = np.clip(np.real(np.einsum("ij,jk,ik->i", u, rho, u.conj())), 0.0, None)
    probs = probs / probs.sum()
    rng = derive_rng(seed, 0)
    labels = [a + b for a in outcome_labels(setting_s.n_qubits) for b in outcome_labels(setting_i.n_qubits)]
    table = CountTable(seed, metadata={"mean_counts": noise.mean_counts})
    table.add(f"{setting_s.label},{setting_i.label}", labels, sample_counts(probs, noise, rng))
    return table


# -- experiment ----------------------------------------------------------


def phase_grid(spec) -> np.ndarray:
    """Phase list from a list of numbers or ``{"start", "stop", "points"}`` (inclusive stop)."""
    if isinstance(spec, dict):
        return np.linspace(float(spec.get("start", 0.0)), float(spec.get("stop", 2 * math.pi)), int(spec["points"]))
    return np.asarray(spec, dtype=float)


def _module(spec, base: Path | None) -> Circuit:
    if spec in (None, "canonical"):
        return canonical_module()
    path = Path(spec)
    if base is not None and not path.is_absolute():
        path = base / path
    return load_circuit(path)


def run_experiment(config: dict, base: Path | None = None, seed: int | None = None) -> dict:
    """Full GHZ pipeline from a config dict; returns a JSON-ready report.

    Config keys: ``source`` (SourceModel fields), ``modules`` (``signal`` /
    ``idler``: "canonical" or a circuit file path), ``noise`` (NoiseModel
    fields or a file path), ``phases``, ``seed``, ``arms`` and ``shots``
    (false: witnesses from expected rates, the infinite-statistics limit). The noisy modules
    are drawn from the seed; the witness scans use streams derived from it.
    """
    seed = int(config.get("seed", 0)) if seed is None else int(seed)
    source = SourceModel.from_dict(config.get("source", {}))
    noise_spec = config.get("noise", {})
    if isinstance(noise_spec, str):
        p = Path(noise_spec)
        noise = NoiseModel.load(p if p.is_absolute() or base is None else base / p)
    else:
        noise = NoiseModel.from_dict(noise_spec)
    modules = config.get("modules", {})
    mod_s, mod_i = _module(modules.get("signal"), base), _module(modules.get("idler"), base)
    phases = phase_grid(config.get("phases", {"start": 0.0, "stop": 2 * math.pi, "points": 25}))
    arms = tuple(tuple(a) for a in config.get("arms", DEFAULT_ARMS))

    pair = convert_pair(spdc_state(source, (mod_s.paths, mod_i.paths)))
    rng = derive_rng(seed, 7)
    noisy_s, noisy_i = apply_noise(mod_s, noise, rng), apply_noise(mod_i, noise, rng)
    state = assemble_ghz(pair, noisy_s, noisy_i)
    ideal = assemble_ghz(pair, mod_s, mod_i)

    shots = bool(config.get("shots", True))
    h = witness_visibility(state, "H", arms, phases, noise, seed, detail=True, shots=shots)
    d = witness_visibility(state, "D", arms, phases, noise, seed, detail=True, shots=shots)
    zzz = MeasurementSetting("Z" * (1 + (mod_s.paths.bit_length() - 1)))
    table = coincidence_counts(state, zzz, zzz, noise, seed)
    report = {
        "seed": seed,
        "ghz_fidelity": ghz_fidelity(state),
        "ghz_fidelity_ideal_modules": ghz_fidelity(ideal),
        "bell_fidelity": state_fidelity(pair.polarization(), BELL["phi+"]),
        "witness": {
            "H": {"visibility": h["visibility"], "counts": h["counts"]},
            "D": {
                "visibility": d["visibility"],
                "contrast": d["fit"].contrast,
                "phase_offset": d["fit"].phase_offset,
            },
        },
        "arms": [list(a) for a in arms],
        "reference": {"H": 0.983, "D": 0.951},
        "coincidences": table.to_dict(),
        "fringe_csv": {"D": d["fringe"].to_csv()},
        "source": asdict(source),
        "noise": noise.to_dict(),
    }
    return report


def load_config(path: str | Path) -> dict:
    return json.loads(Path(path).read_text())
