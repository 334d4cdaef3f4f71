"""Simulated photon counting.

Projective settings are realized the way an experiment does it: a basis
change made of wave plates (polarization) or phase + beam splitter stages
(path qubits) appended to the circuit, followed by detection of which
(polarization, path) port fired. Counts are Poisson draws on top of those
Born probabilities, with a flat accidental background.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .circuit import BS, HWP, PBS, QWP, Circuit, Phase, compile_circuit
from .qcore import SX, SZ, DimensionError, density, tensor

BASES = "ZXY"


def derive_rng(seed: int, *keys: int) -> np.random.Generator:
    """Independent generator for (seed, keys); used to give every setting its own stream."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *(int(k) for k in keys)]))


@dataclass(frozen=True)
class NoiseModel:
    """Imperfections of sources, optics and detection. Defaults describe an ideal setup."""

    bs_T: float = 0.5
    pbs_extinction: float = math.inf
    mzi_visibility: float = 1.0
    pol_visibility_hv: float = 1.0
    pol_visibility_ad: float = 1.0
    phase_jitter_sigma: float = 0.0
    accidental_rate: float = 0.0
    heralding_efficiency: float = 1.0
    mean_counts: float = 1e5
    window: float = 1.0

    def __post_init__(self):
        for name in ("mzi_visibility", "pol_visibility_hv", "pol_visibility_ad", "heralding_efficiency", "bs_T"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        for name in ("pbs_extinction", "phase_jitter_sigma", "accidental_rate", "mean_counts", "window"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative, got {getattr(self, name)}")
        if self.pbs_extinction == 0:
            raise ValueError("pbs_extinction must be positive")

    @classmethod
    def lab(cls) -> "NoiseModel":
        """Imperfections quoted for the tabletop setup (split ratio, PBS, MZI, source, accidentals)."""
        return cls(
            bs_T=0.52,
            pbs_extinction=1000.0,
            mzi_visibility=0.934,
            pol_visibility_hv=0.986,
            pol_visibility_ad=0.981,
            phase_jitter_sigma=0.1,
            accidental_rate=16.0,
            heralding_efficiency=0.223,
            mean_counts=1e5,
        )

    @property
    def is_ideal(self) -> bool:
        return (
            self.bs_T == 0.5
            and math.isinf(self.pbs_extinction)
            and self.mzi_visibility == 1.0
            and self.pol_visibility_hv == 1.0
            and self.pol_visibility_ad == 1.0
            and self.phase_jitter_sigma == 0.0
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        if math.isinf(d["pbs_extinction"]):
            d["pbs_extinction"] = None
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "NoiseModel":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown noise fields: {sorted(unknown)}")
        data = dict(data)
        if data.get("pbs_extinction", 0) is None:
            data["pbs_extinction"] = math.inf
        return cls(**{k: float(v) for k, v in data.items()})

    @classmethod
    def load(cls, path: str | Path) -> "NoiseModel":
        return cls.from_dict(json.loads(Path(path).read_text()))


def apply_noise(circuit: Circuit, noise: NoiseModel, rng: np.random.Generator | None = None) -> Circuit:
    """Perturbed copy of ``circuit``.

    Nominal 50:50 splitters take the model's split ratio, PBSs get the
    model's extinction ratio, and every phase element is offset by one
    Gaussian draw (quasi-static drift for this circuit instance).
    """
    if noise.phase_jitter_sigma > 0 and rng is None:
        raise ValueError("phase jitter needs a random generator")
    out = []
    for el in circuit.placements:
        if isinstance(el, BS) and el.T == 0.5 and el.R == 0.5:
            el = replace(el, T=noise.bs_T, R=1.0 - noise.bs_T)
        elif isinstance(el, PBS) and math.isinf(el.extinction):
            el = replace(el, extinction=noise.pbs_extinction)
        elif isinstance(el, Phase) and noise.phase_jitter_sigma > 0:
            el = replace(el, delta=el.delta + rng.normal(0.0, noise.phase_jitter_sigma))
        out.append(el)
    return Circuit(circuit.paths, tuple(out))


# -- settings ------------------------------------------------------------


@dataclass(frozen=True)
class MeasurementSetting:
    """One Pauli basis per register qubit, e.g. ``"ZX"`` for (polarization, path).

    Outcome bit 0 is the +1 eigenstate: H, D, L for polarization and
    |0>, |+>, |+i> for paths.
    """

    bases: str

    def __post_init__(self):
        if not self.bases or any(b not in BASES for b in self.bases):
            raise ValueError(f"bases must be a non-empty string over {BASES!r}, got {self.bases!r}")

    @property
    def label(self) -> str:
        return self.bases

    @property
    def n_qubits(self) -> int:
        return len(self.bases)


def all_settings(n_qubits: int) -> list[MeasurementSetting]:
    """The 3**n Pauli settings in lexicographic Z, X, Y order."""
    labels = [""]
    for _ in range(n_qubits):
        labels = [s + b for s in labels for b in BASES]
    return [MeasurementSetting(s) for s in labels]


def outcome_labels(n_qubits: int) -> list[str]:
    return [format(i, f"0{n_qubits}b") for i in range(2**n_qubits)]


def _path_pairs(paths: int, bit_weight: int) -> list[tuple[int, int]]:
    return [(l, l + bit_weight) for l in range(paths) if not l & bit_weight]


def analysis_circuit(setting: MeasurementSetting, paths: int) -> Circuit:
    """Optical basis-change stage that maps the setting's eigenbasis onto detector ports."""
    n_path = paths.bit_length() - 1
    if paths & (paths - 1) or setting.n_qubits != n_path + 1:
        raise DimensionError(f"setting {setting.label!r} does not fit a {paths}-path register")
    els = []
    pol = setting.bases[0]
    if pol == "Y":
        els += [QWP(p, np.pi / 2) for p in range(paths)]
    if pol in "XY":
        els += [HWP(p, np.pi / 8) for p in range(paths)]
    for j, b in enumerate(setting.bases[1:]):
        weight = 1 << (n_path - 1 - j)
        if b == "Z":
            continue
        delta = np.pi if b == "X" else np.pi / 2
        for lo, hi in _path_pairs(paths, weight):
            els += [Phase(hi, delta), BS((lo, hi))]
    return Circuit(paths, tuple(els))


def outcome_probabilities(state: np.ndarray, setting: MeasurementSetting, paths: int | None = None) -> np.ndarray:
    """Born probabilities of the 2**n outcomes (index = outcome bitstring)."""
    rho = density(state)
    paths = rho.shape[0] // 2 if paths is None else paths
    if rho.shape[0] != 2 * paths:
        raise DimensionError(f"state dim {rho.shape[0]} does not match {paths} paths")
    u = compile_circuit(analysis_circuit(setting, paths))
    p = np.real(np.einsum("ij,jk,ik->i", u, rho, u.conj()))
    p = np.clip(p, 0.0, None)
    return p / p.sum()


def contrast_per_qubit(setting: MeasurementSetting, noise: NoiseModel) -> list[float]:
    """Analyzer contrast for each qubit under ``noise``; 1 means a perfect analyzer."""
    out = []
    for q, b in enumerate(setting.bases):
        if q == 0:
            out.append(noise.pol_visibility_hv if b == "Z" else noise.pol_visibility_ad)
        else:
            out.append(1.0 if b == "Z" else noise.mzi_visibility)
    return out


def degrade(probs: np.ndarray, contrasts: Sequence[float]) -> np.ndarray:
    """Flip each outcome bit q with probability (1 - contrasts[q]) / 2."""
    n = len(contrasts)
    t = np.asarray(probs, dtype=float).reshape((2,) * n)
    for q, v in enumerate(contrasts):
        if v < 1.0:
            t = (1 + v) / 2 * t + (1 - v) / 2 * np.flip(t, axis=q)
    return t.reshape(-1)


def simulate_probabilities(
    state: np.ndarray,
    circuit: Circuit,
    setting: MeasurementSetting,
    noise: NoiseModel,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Outcome probabilities after a noisy run of ``circuit`` followed by the analysis stage."""
    full = apply_noise(circuit + analysis_circuit(setting, circuit.paths), noise, rng)
    rho = density(state)
    u = compile_circuit(full)
    p = np.clip(np.real(np.einsum("ij,jk,ik->i", u, rho, u.conj())), 0.0, None)
    p = p / p.sum()
    return degrade(p, contrast_per_qubit(setting, noise))


def sample_counts(probs: np.ndarray, noise: NoiseModel, rng: np.random.Generator) -> np.ndarray:
    """Poisson counts per outcome: signal mean_counts*eta*p_i plus flat accidentals."""
    probs = np.asarray(probs, dtype=float)
    if np.any(probs < -1e-12) or abs(probs.sum() - 1) > 1e-8:
        raise ValueError("probabilities must be non-negative and sum to 1")
    signal = noise.mean_counts * noise.heralding_efficiency * np.clip(probs, 0, None)
    counts = rng.poisson(signal)
    if noise.accidental_rate > 0:
        counts = counts + rng.poisson(noise.accidental_rate * noise.window, size=probs.shape)
    return counts.astype(np.int64)


@dataclass
class CountTable:
    """Counts per setting label and outcome label, with the seed that produced them."""

    seed: int
    settings: dict[str, dict[str, int]] = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def add(self, label: str, outcomes: Sequence[str], counts: Sequence[int]) -> None:
        self.settings[label] = {o: int(c) for o, c in zip(outcomes, counts)}

    def to_dict(self) -> dict:
        out = {
            "seed": self.seed,
            "settings": [{"label": k, "outcomes": dict(v)} for k, v in self.settings.items()],
        }
        if self.metadata:
            out["metadata"] = self.metadata
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "CountTable":
        table = cls(int(data["seed"]), metadata=dict(data.get("metadata", {})))
        for entry in data["settings"]:
            counts = {str(k): int(v) for k, v in entry["outcomes"].items()}
            if any(v < 0 for v in counts.values()):
                raise ValueError(f"negative count in setting {entry['label']!r}")
            table.settings[str(entry["label"])] = counts
        return table

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "CountTable":
        return cls.from_dict(json.loads(text))


def simulate_count_table(
    state: np.ndarray,
    circuit: Circuit,
    noise: NoiseModel,
    seed: int,
    settings: Sequence[MeasurementSetting] | None = None,
) -> CountTable:
    """Run every setting (default: all Pauli settings) with its own derived random stream."""
    n = circuit.register.require_qubits()
    settings = all_settings(n) if settings is None else list(settings)
    labels = outcome_labels(n)
    table = CountTable(seed, metadata={"mean_counts": noise.mean_counts, "window": noise.window})
    for k, s in enumerate(settings):
        rng = derive_rng(seed, k)
        probs = simulate_probabilities(state, circuit, s, noise, rng)
        table.add(s.label, labels, sample_counts(probs, noise, rng))
    return table


# -- interferometry ------------------------------------------------------


def mzi_circuit(delta_phi: float) -> Circuit:
    """Beam splitter, relative phase on arm |1>, beam splitter."""
    return Circuit(2, (BS((0, 1)), Phase(1, delta_phi), BS((0, 1))))


def mzi_probabilities(delta_phi: float, noise: NoiseModel = NoiseModel(), rng=None) -> np.ndarray:
    """(P(port 0), P(port 1)) for a photon entering port 0 in H polarization."""
    u = compile_circuit(apply_noise(mzi_circuit(delta_phi), noise, rng))
    amp = u[:, 0]
    p = np.abs(amp[:2]) ** 2 + np.abs(amp[2:]) ** 2
    return degrade(p / p.sum(), [noise.mzi_visibility])


@dataclass
class FringeTable:
    phases: np.ndarray
    port0: np.ndarray
    port1: np.ndarray
    seed: int | None = None

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["delta_phi", "port0", "port1"])
        for phi, a, b in zip(self.phases, self.port0, self.port1):
            w.writerow([repr(float(phi)), int(a), int(b)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "FringeTable":
        rows = list(csv.DictReader(io.StringIO(text)))
        return cls(
            np.array([float(r["delta_phi"]) for r in rows]),
            np.array([int(r["port0"]) for r in rows]),
            np.array([int(r["port1"]) for r in rows]),
        )


def mzi_scan(phases: Sequence[float], noise: NoiseModel = NoiseModel(), seed: int = 0) -> FringeTable:
    """Photon counts at both MZI output ports for each relative phase."""
    phases = np.asarray(phases, dtype=float)
    if phases.size == 0:
        raise ValueError("phase grid is empty")
    port0, port1 = [], []
    for k, phi in enumerate(phases):
        rng = derive_rng(seed, k)
        counts = sample_counts(mzi_probabilities(phi, noise, rng), noise, rng)
        port0.append(counts[0])
        port1.append(counts[1])
    return FringeTable(phases, np.array(port0), np.array(port1), seed)


@dataclass(frozen=True)
class FringeFit:
    visibility: float
    contrast: float
    mean: float
    phase_offset: float


def fit_fringe(phases: Sequence[float], counts: Sequence[float]) -> FringeFit:
    """Least-squares fit of A(1 + V cos(phi + phi0)).

    The model is linear in (A, A V cos phi0, -A V sin phi0), so the fit is a
    single linear solve. ``contrast`` is (max - min)/(max + min) of the
    fitted curve over the sampled phases.
    """
    phases = np.asarray(phases, dtype=float)
    counts = np.asarray(counts, dtype=float)
    if phases.size < 5:
        raise ValueError(f"need at least 5 phase points, got {phases.size}")
    if not np.any(counts > 0):
        raise ValueError("degenerate fringe: all counts are zero")
    design = np.column_stack([np.ones_like(phases), np.cos(phases), np.sin(phases)])
    (a, b, c), *_ = np.linalg.lstsq(design, counts, rcond=None)
    if a <= 0:
        raise ValueError("degenerate fringe: non-positive fitted mean")
    vis = float(np.clip(np.hypot(b, c) / a, 0.0, 1.0))
    phi0 = float(np.arctan2(-c, b))
    curve = np.clip(a * (1 + vis * np.cos(phases + phi0)), 0, None)
    contrast = float((curve.max() - curve.min()) / (curve.max() + curve.min()))
    return FringeFit(vis, contrast, float(a), phi0)


def visibility(fringe: FringeTable, port: int = 1) -> FringeFit:
    counts = fringe.port1 if port == 1 else fringe.port0
    return fit_fringe(fringe.phases, counts)


# -- Bell tests ----------------------------------------------------------

CHSH_ANGLES = (0.0, np.pi / 4, np.pi / 8, 3 * np.pi / 8)


def analyzer(angle: float) -> np.ndarray:
    """+/-1 observable of a linear polarizer at ``angle`` (Bloch angle 2*angle in the X-Z plane)."""
    return np.cos(2 * angle) * SZ + np.sin(2 * angle) * SX


def correlation(rho: np.ndarray, a: float, b: float) -> float:
    return float(np.real(np.trace(density(rho) @ tensor(analyzer(a), analyzer(b)))))


def chsh(rho: np.ndarray, angles: Sequence[float] = CHSH_ANGLES) -> float:
    """S = E(a,b) - E(a,b') + E(a',b) + E(a',b') for polarizer angles (a, a', b, b')."""
    rho = density(rho)
    if rho.shape != (4, 4):
        raise DimensionError(f"CHSH needs a two-qubit state, got dim {rho.shape[0]}")
    a, a2, b, b2 = angles
    return (
        correlation(rho, a, b)
        - correlation(rho, a, b2)
        + correlation(rho, a2, b)
        + correlation(rho, a2, b2)
    )
