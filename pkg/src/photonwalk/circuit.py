"""Polarization-path register, optical placements and compilation to unitaries.

A photon on ``m`` paths lives in a 2m-dimensional space. Basis index of
``|s>|l>`` (polarization s in {H=0, V=1}, path l) is ``s*m + l``. When m is
a power of two the register reads as qubits ``(pol, path MSB, ..., path LSB)``,
so ``|H>|0> = |00>``, and for four paths the labels 00, 01, 10, 11 run top to
bottom.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence, Union

import numpy as np
from scipy import optimize

from . import optics
from .qcore import (
    PHYSICS_TOL,
    DimensionError,
    StateError,
    basis_state,
    dagger,
    global_phase,
    normalize,
    process_fidelity,
)


class PlacementError(ValueError):
    """A placement does not fit the register it is embedded into."""


class CircuitFormatError(ValueError):
    """Malformed circuit JSON; the message names the offending field."""


@dataclass(frozen=True)
class PhotonicRegister:
    paths: int

    def __post_init__(self):
        if self.paths < 1:
            raise PlacementError(f"need at least one path, got {self.paths}")

    @property
    def dim(self) -> int:
        return 2 * self.paths

    @property
    def path_qubits(self) -> int | None:
        m = self.paths
        if m & (m - 1):
            return None
        return m.bit_length() - 1

    @property
    def n_qubits(self) -> int | None:
        k = self.path_qubits
        return None if k is None else k + 1

    def index(self, pol: int, path: int) -> int:
        return pol * self.paths + path

    def require_qubits(self) -> int:
        n = self.n_qubits
        if n is None:
            raise DimensionError(f"{self.paths} paths is not a power of two; no qubit reading")
        return n


# -- elements -------------------------------------------------------------


@dataclass(frozen=True)
class QHQ:
    path: int
    angles: tuple[float, float, float]

    def matrix(self) -> np.ndarray:
        return optics.qhq(self.angles)


@dataclass(frozen=True)
class HWP:
    path: int
    angle: float

    def matrix(self) -> np.ndarray:
        return optics.hwp(self.angle)


@dataclass(frozen=True)
class QWP:
    path: int
    angle: float

    def matrix(self) -> np.ndarray:
        return optics.qwp(self.angle)


@dataclass(frozen=True)
class Coin:
    path: int
    params: optics.CoinParams

    def matrix(self) -> np.ndarray:
        return optics.coin(self.params)


@dataclass(frozen=True)
class BS:
    pair: tuple[int, int]
    T: float = 0.5
    R: float = 0.5
    phi: float = 0.0

    def matrix(self) -> np.ndarray:
        return optics.beam_splitter(optics.BSParams(self.T, self.R, self.phi))


@dataclass(frozen=True)
class PBS:
    pair: tuple[int, int]
    extinction: float = float("inf")


@dataclass(frozen=True)
class Phase:
    path: int
    delta: float


@dataclass(frozen=True)
class Perm:
    """Relabel path l as mapping[l], for both polarizations."""

    mapping: tuple[int, ...]


@dataclass(frozen=True)
class PolPerm:
    """Relabel paths only for photons in polarization ``pol`` (0=H, 1=V)."""

    pol: int
    mapping: tuple[int, ...]


Element = Union[QHQ, HWP, QWP, Coin, BS, PBS, Phase, Perm, PolPerm]
POLARIZATION_ELEMENTS = (QHQ, HWP, QWP, Coin)


def _check_path(p: int, m: int) -> None:
    if not 0 <= p < m:
        raise PlacementError(f"path {p} out of range for {m} paths")


def _check_pair(pair: Sequence[int], m: int) -> tuple[int, int]:
    if len(pair) != 2:
        raise PlacementError(f"pair needs two paths, got {pair}")
    p, q = int(pair[0]), int(pair[1])
    _check_path(p, m)
    _check_path(q, m)
    if p == q:
        raise PlacementError(f"pair targets must differ, got ({p}, {q})")
    return p, q


def _check_mapping(mapping: Sequence[int], m: int) -> list[int]:
    mapping = [int(x) for x in mapping]
    if sorted(mapping) != list(range(m)):
        raise PlacementError(f"mapping {mapping} is not a permutation of range({m})")
    return mapping


def embed(el: Element, reg: PhotonicRegister) -> np.ndarray:
    """Full-register unitary of a single placement."""
    m = reg.paths
    u = np.eye(reg.dim, dtype=complex)
    if isinstance(el, POLARIZATION_ELEMENTS):
        _check_path(el.path, m)
        idx = [reg.index(0, el.path), reg.index(1, el.path)]
        u[np.ix_(idx, idx)] = el.matrix()
    elif isinstance(el, BS):
        p, q = _check_pair(el.pair, m)
        block = el.matrix()
        for s in (0, 1):
            idx = [reg.index(s, p), reg.index(s, q)]
            u[np.ix_(idx, idx)] = block
    elif isinstance(el, PBS):
        p, q = _check_pair(el.pair, m)
        idx = [reg.index(0, p), reg.index(0, q), reg.index(1, p), reg.index(1, q)]
        u[np.ix_(idx, idx)] = optics.pbs_action(el.extinction)
    elif isinstance(el, Phase):
        _check_path(el.path, m)
        for s in (0, 1):
            i = reg.index(s, el.path)
            u[i, i] = np.exp(1j * el.delta)
    elif isinstance(el, Perm):
        mapping = _check_mapping(el.mapping, m)
        u = np.zeros((reg.dim, reg.dim), dtype=complex)
        for s in (0, 1):
            for l, target in enumerate(mapping):
                u[reg.index(s, target), reg.index(s, l)] = 1.0
    elif isinstance(el, PolPerm):
        mapping = _check_mapping(el.mapping, m)
        if el.pol not in (0, 1):
            raise PlacementError(f"polarization index must be 0 or 1, got {el.pol}")
        for l, target in enumerate(mapping):
            u[reg.index(el.pol, l), reg.index(el.pol, l)] = 0.0
        for l, target in enumerate(mapping):
            u[reg.index(el.pol, target), reg.index(el.pol, l)] = 1.0
    else:
        raise PlacementError(f"unknown element {el!r}")
    return u


@dataclass(frozen=True)
class Circuit:
    paths: int
    placements: tuple[Element, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "placements", tuple(self.placements))

    @property
    def register(self) -> PhotonicRegister:
        return PhotonicRegister(self.paths)

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.paths != self.paths:
            raise DimensionError(f"cannot concatenate {self.paths}- and {other.paths}-path circuits")
        return Circuit(self.paths, self.placements + other.placements)

    def then(self, *elements: Element) -> "Circuit":
        return Circuit(self.paths, self.placements + tuple(elements))

    def compile(self) -> np.ndarray:
        return compile_circuit(self)

    def apply(self, state: np.ndarray) -> np.ndarray:
        u = self.compile()
        state = np.asarray(state, dtype=complex)
        return u @ state if state.ndim == 1 else u @ state @ dagger(u)


def compile_circuit(c: Circuit) -> np.ndarray:
    """Ordered product embed(p_n) ... embed(p_1)."""
    reg = c.register
    u = np.eye(reg.dim, dtype=complex)
    for el in c.placements:
        u = embed(el, reg) @ u
    return u


# -- ideal gates ---------------------------------------------------------

_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1, -1]).astype(complex),
    "S": np.diag([1, 1j]).astype(complex),
    "T": np.diag([1, np.exp(1j * np.pi / 4)]).astype(complex),
}


def _bits(index: int, n: int) -> list[int]:
    return [(index >> (n - 1 - q)) & 1 for q in range(n)]


def _from_bits(bits: Sequence[int]) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | b
    return out


def _single_qubit(g: np.ndarray, n: int, q: int) -> np.ndarray:
    return np.kron(np.kron(np.eye(2**q), g), np.eye(2 ** (n - q - 1)))


def _classical(n: int, fn) -> np.ndarray:
    d = 2**n
    u = np.zeros((d, d), dtype=complex)
    for i in range(d):
        u[_from_bits(fn(_bits(i, n))), i] = 1.0
    return u


def ideal_gate(name: str, n_qubits: int, qubits: Sequence[int], phi: float | None = None) -> np.ndarray:
    """Standard gate on ``n_qubits`` with 0-based qubit positions (qubit 0 = most significant).

    ``name`` is one of I, H, X, Y, Z, S, T, P (needs ``phi``), CNOT
    (control, target), TOFFOLI (c1, c2, target), FREDKIN (control, t1, t2).
    """
    name = name.upper()
    qubits = [int(q) for q in qubits]
    if len(set(qubits)) != len(qubits):
        raise PlacementError(f"qubit indices collide: {qubits}")
    if any(q < 0 or q >= n_qubits for q in qubits):
        raise PlacementError(f"qubit indices {qubits} out of range for {n_qubits} qubits")
    arity = {"CNOT": 2, "TOFFOLI": 3, "FREDKIN": 3}.get(name, 1)
    if len(qubits) != arity:
        raise PlacementError(f"{name} acts on {arity} qubit(s), got {qubits}")

    if name == "P":
        if phi is None:
            raise PlacementError("P gate needs a phase")
        return _single_qubit(np.diag([1, np.exp(1j * phi)]).astype(complex), n_qubits, qubits[0])
    if name in _SINGLE:
        return _single_qubit(_SINGLE[name], n_qubits, qubits[0])

    def flip(bits):
        bits = list(bits)
        if name == "CNOT" and bits[qubits[0]]:
            bits[qubits[1]] ^= 1
        elif name == "TOFFOLI" and bits[qubits[0]] and bits[qubits[1]]:
            bits[qubits[2]] ^= 1
        elif name == "FREDKIN" and bits[qubits[0]]:
            bits[qubits[1]], bits[qubits[2]] = bits[qubits[2]], bits[qubits[1]]
        return bits

    if name not in ("CNOT", "TOFFOLI", "FREDKIN"):
        raise PlacementError(f"unknown gate {name!r}")
    return _classical(n_qubits, flip)


_CALL = re.compile(r"^\s*([A-Za-z]+)\s*(?:\(([^)]*)\))?\s*$")


def parse_gate(expr: str, n_qubits: int) -> np.ndarray:
    """Gate from a text expression with 1-based qubit numbers.

    Accepts tensor strings of single-qubit letters (``"H⊗I"``, ``"IxT"``,
    ``"I*H*I"``) and calls such as ``"CNOT(1,2)"``, ``"TOFFOLI(1,2,3)"``,
    ``"FREDKIN(1,2,3)"``, ``"H(2)"``, ``"P(0.3927,1)"``. A bare name such as
    ``"CNOT"`` acts on the leading qubits; a trailing ``"on 3 qubits"`` is
    checked against ``n_qubits``.
    """
    expr = expr.strip()
    suffix = re.search(r"\s+on\s+(\d+)\s+qubits?$", expr)
    if suffix:
        if int(suffix.group(1)) != n_qubits:
            raise PlacementError(f"{expr!r} names {suffix.group(1)} qubits, register has {n_qubits}")
        expr = expr[: suffix.start()]
    factors = [f for f in re.split(r"\s*(?:⊗|\*|x)\s*", expr) if f]
    if len(factors) > 1 or (len(factors) == 1 and factors[0] in _SINGLE and n_qubits == 1):
        if len(factors) != n_qubits:
            raise PlacementError(f"{expr!r} has {len(factors)} factors for {n_qubits} qubits")
        u = np.eye(1, dtype=complex)
        for f in factors:
            if f.upper() not in _SINGLE:
                raise PlacementError(f"unknown single-qubit gate {f!r} in {expr!r}")
            u = np.kron(u, _SINGLE[f.upper()])
        return u
    match = _CALL.match(expr)
    if not match:
        raise PlacementError(f"cannot parse gate expression {expr!r}")
    name, args = match.group(1).upper(), match.group(2)
    values = [a.strip() for a in args.split(",")] if args else []
    phi = None
    if name == "P":
        if not values:
            raise PlacementError("P gate needs a phase argument")
        phi = float(values.pop(0))
    try:
        qubits = [int(v) - 1 for v in values]
    except ValueError as exc:
        raise PlacementError(f"bad qubit list in {expr!r}") from exc
    if not qubits:
        qubits = list(range({"CNOT": 2, "TOFFOLI": 3, "FREDKIN": 3}.get(name, 1)))
    return ideal_gate(name, n_qubits, qubits, phi=phi)


@dataclass(frozen=True)
class GateCheck:
    process_fidelity: float
    phase: float


def gate_check(c: Circuit, ideal: np.ndarray) -> GateCheck:
    """Process fidelity of the compiled circuit against ``ideal`` and the recovered global phase."""
    c.register.require_qubits()
    u = c.compile()
    ideal = np.asarray(ideal, dtype=complex)
    if ideal.shape != u.shape:
        raise DimensionError(f"circuit is {u.shape[0]}-dim, ideal gate is {ideal.shape[0]}-dim")
    return GateCheck(process_fidelity(ideal, u), global_phase(ideal, u))


# -- states --------------------------------------------------------------


def _presets(paths: int) -> dict[str, np.ndarray]:
    d = 2 * paths
    s2 = 1 / np.sqrt(2)
    out = {"H0": basis_state(0, d)}
    if paths >= 2:
        out["bell_pp"] = s2 * (basis_state(0, d) + basis_state(paths + 1, d))
        out["plus_path"] = s2 * (basis_state(0, d) + basis_state(1, d))
    if paths == 4:
        out["three_qubit_ghz"] = s2 * (basis_state(0, d) + basis_state(7, d))
    return out


PRESETS = ("H0", "bell_pp", "plus_path", "three_qubit_ghz")


def prepare_state(spec: str | Sequence[complex], paths: int = 2, tol: float = 1e-8) -> np.ndarray:
    """Register-ordered state vector from a preset name or explicit amplitudes.

    Presets: ``H0`` = |H>|0>, ``bell_pp`` = (|H>|0> + |V>|1>)/sqrt2,
    ``plus_path`` = |H>(|0> + |1>)/sqrt2 and, on four paths,
    ``three_qubit_ghz`` = (|H>|00> + |V>|11>)/sqrt2.
    """
    if isinstance(spec, str):
        table = _presets(paths)
        if spec not in table:
            raise StateError(f"unknown preset {spec!r} for {paths} paths; have {sorted(table)}")
        return table[spec]
    psi = np.asarray(spec, dtype=complex).reshape(-1)
    if psi.shape[0] != 2 * paths:
        raise DimensionError(f"{psi.shape[0]} amplitudes for a {2 * paths}-dim register")
    norm2 = float(np.vdot(psi, psi).real)
    if abs(norm2 - 1) > tol:
        raise StateError(f"amplitudes not normalized: sum |a|^2 = {norm2:.12g}")
    return psi / np.sqrt(norm2)


def preparation_circuit(amplitudes: Sequence[complex], seed: int = 0, tol: float = 1e-11) -> Circuit:
    """Q-H-Q, PBS, then one Q-H-Q per path, tuned so that |H>|0> maps onto ``amplitudes``.

    ``amplitudes`` is (alpha, beta, gamma, delta) on (H0, H1, V0, V1). The
    nine plate angles are found by least squares on the phase-aligned
    amplitude difference; the output matches the target up to a global phase.
    """
    target = normalize(prepare_state(amplitudes, paths=2))
    start = basis_state(0, 4)

    def build(x):
        return Circuit(2, (QHQ(0, tuple(x[0:3])), PBS((0, 1)), QHQ(0, tuple(x[3:6])), QHQ(1, tuple(x[6:9]))))

    def residual(x):
        out = build(x).compile() @ start
        overlap = np.vdot(target, out)
        diff = out * np.exp(-1j * np.angle(overlap)) - target
        return np.concatenate([diff.real, diff.imag])

    def infidelity(x):
        return 1.0 - abs(np.vdot(target, build(x).compile() @ start)) ** 2

    rng = np.random.default_rng(seed)
    best = None
    for _ in range(64):
        x0 = rng.uniform(-np.pi, np.pi, 9)
        sol = optimize.least_squares(residual, x0, xtol=1e-15, ftol=1e-15, gtol=1e-15)
        loss = infidelity(sol.x)
        if best is None or loss < best[0]:
            best = (loss, sol.x)
        if loss < tol:
            break
    if best[0] >= tol:
        raise StateError(f"state preparation did not converge (infidelity {best[0]:.3g})")
    return build(best[1])


# -- JSON ----------------------------------------------------------------


def _num(d: dict, key: str, where: str) -> float:
    if key not in d:
        raise CircuitFormatError(f"{where}.{key}: missing field")
    try:
        return float(d[key])
    except (TypeError, ValueError):
        raise CircuitFormatError(f"{where}.{key}: expected a number, got {d[key]!r}") from None


def _int(d: dict, key: str, where: str) -> int:
    v = _num(d, key, where)
    if v != int(v):
        raise CircuitFormatError(f"{where}.{key}: expected an integer, got {d[key]!r}")
    return int(v)


def _ints(d: dict, key: str, where: str, length: int | None = None) -> tuple[int, ...]:
    v = d.get(key)
    if not isinstance(v, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in v):
        raise CircuitFormatError(f"{where}.{key}: expected a list of integers, got {v!r}")
    if length is not None and len(v) != length:
        raise CircuitFormatError(f"{where}.{key}: expected {length} entries, got {len(v)}")
    return tuple(v)


def _element_from_dict(d: dict, where: str) -> Element:
    if not isinstance(d, dict):
        raise CircuitFormatError(f"{where}: expected an object, got {type(d).__name__}")
    kind = d.get("type")
    if kind == "QHQ":
        angles = d.get("angles")
        if not isinstance(angles, list) or len(angles) != 3:
            raise CircuitFormatError(f"{where}.angles: expected three angles, got {angles!r}")
        try:
            angles = tuple(float(a) for a in angles)
        except (TypeError, ValueError):
            raise CircuitFormatError(f"{where}.angles: non-numeric entry in {angles!r}") from None
        return QHQ(_int(d, "path", where), angles)
    if kind == "HWP":
        return HWP(_int(d, "path", where), _num(d, "angle", where))
    if kind == "QWP":
        return QWP(_int(d, "path", where), _num(d, "angle", where))
    if kind == "COIN":
        p = optics.CoinParams(*(_num(d, k, where) if k in d else 0.0 for k in ("tau", "eta", "zeta", "theta")))
        return Coin(_int(d, "path", where), p)
    if kind == "BS":
        T = _num(d, "T", where) if "T" in d else 0.5
        R = _num(d, "R", where) if "R" in d else 1.0 - T
        try:
            optics.BSParams(T, R)
        except optics.ParameterError as exc:
            raise CircuitFormatError(f"{where}: {exc}") from None
        phi = _num(d, "phi", where) if "phi" in d else 0.0
        return BS(_ints(d, "pair", where, 2), T, R, phi)
    if kind == "PBS":
        ext = _num(d, "extinction", where) if "extinction" in d else float("inf")
        return PBS(_ints(d, "pair", where, 2), ext)
    if kind == "PHASE":
        return Phase(_int(d, "path", where), _num(d, "delta", where))
    if kind == "PERM":
        return Perm(_ints(d, "mapping", where))
    if kind == "CPERM":
        return PolPerm(_int(d, "pol", where), _ints(d, "mapping", where))
    raise CircuitFormatError(f"{where}.type: unknown element type {kind!r}")


def circuit_from_dict(data: dict) -> Circuit:
    if not isinstance(data, dict):
        raise CircuitFormatError("circuit: expected a JSON object at top level")
    if "paths" not in data:
        raise CircuitFormatError("circuit: missing field 'paths'")
    paths = data["paths"]
    if not isinstance(paths, int) or isinstance(paths, bool) or paths < 1:
        raise CircuitFormatError(f"paths: expected a positive integer, got {paths!r}")
    raw = data.get("placements", [])
    if not isinstance(raw, list):
        raise CircuitFormatError("placements: expected a list")
    elements = [_element_from_dict(p, f"placements[{i}]") for i, p in enumerate(raw)]
    circuit = Circuit(paths, tuple(elements))
    reg = circuit.register
    for i, el in enumerate(elements):
        try:
            embed(el, reg)
        except (PlacementError, optics.ParameterError) as exc:
            raise CircuitFormatError(f"placements[{i}]: {exc}") from None
    return circuit


def _element_to_dict(el: Element) -> dict:
    if isinstance(el, QHQ):
        return {"type": "QHQ", "path": el.path, "angles": list(el.angles)}
    if isinstance(el, HWP):
        return {"type": "HWP", "path": el.path, "angle": el.angle}
    if isinstance(el, QWP):
        return {"type": "QWP", "path": el.path, "angle": el.angle}
    if isinstance(el, Coin):
        p = el.params
        return {"type": "COIN", "path": el.path, "tau": p.tau, "eta": p.eta, "zeta": p.zeta, "theta": p.theta}
    if isinstance(el, BS):
        return {"type": "BS", "pair": list(el.pair), "T": el.T, "R": el.R, "phi": el.phi}
    if isinstance(el, PBS):
        d = {"type": "PBS", "pair": list(el.pair)}
        if not np.isinf(el.extinction):
            d["extinction"] = el.extinction
        return d
    if isinstance(el, Phase):
        return {"type": "PHASE", "path": el.path, "delta": el.delta}
    if isinstance(el, Perm):
        return {"type": "PERM", "mapping": list(el.mapping)}
    if isinstance(el, PolPerm):
        return {"type": "CPERM", "pol": el.pol, "mapping": list(el.mapping)}
    raise PlacementError(f"unknown element {el!r}")


def circuit_to_dict(c: Circuit) -> dict:
    return {"paths": c.paths, "placements": [_element_to_dict(el) for el in c.placements]}


def loads_circuit(text: str) -> Circuit:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CircuitFormatError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return circuit_from_dict(data)


def load_circuit(path: str | Path) -> Circuit:
    return loads_circuit(Path(path).read_text())


def fixture_names() -> list[str]:
    root = resources.files("photonwalk") / "fixtures"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.startswith("fig") and p.name.endswith(".json"))


def fixture_data(name: str) -> dict:
    path = resources.files("photonwalk") / "fixtures" / f"{name}.json"
    if not path.is_file():
        raise FileNotFoundError(f"no fixture named {name!r}")
    return json.loads(path.read_text())


def fixture(name: str) -> Circuit:
    """Shipped circuit by name, e.g. ``fixture("fig2c")``."""
    return circuit_from_dict(fixture_data(name))


def path_label(path: int, paths: int) -> str:
    width = max((paths - 1).bit_length(), 1)
    return format(path, f"0{width}b")


def is_permutation_matrix(u: np.ndarray, tol: float = PHYSICS_TOL) -> bool:
    u = np.asarray(u)
    ones = np.abs(u - 1) <= tol
    zeros = np.abs(u) <= tol
    return bool(np.all(ones | zeros) and np.all(ones.sum(0) == 1) and np.all(ones.sum(1) == 1))
