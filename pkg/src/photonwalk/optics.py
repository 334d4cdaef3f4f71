"""Jones matrices of the optical elements and the quantum-walk operator set.

Angles are in radians. All 2x2 polarization matrices act on column vectors
in the (H, V) basis; the coin/shift operators act on polarization (x) position
with polarization as the most significant factor.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qcore import CONSTRUCTION_TOL


class ParameterError(ValueError):
    """Element parameters violate their physical constraints."""


@dataclass(frozen=True)
class CoinParams:
    """Four-parameter U(2) coin: global phase tau, phases eta and zeta, mixing angle theta."""

    tau: float = 0.0
    eta: float = 0.0
    zeta: float = 0.0
    theta: float = 0.0

    @classmethod
    def hadamard_type(cls) -> "CoinParams":
        return cls(0.0, 0.0, 0.0, np.pi / 4)


@dataclass(frozen=True)
class WaveplateTriple:
    """Fast-axis angles of QWP, HWP, QWP in the order the photon meets them."""

    q1: float
    h: float
    q2: float


@dataclass(frozen=True)
class BSParams:
    T: float = 0.5
    R: float = 0.5
    phi: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.T <= 1.0 and 0.0 <= self.R <= 1.0):
            raise ParameterError(f"T={self.T}, R={self.R} must lie in [0, 1]")
        if abs(self.T + self.R - 1.0) > CONSTRUCTION_TOL:
            raise ParameterError(f"T + R = {self.T + self.R} != 1")


def hwp(x: float) -> np.ndarray:
    c, s = np.cos(2 * x), np.sin(2 * x)
    return np.array([[c, s], [s, -c]], dtype=complex)


def qwp(x: float) -> np.ndarray:
    c, s = np.cos(x), np.sin(x)
    off = (1 - 1j) * s * c
    return np.exp(-1j * np.pi / 4) * np.array(
        [[c * c + 1j * s * s, off], [off, 1j * c * c + s * s]], dtype=complex
    )


def qhq(w: WaveplateTriple | tuple[float, float, float]) -> np.ndarray:
    """Quarter-half-quarter stack; the first listed plate acts first."""
    if not isinstance(w, WaveplateTriple):
        w = WaveplateTriple(*w)
    return qwp(w.q2) @ hwp(w.h) @ qwp(w.q1)


# Q-H-Q angle triples and the operators they realize up to a global phase.
WAVEPLATE_SETTINGS = {
    "X": (WaveplateTriple(0.0, np.pi / 4, 0.0), np.array([[0, 1], [1, 0]], dtype=complex)),
    "Y": (WaveplateTriple(np.pi / 2, -np.pi / 4, 0.0), np.array([[0, -1j], [1j, 0]], dtype=complex)),
    "Z": (WaveplateTriple(0.0, np.pi, np.pi / 2), np.array([[1, 0], [0, -1]], dtype=complex)),
    "S": (
        WaveplateTriple(np.pi / 4, 7 * np.pi / 8, 5 * np.pi / 4),
        np.diag([1, np.exp(1j * np.pi / 2)]).astype(complex),
    ),
    "P(pi/4)": (
        WaveplateTriple(3 * np.pi / 4, 3 * np.pi / 16, 3 * np.pi / 4),
        np.diag([1, np.exp(1j * np.pi / 4)]).astype(complex),
    ),
}


def coin(p: CoinParams) -> np.ndarray:
    ct, st = np.cos(p.theta), np.sin(p.theta)
    return np.exp(1j * p.tau) * np.array(
        [
            [np.exp(1j * p.eta) * ct, np.exp(1j * p.zeta) * st],
            [-np.exp(-1j * p.zeta) * st, np.exp(-1j * p.eta) * ct],
        ],
        dtype=complex,
    )


def beam_splitter(p: BSParams | None = None) -> np.ndarray:
    """Two-port splitter acting on (arm 0, arm 1) amplitudes."""
    p = BSParams() if p is None else p
    t, r = np.sqrt(p.T), np.sqrt(p.R)
    return np.array(
        [[t, -np.exp(-1j * p.phi) * r], [np.exp(1j * p.phi) * r, t]], dtype=complex
    )


def phase_shift(delta: float) -> np.ndarray:
    """Phase delta on arm 1 of a two-arm pair."""
    return np.diag([1.0, np.exp(1j * delta)]).astype(complex)


def pbs_action(extinction: float = np.inf) -> np.ndarray:
    """PBS on polarization (x) two paths, basis order (H0, H1, V0, V1).

    H is transmitted (path kept), V is reflected (paths swapped). A finite
    extinction ratio eps leaks V amplitude sqrt(1/(1+eps)) into the
    transmitted port while keeping the map unitary.
    """
    u = np.zeros((4, 4), dtype=complex)
    u[0:2, 0:2] = np.eye(2)
    if np.isinf(extinction):
        leak = 0.0
    else:
        if extinction <= 0:
            raise ParameterError(f"extinction ratio must be positive, got {extinction}")
        leak = np.sqrt(1.0 / (1.0 + extinction))
    keep = np.sqrt(1.0 - leak**2)
    u[2:4, 2:4] = [[leak, keep], [keep, -leak]]
    return u


def shift(k: int, direction: int, m: int) -> np.ndarray:
    """Coin-conditioned cyclic shift: |k>|l> -> |k>|l +/- 1 mod m>, other coin states fixed."""
    if k not in (0, 1):
        raise ParameterError(f"coin index must be 0 or 1, got {k}")
    if direction not in (1, -1):
        raise ParameterError(f"direction must be +1 or -1, got {direction}")
    if m < 2:
        raise ParameterError(f"need at least 2 positions, got {m}")
    s = np.eye(2 * m, dtype=complex)
    block = np.roll(np.eye(m), direction, axis=0)
    s[k * m:(k + 1) * m, k * m:(k + 1) * m] = block
    return s


def standard_shift(m: int) -> np.ndarray:
    """H steps left, V steps right, cyclic on m positions."""
    return shift(0, -1, m) @ shift(1, +1, m)


def walk_step(p: CoinParams, m: int) -> np.ndarray:
    """One walk step: coin on every position, then the standard conditional shift."""
    if m < 3:
        raise ParameterError(f"walk_step needs m >= 3, got {m}")
    return standard_shift(m) @ np.kron(coin(p), np.eye(m))
