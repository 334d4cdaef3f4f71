"""Discrete-time coined walk on a cycle of m positions."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Coin, PolPerm
from .optics import CoinParams, ParameterError, coin
from .qcore import DimensionError


@dataclass(frozen=True)
class WalkConfig:
    steps: int
    positions: int
    coin: CoinParams = CoinParams.hadamard_type()
    alpha: complex = 1.0
    beta: complex = 0.0
    l0: int = 0

    def __post_init__(self):
        if int(self.steps) != self.steps or self.steps < 0:
            raise ParameterError(f"steps must be a non-negative integer, got {self.steps}")
        if self.positions < 3:
            raise ParameterError(f"need at least 3 positions, got {self.positions}")
        if not 0 <= self.l0 < self.positions:
            raise ParameterError(f"l0={self.l0} outside [0, {self.positions})")
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1) > 1e-10:
            raise ParameterError(f"|alpha|^2 + |beta|^2 = {norm}, expected 1")

    def initial_state(self) -> np.ndarray:
        psi = np.zeros(2 * self.positions, dtype=complex)
        psi[self.l0] = self.alpha
        psi[self.positions + self.l0] = self.beta
        return psi


def step(psi: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Coin on every position, then H moves one site left and V one site right."""
    grid = c @ psi.reshape(2, -1)
    return np.concatenate([np.roll(grid[0], -1), np.roll(grid[1], 1)])


def evolve(cfg: WalkConfig) -> np.ndarray:
    c = coin(cfg.coin)
    psi = cfg.initial_state()
    for _ in range(cfg.steps):
        psi = step(psi, c)
    return psi


def position_distribution(state: np.ndarray, m: int) -> np.ndarray:
    state = np.asarray(state)
    if state.shape != (2 * m,):
        raise DimensionError(f"state of shape {state.shape} is not a walk state on {m} positions")
    return (np.abs(state.reshape(2, m)) ** 2).sum(axis=0)


def distribution_csv(probs: np.ndarray) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["position", "probability"])
    for l, p in enumerate(probs):
        w.writerow([l, repr(float(p))])
    return buf.getvalue()


def walk_circuit(p: CoinParams, m: int, steps: int = 1) -> Circuit:
    """The same walk as placements: a coin on every path, then polarization-conditioned relabelings."""
    left = tuple((l - 1) % m for l in range(m))
    right = tuple((l + 1) % m for l in range(m))
    one = tuple(Coin(l, p) for l in range(m)) + (PolPerm(0, left), PolPerm(1, right))
    return Circuit(m, one * steps)
