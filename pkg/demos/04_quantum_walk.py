"""A coined walk on a ring of positions.

The Hadamard-type coin with the balanced start (|H> + i|V>)/sqrt2 spreads
symmetrically and ballistically, unlike a classical random walk whose
spread grows like sqrt(t).
"""
import numpy as np

from photonwalk.optics import CoinParams
from photonwalk.walklab import WalkConfig, evolve, position_distribution

m, l0 = 101, 50
x = np.arange(m) - l0
s = 1 / np.sqrt(2)
for t in (0, 10, 20, 40):
    p = position_distribution(evolve(WalkConfig(t, m, CoinParams.hadamard_type(), s, 1j * s, l0)), m)
    sigma = np.sqrt(np.sum(p * x**2) - np.sum(p * x) ** 2)
    print(f"t = {t:3d}  mean = {np.sum(p * x):+.2e}  std = {sigma:6.3f}  classical std = {np.sqrt(t):6.3f}")

p = position_distribution(evolve(WalkConfig(40, m, CoinParams.hadamard_type(), s, 1j * s, l0)), m)
print("\nposition distribution at t = 40 (every other site is empty):")
for xi, pi in zip(x[::2], p[::2]):
    if abs(xi) <= 40:
        print(f"{xi:+4d} {'#' * int(round(400 * pi))}")
