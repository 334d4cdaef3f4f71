"""End-to-end gate characterization: prepare, run the noisy gate, count, reconstruct.

The polarization-controlled C-NOT acts on (|H>|0> + |V>|1>)/sqrt2. Counts
come from simulated Pauli analysis settings; the density matrix is rebuilt
by linear inversion and by maximum likelihood.
"""
import numpy as np

from photonwalk import tomo
from photonwalk.circuit import fixture, prepare_state
from photonwalk.measure import NoiseModel

gate = fixture("fig2c")
psi = prepare_state("bell_pp")
np.set_printoptions(precision=3, suppress=True)

for label, noise in (("ideal optics", NoiseModel()), ("lab imperfections", NoiseModel.lab())):
    mle, counts = tomo.gate_tomography(gate, psi, noise, seed=0, resamples=20)
    lin, _ = tomo.gate_tomography(gate, psi, noise, seed=0, method="linear")
    print(f"{label}: MLE fidelity {mle.fidelity[0]:.4f} +/- {mle.fidelity[1]:.4f}"
          f" ({mle.iterations} iterations), linear {lin.fidelity[0]:.4f}, linear positive: {lin.positive}")

print("\nreconstructed real part (lab imperfections):")
print(mle.rho.real)
