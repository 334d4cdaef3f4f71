"""Single-qubit polarization gates from a quarter-half-quarter wave plate stack.

Each stack realizes its target only up to a global phase; the phase is
printed next to the process fidelity. Every stack has determinant -1, since
the half-wave plate contributes -1 and each quarter-wave plate +1.
"""
import numpy as np

from photonwalk import optics
from photonwalk.qcore import global_phase, process_fidelity

print(f"{'gate':<9}{'q1':>8}{'h':>8}{'q2':>8}{'fidelity':>12}{'phase/pi':>10}{'det':>8}")
for name, (w, target) in optics.WAVEPLATE_SETTINGS.items():
    u = optics.qhq(w)
    print(
        f"{name:<9}{w.q1 / np.pi:>7.4f}p{w.h / np.pi:>7.4f}p{w.q2 / np.pi:>7.4f}p"
        f"{process_fidelity(u, target):>12.9f}{global_phase(target, u) / np.pi:>10.4f}"
        f"{np.linalg.det(u).real:>8.3f}"
    )

h = optics.qhq((np.pi / 4, np.pi / 8, np.pi / 2))
print("\nHadamard from (pi/4, pi/8, pi/2):")
print(np.round(h.real, 6))
