"""Every shipped circuit, compiled and compared with its ideal gate.

Polarization is qubit 1; the paths carry the remaining qubits, most
significant first. Gate names use 1-based qubit numbers.
"""
from photonwalk.circuit import fixture, fixture_data, fixture_names, gate_check, parse_gate

for name in fixture_names():
    data = fixture_data(name)
    c = fixture(name)
    check = gate_check(c, parse_gate(data["ideal"], c.register.require_qubits()))
    kinds = sorted({type(el).__name__ for el in c.placements})
    print(f"{name:<6}{data['ideal']:<16}F={check.process_fidelity:.12f}  elements: {', '.join(kinds)}")

# path-path C-NOTs need no optics at all: relabeling two output ports is enough
u = fixture("fig7d").compile()
print("\nfig7d is a permutation matrix:", set(u.flatten().real) <= {0.0, 1.0})
