import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from photonwalk import circuit as C
from photonwalk.optics import CoinParams
from photonwalk.qcore import HADAMARD, SX, is_unitary, process_fidelity, random_state

TWO_QUBIT = ["fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig3c"]
THREE_QUBIT = [f"fig7{c}" for c in "abcdefghijkl"]
MULTI = ["fig4a", "fig4b"]
PATH_PATH_CNOTS = ["fig7d", "fig7e"]


def test_fixture_library_is_complete():
    assert C.fixture_names() == sorted(TWO_QUBIT + THREE_QUBIT + MULTI)


@pytest.mark.parametrize("name", TWO_QUBIT + THREE_QUBIT + MULTI)
def test_fixture_constructions_match_ideal_gates(name):
    data = C.fixture_data(name)
    c = C.fixture(name)
    ideal = C.parse_gate(data["ideal"], c.register.require_qubits())
    assert C.gate_check(c, ideal).process_fidelity >= 1 - 1e-10


@pytest.mark.parametrize("name", PATH_PATH_CNOTS)
def test_path_path_cnots_are_exact_permutations(name):
    u = C.fixture(name).compile()
    assert C.is_permutation_matrix(u)
    assert set(np.unique(u)) <= {0, 1}


def test_compiled_fixtures_preserve_norm(rng):
    for name in C.fixture_names():
        u = C.fixture(name).compile()
        for _ in range(100):
            psi = random_state(u.shape[0], rng)
            assert np.linalg.norm(u @ psi) == pytest.approx(1, abs=1e-12)


def test_hwp_on_path_one_is_path_controlled_not():
    u = C.embed(C.HWP(1, np.pi / 4), C.PhotonicRegister(2))
    # pol-major ordering (H0, H1, V0, V1): H1 <-> V1 only
    assert_allclose(u, np.eye(4)[[0, 3, 2, 1]], atol=1e-15)


def test_swapping_paths_two_and_three_is_cnot():
    u = C.embed(C.Perm((0, 1, 3, 2)), C.PhotonicRegister(4))
    assert C.gate_check(C.Circuit(4, (C.Perm((0, 1, 3, 2)),)), C.ideal_gate("CNOT", 3, [1, 2])).process_fidelity == 1
    assert C.is_permutation_matrix(u)


def test_zero_phase_is_identity():
    assert_allclose(C.embed(C.Phase(0, 0.0), C.PhotonicRegister(3)), np.eye(6))


def test_empty_circuit_compiles_to_identity():
    assert_allclose(C.Circuit(4).compile(), np.eye(8))


def test_placements_apply_in_order():
    c = C.Circuit(2, (C.HWP(0, np.pi / 4), C.PBS((0, 1))))
    out = c.apply(C.prepare_state("H0"))
    # HWP sends |H0> to |V0>, PBS routes V to path 1
    assert_allclose(out, np.eye(4)[3], atol=1e-15)


@pytest.mark.parametrize(
    "el",
    [C.HWP(2, 0.1), C.BS((0, 0)), C.BS((0, 5)), C.Perm((0, 0)), C.PolPerm(2, (1, 0)), C.PBS((1, 1))],
)
def test_bad_placements_raise(el):
    with pytest.raises(C.PlacementError):
        C.embed(el, C.PhotonicRegister(2))


def test_ideal_gates():
    assert_allclose(C.ideal_gate("CNOT", 2, [0, 1]), np.eye(4)[[0, 1, 3, 2]])
    assert_allclose(C.ideal_gate("T", 1, [0]), np.diag([1, np.exp(1j * np.pi / 4)]))
    assert_allclose(C.ideal_gate("H", 2, [0]), np.kron(HADAMARD, np.eye(2)))
    assert_allclose(C.ideal_gate("X", 2, [1]), np.kron(np.eye(2), SX))


def test_toffoli_flips_only_when_both_controls_set():
    u = C.ideal_gate("TOFFOLI", 3, [0, 1, 2])
    expected = np.eye(8)[[0, 1, 2, 3, 4, 5, 7, 6]]
    assert_allclose(u, expected)


def test_fredkin_swaps_targets_under_control():
    u = C.ideal_gate("FREDKIN", 3, [0, 1, 2])
    assert u[0b110, 0b101] == 1 and u[0b101, 0b110] == 1 and u[0b010, 0b010] == 1


def test_ideal_gate_errors():
    with pytest.raises(C.PlacementError):
        C.ideal_gate("CNOT", 2, [0, 0])
    with pytest.raises(C.PlacementError):
        C.ideal_gate("CNOT", 2, [0, 2])
    with pytest.raises(C.PlacementError):
        C.ideal_gate("SWAPPY", 2, [0])


def test_parse_gate_forms():
    assert_allclose(C.parse_gate("H⊗I", 2), np.kron(HADAMARD, np.eye(2)))
    assert_allclose(C.parse_gate("I*I*X", 3), np.kron(np.eye(4), SX))
    assert_allclose(C.parse_gate("CNOT(2,1)", 2), C.ideal_gate("CNOT", 2, [1, 0]))
    assert_allclose(C.parse_gate("P(0.5,1)", 1), np.diag([1, np.exp(0.5j)]))
    assert_allclose(C.parse_gate("CNOT", 2), C.ideal_gate("CNOT", 2, [0, 1]))
    with pytest.raises(C.PlacementError):
        C.parse_gate("CNOT(1,2) on 3 qubits", 2)


def test_identity_vs_cnot_quarter_fidelity():
    check = C.gate_check(C.Circuit(2), C.ideal_gate("CNOT", 2, [0, 1]))
    assert check.process_fidelity == pytest.approx(0.25)


def test_gate_check_dimension_mismatch():
    with pytest.raises(ValueError):
        C.gate_check(C.Circuit(2), np.eye(8))


def test_gate_check_recovers_phase():
    c = C.Circuit(2, (C.Phase(0, 0.3), C.Phase(1, 0.3)))
    check = C.gate_check(c, np.eye(4))
    assert check.process_fidelity == pytest.approx(1)
    assert check.phase == pytest.approx(0.3)


def test_presets():
    s = 1 / np.sqrt(2)
    assert_allclose(C.prepare_state("bell_pp"), [s, 0, 0, s])
    assert_allclose(C.prepare_state("plus_path"), [s, s, 0, 0])
    assert_allclose(C.prepare_state("three_qubit_ghz", paths=4), np.eye(8)[0] * s + np.eye(8)[7] * s)
    with pytest.raises(ValueError):
        C.prepare_state([1, 1, 0, 0])
    with pytest.raises(ValueError):
        C.prepare_state("nope")


def test_cnot_on_bell_pp_matches_matrix():
    psi = C.prepare_state("bell_pp")
    out = C.fixture("fig2c").apply(psi)
    assert_allclose(out, C.ideal_gate("CNOT", 2, [0, 1]) @ psi, atol=1e-15)
    assert_allclose(out, [1 / np.sqrt(2), 0, 1 / np.sqrt(2), 0], atol=1e-15)


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_preparation_circuit_reaches_random_states(seed):
    target = random_state(4, np.random.default_rng(seed))
    c = C.preparation_circuit(target)
    out = c.apply(C.prepare_state("H0"))
    assert abs(np.vdot(target, out)) ** 2 == pytest.approx(1, abs=1e-10)


element_strategy = st.one_of(
    st.builds(C.QHQ, st.integers(0, 3), st.tuples(*[st.floats(-7, 7)] * 3)),
    st.builds(C.HWP, st.integers(0, 3), st.floats(-7, 7)),
    st.builds(C.QWP, st.integers(0, 3), st.floats(-7, 7)),
    st.builds(C.Coin, st.integers(0, 3), st.builds(CoinParams, *[st.floats(-7, 7)] * 4)),
    st.builds(lambda p, t, phi: C.BS(p, t, 1 - t, phi), st.permutations(range(4)).map(lambda x: tuple(x[:2])), st.floats(0, 1), st.floats(-7, 7)),
    st.builds(C.PBS, st.permutations(range(4)).map(lambda x: tuple(x[:2])), st.one_of(st.just(float("inf")), st.floats(1, 1e4))),
    st.builds(C.Phase, st.integers(0, 3), st.floats(-7, 7)),
    st.builds(C.Perm, st.permutations(range(4)).map(tuple)),
    st.builds(C.PolPerm, st.integers(0, 1), st.permutations(range(4)).map(tuple)),
)


@settings(max_examples=100, deadline=None)
@given(st.lists(element_strategy, max_size=12))
def test_random_circuits_compile_unitary_and_roundtrip_json(elements):
    c = C.Circuit(4, tuple(elements))
    u = c.compile()
    assert is_unitary(u, tol=1e-10)
    again = C.loads_circuit(json.dumps(C.circuit_to_dict(c)))
    assert again == c
    assert_allclose(again.compile(), u, atol=0)


def test_circuits_concatenate():
    a, b = C.fixture("fig2a"), C.fixture("fig2c")
    assert_allclose((a + b).compile(), b.compile() @ a.compile(), atol=1e-15)
    with pytest.raises(ValueError):
        a + C.fixture("fig7a")


def test_json_errors_name_the_field():
    with pytest.raises(C.CircuitFormatError, match=r"placements\[1\]\.angles"):
        C.loads_circuit('{"paths": 2, "placements": [{"type": "PBS", "pair": [0, 1]}, {"type": "QHQ", "path": 0, "angles": [1, 2]}]}')
    with pytest.raises(C.CircuitFormatError, match=r"placements\[0\]"):
        C.loads_circuit('{"paths": 2, "placements": [{"type": "BS", "pair": [0, 3]}]}')
    with pytest.raises(C.CircuitFormatError, match="line 2"):
        C.loads_circuit('{"paths": 2,\n "placements": [}')
    with pytest.raises(C.CircuitFormatError, match="paths"):
        C.loads_circuit('{"placements": []}')
    with pytest.raises(C.CircuitFormatError, match="unknown element type"):
        C.loads_circuit('{"paths": 2, "placements": [{"type": "LASER"}]}')


def test_spec_format_example_parses():
    text = """{ "paths": 4,
      "placements": [
        {"type":"QHQ","path":0,"angles":[0.0,0.3927,0.0]},
        {"type":"BS","pair":[0,1],"T":0.5,"R":0.5,"phi":0.0},
        {"type":"PBS","pair":[2,3]},
        {"type":"PHASE","path":1,"delta":3.14159},
        {"type":"PERM","mapping":[0,1,3,2]} ] }"""
    c = C.loads_circuit(text)
    assert len(c.placements) == 5 and is_unitary(c.compile())


def test_non_power_of_two_register_has_no_qubits():
    reg = C.PhotonicRegister(3)
    assert reg.n_qubits is None
    with pytest.raises(ValueError):
        reg.require_qubits()


def test_three_qubit_fixture_phases():
    # two waveplate-realized T gates carry the same global phase as the single-qubit row
    for name in ("fig3a", "fig7g"):
        c = C.fixture(name)
        check = C.gate_check(c, C.parse_gate(C.fixture_data(name)["ideal"], c.register.require_qubits()))
        assert check.phase == pytest.approx(3 * np.pi / 8)
    assert process_fidelity(C.fixture("fig7a").compile(), C.parse_gate("H⊗I⊗I", 3)) == pytest.approx(1)
