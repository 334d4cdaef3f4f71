import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from photonwalk import measure as M
from photonwalk.circuit import BS, PBS, Circuit, Phase, fixture, prepare_state
from photonwalk.ghz import BELL, dephased_bell
from photonwalk.qcore import basis_state, density, random_state
from photonwalk.tomo import standard_projectors

phases_100 = np.linspace(0, 2 * np.pi, 100)


def test_h_in_z_basis():
    assert_allclose(M.outcome_probabilities(basis_state(0, 2), M.MeasurementSetting("Z")), [1, 0])


def test_bell_pp_zz_is_uniform_on_correlated_outcomes():
    p = M.outcome_probabilities(prepare_state("bell_pp"), M.MeasurementSetting("ZZ"))
    assert_allclose(p, [0.5, 0, 0, 0.5], atol=1e-15)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_analysis_stage_matches_projectors(n, rng):
    # outcome probabilities from the optical analysis stage equal <psi|P|psi> of the Pauli eigenprojectors
    proj = standard_projectors(n)
    psi = random_state(2**n, rng)
    rho = density(psi)
    k = 0
    for s in M.all_settings(n):
        p = M.outcome_probabilities(psi, s)
        expected = [np.real(np.trace(proj.projectors[k + j] @ rho)) for j in range(2**n)]
        assert_allclose(p, expected, atol=1e-12)
        k += 2**n


def test_outcome_probabilities_dimension_check():
    with pytest.raises(ValueError):
        M.outcome_probabilities(basis_state(0, 8), M.MeasurementSetting("ZZ"), paths=2)


def test_mzi_noiseless_fringe_exact():
    p1 = np.array([M.mzi_probabilities(d)[1] for d in phases_100])
    assert np.max(np.abs(p1 - np.cos(phases_100 / 2) ** 2)) <= 1e-12


def test_mzi_balanced_at_quarter_turn():
    assert_allclose(M.mzi_probabilities(np.pi / 2), [0.5, 0.5], atol=1e-15)


def test_mzi_visibility_recovered():
    noise = M.NoiseModel(mzi_visibility=0.934, mean_counts=1e6)
    fit = M.visibility(M.mzi_scan(np.linspace(0, 2 * np.pi, 50, endpoint=False), noise, seed=3))
    assert fit.visibility == pytest.approx(0.934, abs=0.005)


def test_mzi_scan_rejects_empty_grid():
    with pytest.raises(ValueError):
        M.mzi_scan([])


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 1.0), st.floats(-np.pi, np.pi), st.floats(10, 1e4))
def test_fit_fringe_exact_data(v, phi0, a):
    ph = np.linspace(0, 2 * np.pi, 12, endpoint=False)
    fit = M.fit_fringe(ph, a * (1 + v * np.cos(ph + phi0)))
    assert fit.visibility == pytest.approx(v, abs=1e-9)
    assert fit.mean == pytest.approx(a, rel=1e-9)


def test_fit_fringe_errors():
    with pytest.raises(ValueError):
        M.fit_fringe([0, 1, 2], [1, 2, 3])
    with pytest.raises(ValueError):
        M.fit_fringe(np.arange(6), np.zeros(6))


def test_fringe_csv_roundtrip():
    t = M.mzi_scan(np.linspace(0, 1, 5), M.NoiseModel(), seed=1)
    back = M.FringeTable.from_csv(t.to_csv())
    assert_allclose(back.phases, t.phases, rtol=0, atol=0)
    assert_allclose(back.port1, t.port1)
    assert t.to_csv().splitlines()[0] == "delta_phi,port0,port1"


def test_sample_counts_zero_probability_outcome():
    c = M.sample_counts(np.array([1.0, 0.0]), M.NoiseModel(), np.random.default_rng(0))
    assert c[1] == 0


def test_sample_counts_within_five_sigma():
    for seed in range(20):
        c = M.sample_counts(np.array([0.5, 0.5]), M.NoiseModel(), np.random.default_rng(seed))
        assert np.all(np.abs(c - 5e4) < 5 * np.sqrt(5e4))


def test_sample_counts_rejects_bad_probs():
    with pytest.raises(ValueError):
        M.sample_counts(np.array([0.7, 0.7]), M.NoiseModel(), np.random.default_rng(0))


def test_accidentals_mean():
    noise = M.NoiseModel(accidental_rate=16.0)
    rng = np.random.default_rng(5)
    c = np.array([M.sample_counts(np.array([1.0, 0.0]), noise, rng)[1] for _ in range(2000)])
    assert c.mean() == pytest.approx(16, abs=5 * 4 / np.sqrt(2000))


def test_count_tables_deterministic_and_roundtrip():
    c = fixture("fig2c")
    psi = prepare_state("bell_pp")
    a = M.simulate_count_table(psi, c, M.NoiseModel.lab(), seed=11)
    b = M.simulate_count_table(psi, c, M.NoiseModel.lab(), seed=11)
    assert a.to_json() == b.to_json()
    assert M.CountTable.from_json(a.to_json()).settings == a.settings
    assert len(a.settings) == 9


def test_count_table_rejects_negative():
    with pytest.raises(ValueError):
        M.CountTable.from_dict({"seed": 0, "settings": [{"label": "Z", "outcomes": {"0": -1, "1": 3}}]})


def test_apply_noise_targets():
    c = Circuit(2, (BS((0, 1)), BS((0, 1), 0.3, 0.7), PBS((0, 1)), Phase(1, 0.5)))
    noisy = M.apply_noise(c, M.NoiseModel.lab(), np.random.default_rng(0))
    assert noisy.placements[0].T == 0.52
    assert noisy.placements[1].T == 0.3
    assert noisy.placements[2].extinction == 1000.0
    assert noisy.placements[3].delta != 0.5


def test_apply_noise_ideal_is_identity():
    c = fixture("fig7b")
    assert M.apply_noise(c, M.NoiseModel()) == c


def test_jitter_needs_rng():
    with pytest.raises(ValueError):
        M.apply_noise(Circuit(2, (Phase(0, 0.0),)), M.NoiseModel(phase_jitter_sigma=0.1))


def test_noise_model_validation_and_roundtrip(tmp_path):
    with pytest.raises(ValueError):
        M.NoiseModel(mzi_visibility=1.5)
    with pytest.raises(ValueError):
        M.NoiseModel.from_dict({"bogus": 1})
    p = tmp_path / "n.json"
    import json

    p.write_text(json.dumps(M.NoiseModel().to_dict()))
    assert M.NoiseModel.load(p) == M.NoiseModel()
    assert M.NoiseModel.from_dict(M.NoiseModel.lab().to_dict()) == M.NoiseModel.lab()


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=3, max_size=3), st.integers(0, 1000))
def test_degrade_keeps_distribution(contrasts, seed):
    p = np.random.default_rng(seed).dirichlet(np.ones(8))
    q = M.degrade(p, contrasts)
    assert q.sum() == pytest.approx(1)
    assert np.all(q >= 0)


def test_chsh_ideal_bell():
    assert M.chsh(BELL["phi+"]) == pytest.approx(2 * np.sqrt(2), abs=1e-10)


def test_chsh_dephased():
    rho = dephased_bell("phi+", 0.9794, 0.9794)
    assert M.chsh(rho) == pytest.approx(2.77, abs=0.01)


def test_chsh_classical_mixture_bounded():
    assert abs(M.chsh(dephased_bell("phi+", 1.0, 0.0))) <= 2 + 1e-12


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_chsh_product_states_bounded(seed):
    rng = np.random.default_rng(seed)
    psi = np.kron(random_state(2, rng), random_state(2, rng))
    angles = rng.uniform(0, np.pi, 4)
    assert abs(M.chsh(psi, angles)) <= 2 + 1e-10


def test_derived_rngs_are_independent_and_reproducible():
    a = M.derive_rng(1, 2).random(3)
    assert_allclose(a, M.derive_rng(1, 2).random(3))
    assert not np.allclose(a, M.derive_rng(1, 3).random(3))
