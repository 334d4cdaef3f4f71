import csv
import io
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from photonwalk import optics, walklab
from photonwalk.circuit import compile_circuit
from photonwalk.optics import CoinParams

DATA = Path(__file__).parent / "data"
S2 = 1 / np.sqrt(2)


def oracle(cfg):
    return np.linalg.matrix_power(optics.walk_step(cfg.coin, cfg.positions), cfg.steps) @ cfg.initial_state()


def random_coin(rng):
    return CoinParams(*rng.uniform(-np.pi, np.pi, 4))


def test_zero_steps_is_initial_state():
    cfg = walklab.WalkConfig(0, 8, alpha=S2, beta=S2, l0=3)
    assert_allclose(walklab.evolve(cfg), cfg.initial_state())


def test_trivial_coin_moves_h_left():
    cfg = walklab.WalkConfig(1, 8, CoinParams(), l0=4)
    out = walklab.evolve(cfg)
    assert out[3] == pytest.approx(1)


def test_trivial_coin_moves_v_right_with_wrap():
    cfg = walklab.WalkConfig(1, 8, CoinParams(), alpha=0, beta=1, l0=7)
    out = walklab.evolve(cfg)
    assert out[8 + 0] == pytest.approx(1)


@pytest.mark.parametrize("m", [8, 16, 32])
def test_matches_matrix_power_oracle(m, rng):
    for _ in range(5):
        coin = random_coin(rng)
        a, b = rng.normal(size=2) + 1j * rng.normal(size=2)
        norm = np.sqrt(abs(a) ** 2 + abs(b) ** 2)
        for t in range(11):
            cfg = walklab.WalkConfig(t, m, coin, a / norm, b / norm, int(rng.integers(m)))
            assert np.max(np.abs(walklab.evolve(cfg) - oracle(cfg))) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 40), st.integers(3, 20), st.integers(0, 2**31 - 1))
def test_norm_preserved(t, m, seed):
    rng = np.random.default_rng(seed)
    cfg = walklab.WalkConfig(t, m, random_coin(rng), S2, 1j * S2, int(rng.integers(m)))
    psi = walklab.evolve(cfg)
    assert np.linalg.norm(psi) == pytest.approx(1, abs=1e-12)
    assert walklab.position_distribution(psi, m).sum() == pytest.approx(1, abs=1e-10)


def test_symmetric_initial_state_gives_symmetric_distribution():
    m, l0 = 41, 20
    for t in range(15):
        cfg = walklab.WalkConfig(t, m, CoinParams.hadamard_type(), S2, 1j * S2, l0)
        p = walklab.position_distribution(walklab.evolve(cfg), m)
        assert_allclose(p[l0 - 15:l0 + 16], p[l0 - 15:l0 + 16][::-1], atol=1e-12)


def test_cycle_equals_line_before_wrapping(rng):
    coin = random_coin(rng)
    t, m, big = 6, 16, 200
    small = walklab.position_distribution(walklab.evolve(walklab.WalkConfig(t, m, coin, S2, S2, m // 2)), m)
    line = walklab.position_distribution(walklab.evolve(walklab.WalkConfig(t, big, coin, S2, S2, big // 2)), big)
    assert_allclose(small, line[big // 2 - m // 2:big // 2 + m // 2], atol=1e-12)


def test_walk_circuit_matches_walk_step(rng):
    coin = random_coin(rng)
    for m in (3, 4, 8):
        u = compile_circuit(walklab.walk_circuit(coin, m))
        assert_allclose(u, optics.walk_step(coin, m), atol=1e-12)


def test_position_distribution_delta():
    psi = np.zeros(16)
    psi[3] = 1
    assert_allclose(walklab.position_distribution(psi, 8), np.eye(8)[3])
    with pytest.raises(ValueError):
        walklab.position_distribution(psi, 5)


def test_config_validation():
    with pytest.raises(ValueError):
        walklab.WalkConfig(-1, 8)
    with pytest.raises(ValueError):
        walklab.WalkConfig(1, 2)
    with pytest.raises(ValueError):
        walklab.WalkConfig(1, 8, l0=8)
    with pytest.raises(ValueError):
        walklab.WalkConfig(1, 8, alpha=1, beta=1)


def test_oracle_csv_fixture():
    cfg = walklab.WalkConfig(5, 16, CoinParams.hadamard_type(), S2, 1j * S2, 8)
    text = walklab.distribution_csv(walklab.position_distribution(walklab.evolve(cfg), 16))
    got = list(csv.DictReader(io.StringIO(text)))
    want = list(csv.DictReader((DATA / "walk_t5_m16.csv").open()))
    assert [r["position"] for r in got] == [r["position"] for r in want]
    assert_allclose([float(r["probability"]) for r in got], [float(r["probability"]) for r in want], atol=1e-12)
