"""Photonic quantum walks and quantum-logic circuits in a polarization-path register."""
from . import circuit, ghz, measure, optics, qcore, tomo, walklab
from .circuit import Circuit, PhotonicRegister, compile_circuit, fixture, gate_check, ideal_gate, parse_gate
from .measure import NoiseModel
from .optics import CoinParams

__version__ = "0.1.0"

__all__ = [
    "Circuit",
    "CoinParams",
    "NoiseModel",
    "PhotonicRegister",
    "circuit",
    "compile_circuit",
    "fixture",
    "gate_check",
    "ghz",
    "ideal_gate",
    "measure",
    "optics",
    "parse_gate",
    "qcore",
    "tomo",
    "walklab",
]
