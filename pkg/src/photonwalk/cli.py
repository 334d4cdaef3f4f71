"""Command-line entry point: ``photonwalk <command> [options]``.

Exit status is 0 on success, 1 when a threshold check fails and 2 for bad
input. Every command is deterministic for a fixed ``--seed`` (default 0).
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import ghz, tomo, walklab
from .circuit import (
    Circuit,
    circuit_from_dict,
    fixture_data,
    gate_check,
    load_circuit,
    parse_gate,
    path_label,
    prepare_state,
)
from .measure import NoiseModel, fit_fringe, mzi_scan
from .optics import CoinParams
from .qcore import density

DEFAULT_SEED = 0
DEFAULT_THRESHOLD = 1 - 1e-9


class InputError(Exception):
    """Bad command-line input; maps to exit status 2."""


class ThresholdFailure(Exception):
    """A requested quality threshold was not met; maps to exit status 1."""


def _load_circuit(ref: str) -> tuple[Circuit, dict]:
    """Circuit from a file path, or from a shipped fixture name such as ``fig2a``."""
    path = Path(ref)
    if path.is_file():
        data = json.loads(path.read_text())
        return load_circuit(path), data
    if path.suffix == "" and "/" not in ref:
        data = fixture_data(ref)
        return circuit_from_dict(data), data
    raise InputError(f"circuit file not found: {ref}")


def _load_noise(ref: str | None, counts: float | None) -> NoiseModel:
    if ref is None:
        noise = NoiseModel()
    elif Path(ref).is_file():
        noise = NoiseModel.load(ref)
    elif ref in ("lab", "ideal"):
        noise = NoiseModel.lab() if ref == "lab" else NoiseModel()
    else:
        raise InputError(f"noise file not found: {ref}")
    return noise if counts is None else replace(noise, mean_counts=float(counts))


def _input_state(spec: str | None, data: dict, paths: int) -> np.ndarray:
    spec = spec or data.get("test_input") or "H0"
    if "," in spec:
        try:
            amps = [complex(a.replace(" ", "")) for a in spec.split(",")]
        except ValueError as exc:
            raise InputError(f"cannot parse amplitudes {spec!r}") from exc
        return prepare_state(amps, paths)
    return prepare_state(spec, paths)


def _complex_list(v: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in np.ravel(v)]


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def cmd_simulate(args) -> str:
    circuit, data = _load_circuit(args.circuit)
    reg = circuit.register
    psi = _input_state(args.input, data, circuit.paths)
    out_state = circuit.apply(psi)
    report = {"paths": circuit.paths, "amplitudes": _complex_list(out_state)}
    report["probabilities"] = [float(abs(a) ** 2) for a in out_state]
    if args.qubits:
        n = reg.require_qubits()
        report["basis"] = [f"{'HV'[s]}{path_label(l, circuit.paths)}" for s in (0, 1) for l in range(circuit.paths)]
        report["n_qubits"] = n
    if args.density:
        report["density"] = [_complex_list(row) for row in density(out_state)]
    return _dump(report)


def cmd_gatecheck(args) -> str:
    circuit, data = _load_circuit(args.circuit)
    n = circuit.register.require_qubits()
    gate = args.gate or data.get("ideal")
    if not gate:
        raise InputError("no ideal gate given and the circuit file names none")
    check = gate_check(circuit, parse_gate(gate, n))
    threshold = DEFAULT_THRESHOLD if args.threshold is None else args.threshold
    passed = check.process_fidelity >= threshold
    report = {
        "gate": gate,
        "process_fidelity": check.process_fidelity,
        "phase": check.phase,
        "threshold": threshold,
        "passed": passed,
    }
    if not passed:
        raise ThresholdFailure(_dump(report))
    return _dump(report)


def cmd_tomography(args) -> str:
    circuit, data = _load_circuit(args.circuit)
    psi = _input_state(args.input, data, circuit.paths)
    noise = _load_noise(args.noise, args.counts)
    result, counts = tomo.gate_tomography(
        circuit, psi, noise, args.seed, args.method, resamples=args.resamples
    )
    report = result.to_dict()
    report["seed"] = args.seed
    report["noise"] = noise.to_dict()
    report["counts"] = counts.to_dict()
    text = _dump(report)
    if args.threshold is not None and result.fidelity[0] < args.threshold:
        raise ThresholdFailure(text)
    return text


def cmd_ghz(args) -> str:
    ref = args.config
    path = Path(ref)
    if path.is_file():
        config, base = json.loads(path.read_text()), path.parent
    elif ref in ("lab", "ideal"):
        config, base = fixture_data(f"ghz_{ref}"), None
    else:
        raise InputError(f"ghz config not found: {ref}")
    if args.noise is not None:
        config = dict(config, noise=_load_noise(args.noise, None).to_dict())
    if args.counts is not None:
        config = dict(config, noise=dict(config.get("noise", {}), mean_counts=float(args.counts)))
    seed = args.seed if args.seed_given else config.get("seed", DEFAULT_SEED)
    report = ghz.run_experiment(config, base=base, seed=seed)
    return _dump(report)


def cmd_scan_mzi(args) -> str:
    noise = _load_noise(args.noise, args.counts)
    if args.visibility is not None:
        noise = replace(noise, mzi_visibility=args.visibility)
    phases = np.linspace(0.0, 2 * math.pi, args.points, endpoint=False)
    table = mzi_scan(phases, noise, args.seed)
    fit = fit_fringe(table.phases, table.port1)
    print(f"fitted visibility {fit.visibility:.6f}", file=sys.stderr)
    if args.threshold is not None and args.visibility is not None:
        if abs(fit.visibility - args.visibility) > args.threshold:
            raise ThresholdFailure(table.to_csv())
    return table.to_csv()


def _floats(text: str, n: int, what: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise InputError(f"{what}: expected {n} comma-separated numbers, got {text!r}") from exc
    if len(values) != n:
        raise InputError(f"{what}: expected {n} numbers, got {len(values)}")
    return values


def cmd_walk(args) -> str:
    coin = CoinParams(*_floats(args.coin, 4, "--coin")) if args.coin else CoinParams.hadamard_type()
    a_re, a_im, b_re, b_im = _floats(args.init, 4, "--init")
    cfg = walklab.WalkConfig(args.steps, args.positions, coin, complex(a_re, a_im), complex(b_re, b_im), args.pos)
    probs = walklab.position_distribution(walklab.evolve(cfg), cfg.positions)
    return walklab.distribution_csv(probs)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help=f"random seed (default {DEFAULT_SEED})")
    common.add_argument("--noise", help="noise model JSON file, or 'lab' / 'ideal'")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--counts", type=float, help="mean counts per setting")
    common.add_argument("--method", choices=("mle", "linear"), default="mle")
    common.add_argument("--resamples", type=int, default=0, help="bootstrap resamples for error bars")
    common.add_argument("--threshold", type=float, help="pass/fail threshold (exit 1 on failure)")

    parser = argparse.ArgumentParser(prog="photonwalk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="apply a circuit to an input state")
    p.add_argument("circuit", help="circuit JSON file or fixture name")
    p.add_argument("--input", help="preset name or comma-separated amplitudes")
    p.add_argument("--density", action="store_true", help="also print the density matrix")
    p.add_argument("--qubits", action="store_true", help="label outcomes as qubits (needs 2^k paths)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gatecheck", parents=[common], help="compare a circuit with an ideal gate")
    p.add_argument("circuit")
    p.add_argument("gate", nargs="?", help="gate expression with 1-based qubits, e.g. 'CNOT(1,2)'")
    p.set_defaults(func=cmd_gatecheck)

    p = sub.add_parser("tomography", parents=[common], help="simulated state tomography of a circuit output")
    p.add_argument("circuit")
    p.add_argument("--input", help="preset name or comma-separated amplitudes")
    p.set_defaults(func=cmd_tomography)

    p = sub.add_parser("ghz", parents=[common], help="six-qubit GHZ experiment from a config file")
    p.add_argument("config", help="config JSON file, or 'lab' / 'ideal'")
    p.set_defaults(func=cmd_ghz)

    p = sub.add_parser("scan-mzi", parents=[common], help="Mach-Zehnder phase scan as CSV")
    p.add_argument("--visibility", type=float)
    p.add_argument("--points", type=int, default=50)
    p.set_defaults(func=cmd_scan_mzi)

    p = sub.add_parser("walk", parents=[common], help="coined walk position distribution as CSV")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--positions", type=int, required=True)
    p.add_argument("--coin", help="tau,eta,zeta,theta (default Hadamard-type)")
    p.add_argument("--init", default="1,0,0,0", help="alpha_re,alpha_im,beta_re,beta_im")
    p.add_argument("--pos", type=int, default=0)
    p.set_defaults(func=cmd_walk)
    return parser


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.seed_given = args.seed is not None
    args.seed = DEFAULT_SEED if args.seed is None else args.seed
    try:
        _emit(args.func(args), args.out)
    except ThresholdFailure as exc:
        _emit(str(exc), args.out)
        return 1
    except (InputError, ValueError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"photonwalk {args.command}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
