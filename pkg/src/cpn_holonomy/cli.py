"""Command-line front end with machine-readable JSON/CSV output.

Subcommands: connection, holonomy, gate, compile, verify, kick, circuit,
sweep. Angle-valued arguments accept pi-literals such as "pi", "pi/2",
"-3pi/4" alongside plain floats, so areas stay exact. All JSON output is
emitted with sorted keys and fixed layout: identical inputs (including the
seed for randomized sweeps) produce byte-identical bytes.

Exit codes: 0 success, 2 usage/input error, 3 numerical failure (a matrix
failed its unitarity certification).
"""
from __future__ import annotations

import argparse
import json
import re
import sys

import numpy as np

from . import linalg
from .chart import ControlPoint, HamiltonianFamily
from .connection import connection_analytic
from .dynamics import KickPlan, Schedule, adiabatic_transport, kick_evolution, \
    program_schedule, propagate_frames
from .gates import GateProgram, GateStep, compile_u2_block, embed_two_level, \
    named_gate_matrix, primitive_holonomy, realize_step_as_loop, two_qubit_gate
from .holonomy import UnitarityError, holonomy
from .loops import FAMILIES, LoopPath, enclosed_area
from .multipartite import Register, apply_circuit, gate_count

_PI_RE = re.compile(r"^\s*([+-]?)(\d+(?:\.\d*)?)?\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$",
                    re.IGNORECASE)


def parse_angle(text: str) -> float:
    """Float or pi-literal: 'pi', '-pi/2', '3pi/4', '0.5pi', '1.25'."""
    m = _PI_RE.match(text)
    if m:
        sign = -1.0 if m.group(1) == "-" else 1.0
        num = float(m.group(2)) if m.group(2) else 1.0
        den = float(m.group(3)) if m.group(3) else 1.0
        if den == 0:
            raise ValueError(f"zero denominator in angle {text!r}")
        return sign * num * np.pi / den
    try:
        return float(text)
    except ValueError:
        raise ValueError(f"cannot parse angle {text!r}") from None


def parse_angle_list(text: str) -> list[float]:
    return [parse_angle(tok) for tok in text.split(",") if tok.strip()]


def enc_matrix(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def dec_matrix(rows: list) -> np.ndarray:
    return np.array([[complex(re_, im) for re_, im in row] for row in rows])


def dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _emit(args, text: str):
    if args.out and args.out != "-":
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_json_file(path: str):
    with open(path) as fh:
        return json.load(fh)


# ---------- subcommand implementations ----------

def cmd_connection(args) -> str:
    if args.point:
        d = _load_json_file(args.point)
        p = ControlPoint(int(d["n"]), np.array(d["theta"], float), np.array(d["phi"], float))
    else:
        theta = parse_angle_list(args.theta) if args.theta else []
        phi = parse_angle_list(args.phi) if args.phi else [0.0] * len(theta)
        n = args.n or len(theta)
        if not theta:
            theta = [0.0] * n
        if len(phi) < len(theta):
            phi = phi + [0.0] * (len(theta) - len(phi))
        p = ControlPoint(n, np.array(theta), np.array(phi))
    return dump_json(connection_analytic(p).to_json_dict())


def cmd_holonomy(args) -> str:
    loop, segs = LoopPath.from_json_dict(_load_json_file(args.loop))
    if args.segments:
        segs = args.segments
    u = holonomy(loop, segs)
    out = u.to_json_dict()
    if loop.family:
        out["enclosed_area"] = float(enclosed_area(loop, loop.family))
        out["family"] = loop.family
    return dump_json(out)


def cmd_gate(args) -> str:
    program = two_qubit_gate(args.name, sigma1=args.sigma1, sigma3=args.sigma3)
    target = named_gate_matrix(args.name, sigma1=args.sigma1, sigma3=args.sigma3)
    evaluated = program.evaluate()
    integrated = program.evaluate_integrated(args.segments)
    dist = integrated.distance_up_to_phase(target)
    return dump_json({
        "name": args.name.upper(),
        "program": program.to_json_dict(),
        "matrix": enc_matrix(evaluated.matrix),
        "matrix_integrated": enc_matrix(integrated.matrix),
        "target": enc_matrix(target),
        "fidelity": linalg.phase_fidelity(integrated.matrix, target),
        "distance_up_to_phase": dist,
        "within_tol": bool(dist < args.tol),
    })


def cmd_compile(args) -> str:
    d = _load_json_file(args.target)
    target = dec_matrix(d["matrix"] if isinstance(d, dict) else d)
    n = args.n or max(args.beta_bar, 2)
    program = compile_u2_block(target, args.beta, args.beta_bar, n)
    embedded = embed_two_level(target, args.beta, args.beta_bar, n)
    dist = program.evaluate().distance_up_to_phase(embedded)
    return dump_json({
        "program": program.to_json_dict(),
        "matrix": enc_matrix(program.evaluate().matrix),
        "distance_up_to_phase": dist,
        "residual_phase": program.residual_phase,
        "within_tol": bool(dist < args.tol),
    })


def _loop_from_args(args) -> tuple[LoopPath, int]:
    if getattr(args, "loop", None):
        return LoopPath.from_json_dict(_load_json_file(args.loop))
    if getattr(args, "program", None):
        prog = GateProgram.from_json_dict(_load_json_file(args.program))
        return program_schedule(prog), 64
    if getattr(args, "name", None):
        return program_schedule(two_qubit_gate(args.name)), 64
    raise ValueError("need one of --loop, --program or --name")


def cmd_verify(args) -> str:
    if args.time <= 0:
        raise ValueError("--time must be positive")
    loop, segs = _loop_from_args(args)
    fam = HamiltonianFamily(loop.n, args.epsilon0)
    sched = Schedule(loop, args.time, steps=args.steps)
    transport, diag = adiabatic_transport(fam, sched, segments_per_edge=segs)
    report = {"transport": enc_matrix(transport.matrix), **diag.to_json_dict(),
              "within_tol": bool(diag.distance_to_holonomy < args.tol)}
    return dump_json(report)


def cmd_kick(args) -> str:
    loop, _ = _loop_from_args(args)
    n_list = [int(x) for x in args.n_list.split(",") if x.strip()]
    if not n_list:
        raise ValueError("--n-list must contain at least one interval count")
    fam = HamiltonianFamily(loop.n, args.epsilon0)
    ref = propagate_frames(fam, loop, args.time, args.ref_steps)
    rows = []
    for n_int in n_list:
        plan = KickPlan.from_loop(loop, args.time, n_int)
        dist = linalg.max_abs_diff(kick_evolution(fam, plan), ref)
        rows.append((n_int, args.time / n_int, dist))
    if (args.format or "csv") == "json":  # kick is a sweep: CSV unless asked otherwise
        return dump_json({"T": args.time, "ref_steps": args.ref_steps,
                          "rows": [{"N": N, "delta_t": dt, "distance": d}
                                   for N, dt, d in rows]})
    lines = ["N,delta_t,distance"]
    lines += [f"{N},{dt!r},{d!r}" for N, dt, d in rows]
    return "\n".join(lines) + "\n"


def cmd_circuit(args) -> str:
    entries = _load_json_file(args.circuit)
    circuit = []
    for entry in entries:
        gate = entry["gate"]
        if isinstance(gate, dict):
            gate = dec_matrix(gate["matrix"])
        circuit.append(((int(entry["pair"][0]), int(entry["pair"][1])), gate))
    reg = Register(args.qubits, +1 if args.ancilla != "-" else -1)
    state = apply_circuit(reg, circuit, reg.basis_state(args.state))
    cost = gate_count(circuit, args.qubits, monolithic=not args.no_monolithic)
    return dump_json({
        "state": [[float(z.real), float(z.imag)] for z in state],
        "ancilla_minus_weight": reg.ancilla_minus_weight(state),
        "cost": cost.to_json_dict(),
    })


def cmd_sweep(args) -> str:
    rng = np.random.default_rng(args.seed)
    rows: list[dict] = []
    if args.kind == "random-rects":
        for case in range(args.cases):
            family = args.family or str(rng.choice(FAMILIES))
            n = args.n or 4
            if family == "C1":
                beta, beta_bar = int(rng.integers(1, n + 1)), None
            elif family == "C2":
                beta = int(rng.integers(1, n))
                beta_bar = int(rng.integers(beta + 1, n + 1))
            else:
                beta, beta_bar = rng.choice(np.arange(1, n + 1), size=2, replace=False)
                beta, beta_bar = int(beta), int(beta_bar)
            hi = 1.4 if family in ("C3", "C4") else 3.0
            area = float(rng.uniform(-hi, hi))
            step = GateStep(family, beta, beta_bar, area)
            loop = realize_step_as_loop(step, n)
            dist = holonomy(loop, args.segments).distance(primitive_holonomy(step, n).matrix)
            rows.append({"case": case, "family": family, "beta": beta,
                         "beta_bar": beta_bar, "area": area, "distance": dist})
    elif args.kind == "segments":
        loop, _ = _loop_from_args(args)
        if not loop.family:
            raise ValueError("segments sweep needs a family-tagged loop")
        area = enclosed_area(loop, loop.family)
        tag = loop.plane.axes()
        beta = tag[0][1]
        beta_bar = tag[1][1] if tag[1][1] != beta else None
        ref = primitive_holonomy(GateStep(loop.family, beta, beta_bar, area), loop.n).matrix
        segs = args.segments
        for _ in range(args.cases):
            rows.append({"segments_per_edge": segs,
                         "distance": holonomy(loop, segs).distance(ref)})
            segs *= 2
    else:
        raise ValueError(f"unknown sweep kind {args.kind!r}")
    if (args.format or "json") == "csv":
        keys = list(rows[0].keys())
        lines = [",".join(keys)]
        lines += [",".join(repr(r[k]) if isinstance(r[k], float) else str(r[k]) for k in keys)
                  for r in rows]
        return "\n".join(lines) + "\n"
    return dump_json({"kind": args.kind, "seed": args.seed, "rows": rows})


# ---------- parser ----------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cpn-holo",
        description="Holonomic gates on the CP^n control manifold: connection, "
                    "holonomies, gate programs and dynamical verification.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=None, help="code dimension")
    common.add_argument("--tol", type=float, default=1e-6, help="report tolerance")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized sweeps")
    common.add_argument("--out", default="-", help="output path ('-' for stdout)")
    common.add_argument("--format", choices=("json", "csv"), default=None,
                        help="output format (default json; kick defaults to csv)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("connection", parents=[common],
                       help="dump the connection components at a chart point")
    p.add_argument("--point", help="JSON file {n, theta, phi}")
    p.add_argument("--theta", help="comma-separated angles (pi-literals ok)")
    p.add_argument("--phi", help="comma-separated angles")
    p.set_defaults(func=cmd_connection)

    p = sub.add_parser("holonomy", parents=[common], help="integrate a loop JSON file")
    p.add_argument("--loop", required=True)
    p.add_argument("--segments", type=int, default=None)
    p.set_defaults(func=cmd_holonomy)

    p = sub.add_parser("gate", parents=[common], help="emit and evaluate a named gate program")
    p.add_argument("--name", required=True, help="XOR|CROT|SWAP|PHASE1|PHASE2|UPH1")
    p.add_argument("--sigma1", type=parse_angle, default=np.pi / 4)
    p.add_argument("--sigma3", type=parse_angle, default=np.pi / 4)
    p.add_argument("--segments", type=int, default=128)
    p.set_defaults(func=cmd_gate)

    p = sub.add_parser("compile", parents=[common], help="compile a 2x2 target onto a block")
    p.add_argument("--target", required=True, help="JSON file with 2x2 'matrix' of [re,im]")
    p.add_argument("--beta", type=int, required=True)
    p.add_argument("--beta-bar", dest="beta_bar", type=int, required=True)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("verify", parents=[common],
                       help="adiabatic-transport report for a loop or program")
    p.add_argument("--loop")
    p.add_argument("--program")
    p.add_argument("--name", help="named two-qubit gate")
    p.add_argument("--time", type=parse_angle, required=True, help="total time (units 1/eps0)")
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--epsilon0", type=float, default=1.0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("kick", parents=[common], help="kick-scheme convergence table")
    p.add_argument("--loop")
    p.add_argument("--program")
    p.add_argument("--name")
    p.add_argument("--n-list", dest="n_list", required=True,
                   help="comma-separated interval counts, e.g. 250,500,1000")
    p.add_argument("--time", type=parse_angle, default=40.0)
    p.add_argument("--ref-steps", dest="ref_steps", type=int, default=16384)
    p.add_argument("--epsilon0", type=float, default=1.0)
    p.set_defaults(func=cmd_kick)

    p = sub.add_parser("circuit", parents=[common], help="run a local-gate circuit on a register")
    p.add_argument("--circuit", required=True, help="JSON list of {pair, gate}")
    p.add_argument("--qubits", type=int, required=True)
    p.add_argument("--state", required=True, help="initial bit string, e.g. 010")
    p.add_argument("--ancilla", choices=("+", "-"), default="+")
    p.add_argument("--no-monolithic", action="store_true")
    p.set_defaults(func=cmd_circuit)

    p = sub.add_parser("sweep", parents=[common], help="randomized/convergence sweeps")
    p.add_argument("--kind", choices=("random-rects", "segments"), default="random-rects")
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--cases", type=int, default=8)
    p.add_argument("--segments", type=int, default=64)
    p.add_argument("--loop")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = args.func(args)
    except UnitarityError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except (ValueError, KeyError, OSError, json.JSONDecodeError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _emit(args, text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
