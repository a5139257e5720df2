"""Command-line front end.

Exit codes: 0 success, 2 validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import cycles, sweep, thermodynamics
from .errors import NumericalError, ValidationError
from .spin_model import PRESETS, MagneticField, load_params, preset, unit_vector

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


def _floats(text, n=None, what="value"):
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise ValidationError(f"cannot parse {what} {text!r}") from None
    if n is not None and len(values) not in n:
        raise ValidationError(f"{what} {text!r} needs {' or '.join(map(str, n))} numbers")
    if not all(math.isfinite(v) for v in values):
        raise ValidationError(f"{what} {text!r} must be finite")
    return values


def parse_field(text, direction):
    """``bx,by,bz`` as a vector, or a bare magnitude along ``direction``."""
    values = _floats(text, (1, 3), "field")
    if len(values) == 3:
        return MagneticField(*values)
    return MagneticField.along(direction, values[0])


def _pair(text, what):
    lo, hi = _floats(text, (2,), what)
    return lo, hi


def _grid(text, variable):
    lo, hi, count = _floats(text, (3,), f"{variable} grid")
    if count != int(count):
        raise ValidationError(f"{variable} grid count must be an integer")
    return sweep.GridAxis(variable, lo, hi, int(count))


def _params(args):
    if args.params:
        return load_params(args.params)
    return preset(args.compound or "cu3-as")


def _direction(args):
    return tuple(unit_vector(_floats(args.direction, (3,), "direction")))


def _g6(x):
    return "nan" if x is None else f"{x:.6g}"


def _full(x):
    return "nan" if x is None else f"{x:.17g}"


def _write(args, data):
    if getattr(args, "output", None):
        with open(args.output, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def cmd_spectrum(args):
    direction = _direction(args)
    field = parse_field(args.field, direction)
    spec = thermodynamics.spectrum_at(_params(args), field)
    fmt = "{:.17g}" if args.format == "csv" else "{:.12g}"
    lines = ["energy_K"] if args.format == "csv" else []
    lines += [fmt.format(e) for e in spec.eigenvalues]
    _write(args, ("\n".join(lines) + "\n").encode())


def cmd_thermo(args):
    direction = _direction(args)
    field = parse_field(args.field, direction)
    point = thermodynamics.thermo_point(_params(args), args.temperature, field)
    fmt = _full if args.format == "csv" else _g6
    rows = [("U", point.internal_energy), ("S", point.entropy), ("lnZ", point.log_z)]
    rows += [(f"p{i + 1}", p) for i, p in enumerate(point.probs)]
    if args.format == "csv":
        text = "quantity,value\n" + "".join(f"{k},{fmt(v)}\n" for k, v in rows)
    else:
        units = {"U": " K", "S": " k_B"}
        text = "".join(f"{k:<4}= {fmt(v)}{units.get(k, '')}\n" for k, v in rows)
    _write(args, text.encode())


def _cycle_report(result, args):
    lines = [
        f"{result.kind} cycle  T_l={args.tl:g} K  T_h={args.th:g} K  "
        f"B0={args.b0:g} T  B1={args.b1:g} T"
    ]
    if result.strokes is None:
        lines.append("stroke detail unavailable (intermediate field outside bracket)")
    else:
        if result.intermediate_fields is not None:
            b_b, b_d = result.intermediate_fields
            lines.append(f"intermediate fields: B_b={_g6(b_b)} T  B_d={_g6(b_d)} T")
        lines.append(f"{'stroke':<7}{'kind':<12}{'heat':>14}{'work':>14}{'dU':>14}")
        for s in result.strokes:
            lines.append(
                f"{s.label:<7}{s.kind:<12}{_g6(s.heat):>14}{_g6(s.work):>14}{_g6(s.delta_u):>14}"
            )
    lines += [
        f"w_net = {_g6(result.w_net)} K",
        f"q_in  = {_g6(result.q_in)} K   (hot bath)",
        f"q_out = {_g6(result.q_out)} K   (cold bath)",
        f"mode  = {result.mode}",
    ]
    if result.efficiency is not None:
        lines.append(f"eta   = {_g6(result.efficiency)}")
    if result.cop is not None:
        lines.append(f"COP   = {_g6(result.cop)}")
        lines.append(f"kappa = {_g6(result.kappa)}")
    lines.append(f"closure |w_net - (q_in + q_out)| = {result.closure_error:.3e}")
    return "\n".join(lines) + "\n"


def cmd_cycle(args):
    params = _params(args)
    direction = _direction(args)
    kwargs = {"tol": args.tol}
    if args.kind == "carnot":
        kwargs["bracket"] = _pair(args.field_bracket, "field bracket")
    result = cycles.run_cycle(args.kind, params, args.tl, args.th, args.b0, args.b1,
                              direction, **kwargs)
    if args.format == "csv":
        cell = sweep._cell_from_result(args.b0, args.b1, result)
        text = sweep.CSV_HEADER + "\n" + sweep.csv_row(cell, args.tol) + "\n"
    else:
        text = _cycle_report(result, args)
    _write(args, text.encode())


def cmd_sweep(args):
    params = _params(args)
    direction = _direction(args)
    if args.plane == "b0b1":
        if args.th is None:
            raise ValidationError("sweep b0b1 needs --th")
        result = sweep.sweep_b0_b1(
            params, args.tl, args.th,
            _grid(args.b0_grid, "B0"), _grid(args.b1_grid, "B1"),
            args.kind, direction, tol=args.tol, workers=args.workers,
        )
    else:
        if args.th_grid is None:
            raise ValidationError("sweep b1th needs --th-grid")
        result = sweep.sweep_b1_th(
            params, args.tl, args.b0,
            _grid(args.b1_grid, "B1"), _grid(args.th_grid, "Th"),
            args.kind, direction, tol=args.tol, workers=args.workers,
        )
    if args.format == "pgm":
        data = sweep.export_pgm(result, args.layer)
    else:
        data = sweep.export_csv(result)
    _write(args, data)
    if args.pgm:
        with open(args.pgm, "wb") as fh:
            fh.write(sweep.export_pgm(result, args.layer))
    counts = " ".join(f"{k}={v}" for k, v in result.diagnostics.items())
    print(f"modes: {counts}", file=sys.stderr)
    if result.diagnostics[sweep.ERROR] == len(result.cells):
        print("every cell failed", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_isentrope(args):
    if args.steps < 2:
        raise ValidationError("--steps must be >= 2")
    params = _params(args)
    direction = _direction(args)
    grid = np.linspace(args.b0, args.b_max, args.steps)
    field0 = MagneticField(*(args.b0 * np.asarray(direction)))
    if not args.t0 > 0:
        raise ValidationError(f"--t0 must be > 0, got {args.t0}")
    points = thermodynamics.trace_isentrope(
        params, (args.t0, field0), grid, direction, _pair(args.t_bracket, "temperature bracket")
    )
    text = "B,T\n" + "".join(f"{_full(b)},{_full(t)}\n" for b, t in points)
    _write(args, text.encode())


def cmd_preset(args):
    if args.action == "list":
        text = "\n".join(sorted(PRESETS)) + "\n"
    else:
        if not args.name:
            raise ValidationError("preset show needs a preset name")
        text = json.dumps(preset(args.name).to_dict(), indent=2) + "\n"
    _write(args, text.encode())


def build_parser():
    source = argparse.ArgumentParser(add_help=False)
    group = source.add_mutually_exclusive_group()
    group.add_argument("--compound", help="preset name (default cu3-as)")
    group.add_argument("--params", help="path to a JSON parameter file")
    source.add_argument("--direction", default="0,0,1",
                        help="field direction as x,y,z (normalized; default 0,0,1)")
    source.add_argument("--output", "-o", help="output file (default stdout)")

    parser = argparse.ArgumentParser(
        prog="trimer-machines",
        description="Spin-trimer thermodynamics and reversible quantum cycles.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[source], help="eigenvalues at one field")
    p.add_argument("--field", default="0", help="bx,by,bz or a magnitude along --direction")
    p.add_argument("--format", choices=("human", "csv"), default="human")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("thermo", parents=[source], help="U, S and populations")
    p.add_argument("--field", default="0")
    p.add_argument("--temperature", "-T", type=float, required=True)
    p.add_argument("--format", choices=("human", "csv"), default="human")
    p.set_defaults(func=cmd_thermo)

    p = sub.add_parser("cycle", parents=[source], help="evaluate a single cycle")
    p.add_argument("kind", choices=cycles.CYCLE_KINDS)
    p.add_argument("--tl", type=float, required=True)
    p.add_argument("--th", type=float, required=True)
    p.add_argument("--b0", type=float, required=True)
    p.add_argument("--b1", type=float, required=True)
    p.add_argument("--field-bracket", default="0,10",
                   help="bracket for the Carnot intermediate fields (default 0,10)")
    p.add_argument("--tol", type=float, default=cycles.CLASSIFY_TOL)
    p.add_argument("--format", choices=("human", "csv"), default="human")
    p.set_defaults(func=cmd_cycle)

    p = sub.add_parser("sweep", parents=[source], help="2-D mode / efficiency map")
    p.add_argument("kind", choices=cycles.CYCLE_KINDS)
    p.add_argument("plane", choices=("b0b1", "b1th"))
    p.add_argument("--tl", type=float, required=True)
    p.add_argument("--th", type=float, help="hot bath temperature (b0b1 plane)")
    p.add_argument("--b0", type=float, default=0.0, help="fixed B0 (b1th plane)")
    p.add_argument("--b0-grid", default="0,6,200", help="min,max,count")
    p.add_argument("--b1-grid", default="0,6,200", help="min,max,count")
    p.add_argument("--th-grid", help="min,max,count (b1th plane)")
    p.add_argument("--format", choices=("csv", "pgm"), default="csv")
    p.add_argument("--layer", choices=("mode", "efficiency"), default="mode")
    p.add_argument("--pgm", help="also write a PGM of --layer to this path")
    p.add_argument("--tol", type=float, default=cycles.CLASSIFY_TOL)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("isentrope", parents=[source], help="trace T(B) at constant entropy")
    p.add_argument("--t0", type=float, required=True)
    p.add_argument("--b0", type=float, default=0.0)
    p.add_argument("--b-max", type=float, required=True)
    p.add_argument("--steps", type=int, default=61)
    p.add_argument("--t-bracket", default="1e-3,50")
    p.set_defaults(func=cmd_isentrope)

    p = sub.add_parser("preset", help="list or show compound presets")
    p.add_argument("action", choices=("list", "show"))
    p.add_argument("name", nargs="?")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_preset)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args) or EXIT_OK
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
