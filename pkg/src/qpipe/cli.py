"""Command-line surface: encode/decode runs, edge detection, resource tables,
threshold sweeps and synthetic image generation.

Thin by design — every command parses arguments, calls the library and
writes files.  Exit codes: 0 success, 2 bad input (arguments, files,
values), 3 qubit cap exceeded; diagnostics go to stderr.  Identical
arguments and seed produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import generators
from .circuit import build_qpipe, serialize_circuit, simulate
from .complexity import emit_scaling_table
from .imageio import read_image, write_image, write_text_atomic
from .phasemap import Image, MappingKind, MappingMode, ShiftFill, default_i_range, map_phases
from .qed import Direction, run_qed, threshold_sweep
from .readout import ThresholdPolicy, decode_table, parse_threshold_spec
from .statevector import RegisterLayout, ResourceLimitError, marginal_distribution

__all__ = ["build_parser", "main"]

_DEFAULT_SWEEP = "1e-1,1e-2,1e-3,1e-4,1e-5,1e-6"


def _add_common_quantum_args(sub: argparse.ArgumentParser, default_mode: str) -> None:
    sub.add_argument("--qubits-estimation", type=int, default=8, metavar="Q",
                     help="estimation register size (default: 8)")
    sub.add_argument("--mode", choices=[m.value for m in MappingKind], default=default_mode,
                     help=f"intensity-to-phase mapping (default: {default_mode})")
    sub.add_argument("--i-range", type=float, default=None, metavar="R",
                     help="normalization denominator (default: 2**bit-depth hint, "
                          "else max intensity + 1)")
    sub.add_argument("--threshold", type=parse_threshold_spec,
                     default=ThresholdPolicy.dynamic(), metavar="SPEC",
                     help="readout threshold: fixed:<p> or "
                          "dynamic[:eta=<v>,w=<v>] (default: dynamic)")
    sub.add_argument("--qubit-cap", type=int, default=None, metavar="CAP",
                     help="override the simulator qubit cap (also via QPIPE_QUBIT_CAP)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qpipe",
        description="Phase-injection pixel encoding: simulate, decode, estimate resources.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    enc = commands.add_parser("encode", help="encode one image and decode it back to a CSV table")
    enc.add_argument("--input", required=True, help="input image (.pgm ASCII or .csv)")
    enc.add_argument("--output", required=True, help="readout CSV path")
    enc.add_argument("--dump-circuit", metavar="PATH", default=None,
                     help="also write the gate list as plain text")
    _add_common_quantum_args(enc, default_mode="full")
    enc.set_defaults(handler=cmd_encode)

    qed = commands.add_parser("qed", help="quantum edge detection versus the classical baseline")
    qed.add_argument("--input", required=True)
    qed.add_argument("--output-prefix", required=True, metavar="PREFIX",
                     help="writes PREFIX.json plus PREFIX_<direction>.csv gradient images")
    qed.add_argument("--directions", default="all",
                     help="comma-separated subset of horizontal,vertical,sobel (default: all)")
    qed.add_argument("--fill", choices=[f.value for f in ShiftFill], default="zero",
                     help="border fill for the shifted image (default: zero)")
    qed.add_argument("--mae-include-annihilated-as-zero", action="store_true",
                     help="count annihilated pixels as zero instead of excluding them")
    _add_common_quantum_args(qed, default_mode="half")
    qed.set_defaults(handler=cmd_qed)

    comp = commands.add_parser("complexity", help="gate-count scaling table for k-by-k images")
    comp.add_argument("--output", required=True)
    comp.add_argument("--qubits-estimation", type=int, default=8, metavar="Q")
    comp.add_argument("--k-min", type=int, default=2)
    comp.add_argument("--k-max", type=int, default=256)
    comp.set_defaults(handler=cmd_complexity)

    sweep = commands.add_parser("threshold-sweep",
                                help="error versus readout threshold on one image")
    sweep.add_argument("--input", required=True)
    sweep.add_argument("--output", required=True)
    sweep.add_argument("--thresholds", default=_DEFAULT_SWEEP,
                       help=f"comma-separated fixed thresholds (default: {_DEFAULT_SWEEP})")
    sweep.add_argument("--no-dynamic-row", action="store_true",
                       help="skip the extra dynamic-threshold row")
    sweep.add_argument("--direction", choices=[d.value for d in Direction], default="sobel")
    sweep.add_argument("--fill", choices=[f.value for f in ShiftFill], default="zero")
    _add_common_quantum_args(sweep, default_mode="half")
    sweep.set_defaults(handler=cmd_threshold_sweep)

    gen = commands.add_parser("gen", help="write a seeded synthetic image")
    gen.add_argument("--generator", required=True, choices=sorted(generators.GENERATORS))
    gen.add_argument("--output", required=True)
    gen.add_argument("--width", type=int, required=True)
    gen.add_argument("--height", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0, help="64-bit generator seed (default: 0)")
    gen.add_argument("--sigma", type=float, default=0.1,
                     help="speckle noise level for phantom-speckle (default: 0.1)")
    gen.add_argument("--high", type=float, default=200.0, help="step high level (default: 200)")
    gen.add_argument("--low", type=float, default=0.0, help="step low level (default: 0)")
    gen.add_argument("--split", type=int, default=None, help="step boundary column")
    gen.add_argument("--i-range", type=float, default=256.0)
    gen.add_argument("--format", choices=["pgm", "csv"], default=None,
                     help="output format (default: from the output extension)")
    gen.set_defaults(handler=cmd_gen)

    return parser


def _load_image(args) -> tuple[Image, float]:
    image = read_image(args.input)
    i_range = args.i_range if args.i_range is not None else default_i_range(image)
    return image, i_range


def cmd_encode(args) -> int:
    image, i_range = _load_image(args)
    mode = MappingMode(MappingKind(args.mode), i_range)
    phases = map_phases(image, mode)
    layout = RegisterLayout(q=args.qubits_estimation, n=phases.n)
    circuit = build_qpipe(layout, phases)
    state = simulate(circuit, args.qubit_cap)
    table = decode_table(marginal_distribution(state, layout), layout, args.threshold, mode)
    if args.dump_circuit:
        write_text_atomic(args.dump_circuit, serialize_circuit(circuit))
    write_text_atomic(args.output, table.to_csv(image.width, image.height))
    return 0


def _parse_directions(text: str) -> list[Direction]:
    if text.strip().lower() == "all":
        return [Direction.HORIZONTAL, Direction.VERTICAL, Direction.SOBEL]
    out = []
    for item in text.split(","):
        item = item.strip().lower()
        if not item:
            continue
        out.append(Direction(item))
    if not out:
        raise ValueError("no directions given")
    return out


def cmd_qed(args) -> int:
    image, i_range = _load_image(args)
    report = run_qed(
        image,
        q=args.qubits_estimation,
        policy=args.threshold,
        directions=_parse_directions(args.directions),
        fill=ShiftFill(args.fill),
        mapping=MappingKind(args.mode),
        i_range=i_range,
        include_annihilated_as_zero=args.mae_include_annihilated_as_zero,
        qubit_cap=args.qubit_cap,
    )
    prefix = Path(args.output_prefix)
    write_text_atomic(prefix.parent / (prefix.name + ".json"),
                      json.dumps(report.to_json_dict(), indent=2, sort_keys=True) + "\n")
    for direction, result in report.results.items():
        rows = [",".join(f"{v:.17g}" for v in row) for row in result.quantum.values]
        out = prefix.parent / f"{prefix.name}_{direction.value}.csv"
        write_text_atomic(out, "\n".join(rows) + "\n")
    return 0


def cmd_complexity(args) -> int:
    if args.k_min < 1 or args.k_max < args.k_min:
        raise ValueError(f"bad side-length range {args.k_min}..{args.k_max}")
    lines = emit_scaling_table(q=args.qubits_estimation,
                               k_values=range(args.k_min, args.k_max + 1))
    write_text_atomic(args.output, "\n".join(lines) + "\n")
    return 0


def cmd_threshold_sweep(args) -> int:
    image, i_range = _load_image(args)
    policies = [ThresholdPolicy.fixed(float(tok))
                for tok in args.thresholds.split(",") if tok.strip()]
    if not args.no_dynamic_row:
        policies.append(ThresholdPolicy.dynamic())
    rows = threshold_sweep(
        image,
        q=args.qubits_estimation,
        policies=policies,
        direction=Direction(args.direction),
        fill=ShiftFill(args.fill),
        mapping=MappingKind(args.mode),
        i_range=i_range,
        qubit_cap=args.qubit_cap,
    )
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["threshold", "resolved", "mae", "annihilated_count"])
    for r in rows:
        writer.writerow(
            [r["threshold"], f"{r['resolved']:.17g}", f"{r['mae']:.17g}", r["annihilated_count"]]
        )
    write_text_atomic(args.output, buf.getvalue())
    return 0


def cmd_gen(args) -> int:
    name = args.generator
    kwargs: dict = {"width": args.width, "height": args.height}
    if name == "ramp":
        kwargs["i_range"] = args.i_range
    elif name == "step":
        kwargs.update(high=args.high, low=args.low, split=args.split)
    else:
        kwargs.update(sigma=args.sigma, i_range=args.i_range, seed=args.seed)
    image = generators.generate(name, **kwargs)
    write_image(args.output, image, fmt=args.format)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except argparse.ArgumentTypeError as exc:  # pragma: no cover - argparse exits itself
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return args.handler(args)
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
