"""Command-line interface: file parsing, command dispatch, reports.

Channels and states travel as JSON files with complex entries encoded as
two-element [re, im] arrays.  Reports are emitted with sorted keys and
17-significant-digit numbers so identical runs produce identical bytes.
Exit codes: 0 the condition holds or the operation succeeded, 1 the
condition was checked and fails, 2 the input was invalid.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .channels import (
    CPMap,
    KrausChannel,
    apply,
    demo_channel,
    identity_channel,
    validate_cptp,
)
from .conditions import (
    ConditionReport,
    bruteforce_noiseless_oracle,
    check_ampliate_noiseless,
    check_correctable,
    check_normal_noiseless,
    check_quadruple,
    classify_support_case,
)
from .hilbert import SpaceDecomposition
from .recovery import CorrectabilityError, rank_profile, build_gram, synthesize_recovery
from .states import DensityOperator

__all__ = ["InputError", "parse_channel_file", "parse_state_file", "run", "main"]

_DECOMP_KEYS = ("dim_A", "dim_B", "dim_B1", "dim_perp")
_FACTOR_NAMES = ("A", "B", "B1", "H")


class InputError(Exception):
    """Invalid input file or flag combination; maps to exit code 2."""


# ---------------------------------------------------------------------------
# file formats


def _decode_entry(entry, where: str) -> complex:
    if (
        not isinstance(entry, (list, tuple))
        or len(entry) != 2
        or not all(isinstance(p, (int, float)) and not isinstance(p, bool) for p in entry)
    ):
        raise InputError(f"{where}: complex entries must be [re, im] number pairs")
    value = complex(entry[0], entry[1])
    if not (np.isfinite(value.real) and np.isfinite(value.imag)):
        raise InputError(f"{where}: non-finite entry")
    return value


def _decode_matrix(rows, where: str) -> np.ndarray:
    if not isinstance(rows, list) or not rows:
        raise InputError(f"{where}: matrix must be a nonempty list of rows")
    width = None
    data = []
    for r, row in enumerate(rows):
        if not isinstance(row, list) or not row:
            raise InputError(f"{where}: row {r} must be a nonempty list")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise InputError(f"{where}: ragged rows")
        data.append([_decode_entry(e, f"{where} row {r}") for e in row])
    return np.array(data, dtype=complex)


def _encode_matrix(matrix: np.ndarray) -> list:
    matrix = np.asarray(matrix, dtype=complex)
    return [
        [[float(v.real), float(v.imag)] for v in row]
        for row in matrix
    ]


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError(f"{path}: top level must be an object")
    return data


def _decomp_from(data: dict, path: str) -> SpaceDecomposition:
    dims = {}
    for key in _DECOMP_KEYS:
        if key not in data:
            raise InputError(f"{path}: missing field {key}")
        value = data[key]
        if not isinstance(value, int) or isinstance(value, bool):
            raise InputError(f"{path}: {key} must be an integer")
        dims[key] = value
    try:
        return SpaceDecomposition(**dims)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc


def parse_channel_file(path: str, tol: float = 1e-9) -> tuple[KrausChannel, SpaceDecomposition]:
    """Load and validate a channel file: dimensions plus Kraus matrices."""
    data = _load_json(path)
    decomp = _decomp_from(data, path)
    kraus = data.get("kraus")
    if not isinstance(kraus, list) or not kraus:
        raise InputError(f"{path}: 'kraus' must be a nonempty list of matrices")
    n = decomp.total_dim
    mats = []
    for idx, rows in enumerate(kraus):
        mat = _decode_matrix(rows, f"{path} kraus[{idx}]")
        if mat.shape != (n, n):
            raise InputError(
                f"{path} kraus[{idx}]: shape {mat.shape} does not match "
                f"total dimension {n}"
            )
        mats.append(mat)
    check = validate_cptp(CPMap(mats), tol)
    if not check.ok:
        raise InputError(
            f"{path}: Kraus operators are not trace-preserving "
            f"(residual {check.residual:.6e} > tol {tol:.6e})"
        )
    return KrausChannel(mats, tol=tol), decomp


def parse_state_file(path: str) -> tuple[np.ndarray, str, SpaceDecomposition]:
    """Load a state file: dimensions, a matrix, and its declared factor."""
    data = _load_json(path)
    decomp = _decomp_from(data, path)
    factor = data.get("factor")
    if factor not in _FACTOR_NAMES:
        raise InputError(f"{path}: 'factor' must be one of {_FACTOR_NAMES}")
    expected = {
        "A": decomp.dim_A,
        "B": decomp.dim_B,
        "B1": decomp.dim_B1,
        "H": decomp.total_dim,
    }[factor]
    if "matrix" not in data:
        raise InputError(f"{path}: missing field 'matrix'")
    mat = _decode_matrix(data["matrix"], f"{path} matrix")
    if mat.shape != (expected, expected):
        raise InputError(
            f"{path}: matrix shape {mat.shape} does not match factor {factor} "
            f"dimension {expected}"
        )
    return mat, factor, decomp


def _channel_payload(channel: KrausChannel, decomp: SpaceDecomposition) -> dict:
    return {
        "dim_A": decomp.dim_A,
        "dim_B": decomp.dim_B,
        "dim_B1": decomp.dim_B1,
        "dim_perp": decomp.dim_perp,
        "kraus": [_encode_matrix(op) for op in channel.operators],
    }


# ---------------------------------------------------------------------------
# deterministic serialization


def _canonical_json(value) -> str:
    if isinstance(value, dict):
        inner = ", ".join(
            f"{json.dumps(str(k))}: {_canonical_json(v)}"
            for k, v in sorted(value.items())
        )
        return "{" + inner + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_canonical_json(v) for v in value) + "]"
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if isinstance(value, str):
        return json.dumps(value)
    raise TypeError(f"cannot serialize {type(value)!r}")


def _pair(value: complex) -> list[float]:
    value = complex(value)
    return [float(value.real), float(value.imag)]


def _lambda_payload(table: dict) -> dict:
    return {",".join(str(i) for i in key): _pair(v) for key, v in table.items()}


def _witness_payload(report: ConditionReport):
    if report.witness is None:
        return None
    return {
        "indices": [int(i) for i in report.witness.indices],
        "residual": float(report.witness.residual),
    }


def _fmt_complex(value: complex) -> str:
    value = complex(value)
    return f"{value.real:.9g}{value.imag:+.9g}j"


def _render_text(payload: dict) -> str:
    lines = [f"command: {payload['command']}"]
    simple = ("verdict", "case", "gamma", "max_residual", "worst_residual", "residual")
    for key in simple:
        if key in payload and payload[key] is not None:
            value = payload[key]
            if isinstance(value, float):
                value = format(value, ".9g")
            lines.append(f"{key}: {value}")
    witness = payload.get("witness")
    if witness:
        idx = ",".join(str(i) for i in witness["indices"])
        lines.append(f"witness: block ({idx}) residual {witness['residual']:.9g}")
    table = payload.get("lambda_table")
    if table is not None:
        for key in sorted(table, key=lambda s: [int(p) for p in s.split(",")]):
            re_part, im_part = table[key]
            lines.append(f"lambda[{key}] = {_fmt_complex(complex(re_part, im_part))}")
    for name in ("sigma", "output"):
        matrix = payload.get(name)
        if matrix is not None:
            lines.append(f"{name}:")
            for row in matrix:
                entries = ", ".join(_fmt_complex(complex(e[0], e[1])) for e in row)
                lines.append(f"  [{entries}]")
    if "eigenvalues" in payload:
        values = ", ".join(format(v, ".9g") for v in payload["eigenvalues"])
        lines.append(f"gram eigenvalues: {values}")
    lines.append(f"tol: {format(payload['tol'], '.9g')}")
    return "\n".join(lines) + "\n"


def _emit(payload: dict, args) -> None:
    if args.format == "json":
        text = _canonical_json(payload) + "\n"
    else:
        text = _render_text(payload)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _base_payload(command: str, args) -> dict:
    return {
        "command": command,
        "version": __version__,
        "tol": float(args.tol),
        "seed": int(args.seed),
    }


def _condition_payload(command: str, report: ConditionReport, args) -> dict:
    payload = _base_payload(command, args)
    payload.update(
        {
            "verdict": "holds" if report.holds else "fails",
            "max_residual": float(report.max_residual),
            "lambda_table": _lambda_payload(report.lambda_table),
            "witness": _witness_payload(report),
        }
    )
    return payload


# ---------------------------------------------------------------------------
# commands


def _cmd_check(command: str, checker, args) -> int:
    channel, decomp = parse_channel_file(args.channel, args.tol)
    report = checker(channel, decomp, args.tol)
    _emit(_condition_payload(command, report, args), args)
    return 0 if report.holds else 1


def _cmd_check_ampliate(args) -> int:
    return _cmd_check("check-ampliate", check_ampliate_noiseless, args)


def _cmd_check_noiseless(args) -> int:
    return _cmd_check("check-noiseless", check_normal_noiseless, args)


def _cmd_check_correctable(args) -> int:
    return _cmd_check("check-correctable", check_correctable, args)


def _require_same_decomp(
    d1: SpaceDecomposition, d2: SpaceDecomposition, what: str
) -> None:
    if d1 != d2:
        raise InputError(f"{what}: decompositions disagree ({d1} vs {d2})")


def _cmd_check_quadruple(args) -> int:
    channel, decomp = parse_channel_file(args.channel, args.tol)
    recovery, rec_decomp = parse_channel_file(args.recovery, args.tol)
    _require_same_decomp(decomp, rec_decomp, "check-quadruple")
    report = check_quadruple(recovery, channel, decomp, args.tol)
    payload = _base_payload("check-quadruple", args)
    payload.update(
        {
            "verdict": "holds" if report.holds else "fails",
            "residual": float(report.residual),
            "sigma": _encode_matrix(report.sigma) if report.sigma is not None else None,
        }
    )
    _emit(payload, args)
    return 0 if report.holds else 1


def _cmd_synthesize(args) -> int:
    channel, decomp = parse_channel_file(args.channel, args.tol)
    payload = _base_payload("synthesize", args)
    try:
        recovery = synthesize_recovery(channel, decomp, args.tol)
    except CorrectabilityError as exc:
        payload.update(
            {
                "verdict": "fails",
                "max_residual": float(exc.report.max_residual),
                "witness": _witness_payload(exc.report),
            }
        )
        _emit(payload, args)
        return 1
    profile = rank_profile(build_gram(channel, decomp, args.tol), args.tol)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(_canonical_json(_channel_payload(recovery, decomp)) + "\n")
    payload.update(
        {
            "verdict": "ok",
            "recovery_file": args.output,
            "kraus_count": len(recovery.operators),
            "rank": profile.rank,
            "eigenvalues": list(profile.eigenvalues),
        }
    )
    _emit(payload, args)
    return 0


def _cmd_oracle(args) -> int:
    channel, decomp = parse_channel_file(args.channel, args.tol)
    report = bruteforce_noiseless_oracle(
        channel, decomp, samples=args.samples, seed=args.seed, tol=args.tol
    )
    payload = _base_payload("oracle", args)
    payload.update(
        {
            "verdict": "holds" if report.holds else "fails",
            "worst_residual": float(report.worst_residual),
            "samples": int(args.samples),
            "per_basis_sigmas": [_encode_matrix(s) for s in report.per_basis_sigmas],
        }
    )
    _emit(payload, args)
    return 0 if report.holds else 1


def _cmd_classify_case(args) -> int:
    mat1, factor1, decomp1 = parse_state_file(args.state1)
    mat2, factor2, decomp2 = parse_state_file(args.state2)
    _require_same_decomp(decomp1, decomp2, "classify-case")
    if factor1 != "B" or factor2 != "B":
        raise InputError("classify-case expects two states declared on factor B")
    try:
        rho1 = DensityOperator(mat1, tol=args.tol)
        rho2 = DensityOperator(mat2, tol=args.tol)
    except ValueError as exc:
        raise InputError(f"invalid state: {exc}") from exc
    case = classify_support_case(rho1, rho2, decomp1, args.tol)
    payload = _base_payload("classify-case", args)
    payload.update({"verdict": "ok", "case": case.value})
    _emit(payload, args)
    return 0


def _cmd_apply(args) -> int:
    channel, decomp = parse_channel_file(args.channel, args.tol)
    mat, factor, state_decomp = parse_state_file(args.state)
    _require_same_decomp(decomp, state_decomp, "apply")
    if factor != "H":
        raise InputError("apply expects a full-space state (factor H)")
    try:
        rho = DensityOperator(mat, tol=args.tol)
    except ValueError as exc:
        raise InputError(f"invalid state: {exc}") from exc
    out = apply(channel, rho)
    payload = _base_payload("apply", args)
    payload.update({"verdict": "ok", "output": _encode_matrix(out)})
    _emit(payload, args)
    return 0


def _cmd_demo(args) -> int:
    try:
        channel, decomp = demo_channel(args.gamma)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    if args.emit:
        text = _canonical_json(_channel_payload(channel, decomp)) + "\n"
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0
    cptp = validate_cptp(channel, args.tol)
    ampliate = check_ampliate_noiseless(channel, decomp, args.tol)
    noiseless = check_normal_noiseless(channel, decomp, args.tol)
    correctable = check_correctable(channel, decomp, args.tol)
    quadruple = check_quadruple(
        identity_channel(decomp.total_dim), channel, decomp, args.tol
    )
    payload = _base_payload("demo", args)
    payload.update(
        {
            "verdict": "ok",
            "gamma": float(args.gamma),
            "cptp_residual": float(cptp.residual),
            "ampliate": "holds" if ampliate.holds else "fails",
            "normal_noiseless": "holds" if noiseless.holds else "fails",
            "correctable": "holds" if correctable.holds else "fails",
            "identity_quadruple": "holds" if quadruple.holds else "fails",
            "sigma": _encode_matrix(quadruple.sigma),
        }
    )
    if args.format == "json":
        _emit(payload, args)
    else:
        lines = [
            f"demo channel (gamma = {args.gamma:.9g})",
            f"cptp: {'ok' if cptp.ok else 'violated'} (residual {cptp.residual:.9g})",
            f"ampliate-noiseless: {payload['ampliate']}",
            f"normal-noiseless: {payload['normal_noiseless']}"
            + (
                f" (witness: operator {noiseless.witness.indices[0]}"
                f" leaks out of B1, residual {noiseless.witness.residual:.9g})"
                if noiseless.witness is not None
                else ""
            ),
            f"correctable: {payload['correctable']}",
            f"identity-quadruple: {payload['identity_quadruple']}",
            "sigma:",
        ]
        for row in payload["sigma"]:
            entries = ", ".join(_fmt_complex(complex(e[0], e[1])) for e in row)
            lines.append(f"  [{entries}]")
        text = "\n".join(lines) + "\n"
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-9, help="residual tolerance")
    common.add_argument("--seed", type=int, default=0, help="random seed")
    common.add_argument(
        "--samples", type=int, default=20, help="sample count for the oracle"
    )
    common.add_argument("--out", default=None, help="write the report to this path")
    common.add_argument(
        "--format", choices=("json", "text"), default="text", help="report format"
    )

    parser = argparse.ArgumentParser(
        prog="oqeckit",
        description="Noiseless-subsystem checks and recovery synthesis "
        "for Kraus channels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "check-ampliate",
        parents=[common],
        help="A-factor noiseless check with the noisy factor allowed to grow",
    )
    p.add_argument("channel", help="channel file")
    p.set_defaults(func=_cmd_check_ampliate)

    p = sub.add_parser(
        "check-noiseless",
        parents=[common],
        help="fixed-decomposition noiseless check (B1 outputs stay in B1)",
    )
    p.add_argument("channel", help="channel file")
    p.set_defaults(func=_cmd_check_noiseless)

    p = sub.add_parser(
        "check-correctable",
        parents=[common],
        help="existence of a recovery for A-factor data on B1 inputs",
    )
    p.add_argument("channel", help="channel file")
    p.set_defaults(func=_cmd_check_correctable)

    p = sub.add_parser(
        "check-quadruple",
        parents=[common],
        help="test a concrete recovery channel against an error channel",
    )
    p.add_argument("channel", help="error channel file")
    p.add_argument("recovery", help="recovery channel file")
    p.set_defaults(func=_cmd_check_quadruple)

    p = sub.add_parser(
        "synthesize",
        parents=[common],
        help="construct a recovery channel and write it as a channel file",
    )
    p.add_argument("channel", help="error channel file")
    p.add_argument("output", help="path for the synthesized recovery channel")
    p.set_defaults(func=_cmd_synthesize)

    p = sub.add_parser(
        "oracle",
        parents=[common],
        help="brute-force sampling cross-check of the noiseless condition",
    )
    p.add_argument("channel", help="channel file")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser(
        "classify-case",
        parents=[common],
        help="classify the support relation of two B-factor states",
    )
    p.add_argument("state1", help="input-side state file (factor B)")
    p.add_argument("state2", help="output-side state file (factor B)")
    p.set_defaults(func=_cmd_classify_case)

    p = sub.add_parser(
        "apply", parents=[common], help="apply a channel to a full-space state"
    )
    p.add_argument("channel", help="channel file")
    p.add_argument("state", help="state file (factor H)")
    p.set_defaults(func=_cmd_apply)

    p = sub.add_parser(
        "demo", parents=[common], help="run the built-in two-qubit example"
    )
    p.add_argument("--gamma", type=float, default=0.5, help="damping strength in (0, 1)")
    p.add_argument(
        "--emit", action="store_true", help="write the demo channel file instead"
    )
    p.set_defaults(func=_cmd_demo)

    return parser


def run(argv=None) -> int:
    """Parse arguments and dispatch; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))
