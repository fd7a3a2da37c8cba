"""Command-line front end: decompose TSV distributions, run examples, sweeps.

Input format: UTF-8 TSV whose first non-comment line names the variables;
every following line holds one label per variable and a probability.
``#`` starts a comment.  Reports are JSON on stdout (deterministic: sorted
keys, 9 significant digits); timing goes to stderr.  Exit codes: 0 success,
1 input error, 2 non-convergence.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time

import numpy as np

from .canonical import CANONICAL_NAMES, DiceParams, canonical, dice, i_min
from .decomposition import Decomposition, blackwell_witness, decompose
from .dist import JointDistribution, from_table
from .errors import NotConverged, UniqueInfoError, ParseError
from .solver import SolverConfig, grid_oracle
from .errors import DimensionTooLarge

LN2 = float(np.log(2.0))


def load_tsv(path: str) -> tuple[JointDistribution, str]:
    """Parse a TSV distribution file; returns (distribution, sha256 digest)."""
    with open(path, "rb") as fh:
        raw = fh.read()
    digest = hashlib.sha256(raw).hexdigest()
    header = None
    entries = []
    for lineno, line in enumerate(raw.decode("utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split("\t")
        if header is None:
            header = fields
            continue
        if len(fields) != len(header) + 1:
            raise ParseError(
                f"{path}:{lineno}: expected {len(header)} labels + probability"
            )
        try:
            prob = float(fields[-1])
        except ValueError:
            raise ParseError(f"{path}:{lineno}: bad probability {fields[-1]!r}")
        entries.append((tuple(fields[:-1]), prob))
    if header is None or not entries:
        raise ParseError(f"{path}: no header or no entries")
    seen: list[dict] = [dict() for _ in header]
    for labels, _ in entries:
        for i, s in enumerate(labels):
            seen[i].setdefault(s, None)
    from .dist import Alphabet

    variables = [(name, Alphabet(seen[i].keys())) for i, name in enumerate(header)]
    return from_table(entries, variables=variables), digest


def _sig9(v: float) -> float:
    return float(f"{float(v):.9g}")


def _jsonify(obj):
    if isinstance(obj, float):
        return _sig9(obj)
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    return obj


def _emit(report: dict) -> None:
    print(json.dumps(_jsonify(report), sort_keys=True, separators=(",", ": "), indent=2))


def _unit_scale(units: str) -> float:
    return 1.0 if units == "bits" else LN2


def _decomposition_dict(dec: Decomposition, units: str) -> dict:
    s = _unit_scale(units)
    out = {
        "si": dec.si * s,
        "ui_y": dec.ui_y * s,
        "ui_z": dec.ui_z * s,
        "ci": dec.ci * s,
        "mi_xy": dec.mi_xy * s,
        "mi_xz": dec.mi_xz * s,
        "mi_xyz": dec.mi_xyz * s,
        "coi": dec.coi * s,
    }
    if dec.diagnostics is not None:
        out["solver"] = {
            "value": dec.diagnostics.value * s,
            "gap_certificate": dec.diagnostics.gap_certificate * s,
            "iterations": dec.diagnostics.iterations,
            "converged": dec.diagnostics.converged,
        }
    return out


def _config(args) -> SolverConfig:
    return SolverConfig(tol_gap=args.tol, max_iters=args.max_iters)


def _run_decomposition(P, roles, args, digest: str) -> tuple[dict, int]:
    x, y, z = roles
    status = 0
    t0 = time.perf_counter()
    try:
        dec = decompose(P, x=x, y=y, z=z, config=_config(args))
    except NotConverged as exc:
        dec = exc.partial
        status = 2
    wall = time.perf_counter() - t0
    report = {
        "input_digest": digest,
        "roles": {"x": x, "y": y, "z": z},
        "units": args.units,
        "decomposition": _decomposition_dict(dec, args.units),
    }
    if args.oracle:
        try:
            oracle = grid_oracle(P.reorder((x, y, z)))
            report["oracle"] = {
                "value": oracle.value * _unit_scale(args.units),
                "discrepancy": (dec.diagnostics.value - oracle.value)
                * _unit_scale(args.units),
            }
        except DimensionTooLarge as exc:
            report["oracle"] = {"skipped": str(exc)}
    print(f"wall time: {wall:.3f}s", file=sys.stderr)
    return report, status


def cmd_decompose(args) -> int:
    P, digest = load_tsv(args.file)
    roles = args.roles.split(",") if args.roles else list(P.names[:3])
    if len(roles) != 3:
        raise ParseError(f"--roles needs three names, got {roles}")
    report, status = _run_decomposition(P, roles, args, digest)
    _emit(report)
    return status


def cmd_example(args) -> int:
    P = canonical(args.name)
    digest = hashlib.sha256(P.mass.tobytes()).hexdigest()
    report, status = _run_decomposition(P, list(P.names), args, digest)
    report["example"] = args.name
    report["i_min"] = i_min(P) * _unit_scale(args.units)
    _emit(report)
    return status


def cmd_blackwell(args) -> int:
    P, digest = load_tsv(args.file)
    roles = args.roles.split(",") if args.roles else list(P.names[:3])
    if len(roles) != 3:
        raise ParseError(f"--roles needs three names, got {roles}")
    x, y, z = roles
    report = {"input_digest": digest, "roles": {"x": x, "y": y, "z": z}}
    for a, b, key in ((y, z, "y_dominates_z"), (z, y, "z_dominates_y")):
        witness = blackwell_witness(P, a, b, x=x)
        report[key] = witness is not None
        if witness is not None:
            report[f"{key}_witness"] = witness.tolist()
    _emit(report)
    return 0


def cmd_dice(args) -> int:
    if args.steps < 2:
        raise ParseError(f"steps must be >= 2, got {args.steps}")
    lambdas = [k / (args.steps - 1) for k in range(args.steps)]
    s = _unit_scale(args.units)
    print("lambda,si,ui_y,ui_z,ci,i_min")
    status = 0
    for lam in lambdas:
        P = dice(DiceParams(args.alpha, lam))
        note = ""
        try:
            dec = decompose(P, config=_config(args))
        except NotConverged as exc:
            dec = exc.partial
            note = f"  # gap {dec.diagnostics.gap_certificate:.3e}"
            status = 2
        imin = i_min(P)
        row = [lam, dec.si * s, dec.ui_y * s, dec.ui_z * s, dec.ci * s, imin * s]
        print(",".join(f"{v:.9g}" for v in row) + note)
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uniqueinfo",
        description="Shared/unique/synergistic information decomposition.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--tol", type=float, default=1e-9, help="duality gap tolerance")
        p.add_argument("--max-iters", type=int, default=100000)
        p.add_argument("--units", choices=("bits", "nats"), default="bits")
        p.add_argument(
            "--oracle",
            action="store_true",
            help="cross-check against the grid oracle when the dimension permits",
        )

    p = sub.add_parser("decompose", help="decompose a TSV joint distribution")
    p.add_argument("file")
    p.add_argument("--roles", help="comma-separated X,Y,Z variable names")
    common(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("example", help="run a canonical example")
    p.add_argument("name", help="|".join(CANONICAL_NAMES).lower())
    common(p)
    p.set_defaults(func=cmd_example)

    p = sub.add_parser("blackwell", help="channel dominance test for a TSV file")
    p.add_argument("file")
    p.add_argument("--roles", help="comma-separated X,Y,Z variable names")
    common(p)
    p.set_defaults(func=cmd_blackwell)

    p = sub.add_parser("dice", help="coupling sweep of the two-dice family (CSV)")
    p.add_argument("alpha", type=int, choices=range(1, 7))
    p.add_argument("steps", type=int)
    common(p)
    p.set_defaults(func=cmd_dice)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UniqueInfoError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
