"""Batch command-line front end and the on-disk matrix format.

Matrices travel as JSON objects {"rows": r, "cols": c, "entries": [[re, im],
...]} with entries row-major; floats are written with shortest round-trip
precision so write-then-read is bit-exact.  Reports are JSON objects with a
fixed field order.  Exit codes: 0 success / equality holds, 1 analytic
negative (equality fails or residuals too large), 2 input or usage error,
3 precondition violation.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from .core import (
    DEFAULT_TOL,
    ShapeMismatchError,
    ToleranceConfig,
    as_matrix,
    ginibre,
)
from .spectral import operator_norm
from .triangle import (
    EqualityPreconditionError,
    certify_proof_chain,
    extract_common_isometry,
    make_pair_spec,
    make_projection_counterexample,
    abs_val,
    synthesize_equality_pair,
    triangle_defect,
)

__all__ = [
    "MatrixFileError",
    "main",
    "matrix_to_payload",
    "payload_to_matrix",
    "read_matrix",
    "write_matrix",
]

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_PRECONDITION = 3

PERTURBATION_SIZE = 1e-6


class MatrixFileError(ValueError):
    """A matrix file failed to parse or validate."""


def matrix_to_payload(m: np.ndarray) -> dict:
    m = as_matrix(m)
    rows, cols = m.shape
    entries = [[float(z.real), float(z.imag)] for z in m.ravel(order="C")]
    return {"rows": rows, "cols": cols, "entries": entries}


def payload_to_matrix(obj) -> np.ndarray:
    if not isinstance(obj, dict):
        raise MatrixFileError("matrix payload must be a JSON object")
    for key in ("rows", "cols", "entries"):
        if key not in obj:
            raise MatrixFileError(f"matrix payload missing field {key!r}")
    rows, cols, entries = obj["rows"], obj["cols"], obj["entries"]
    if not (isinstance(rows, int) and isinstance(cols, int) and rows > 0 and cols > 0):
        raise MatrixFileError("rows and cols must be positive integers")
    if not isinstance(entries, list) or len(entries) != rows * cols:
        raise MatrixFileError(
            f"expected {rows * cols} entries, got "
            f"{len(entries) if isinstance(entries, list) else type(entries).__name__}"
        )
    values = np.empty(rows * cols, dtype=np.complex128)
    for i, pair in enumerate(entries):
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or not all(isinstance(part, (int, float)) for part in pair)
        ):
            raise MatrixFileError(f"entry {i} is not a [re, im] pair")
        values[i] = complex(pair[0], pair[1])
    if not np.all(np.isfinite(values.real)) or not np.all(np.isfinite(values.imag)):
        raise MatrixFileError("matrix entries must be finite")
    return values.reshape(rows, cols)


def read_matrix(path: str) -> np.ndarray:
    try:
        with open(path, "r", encoding="utf-8") as fp:
            obj = json.load(fp)
    except OSError as exc:
        raise MatrixFileError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MatrixFileError(f"cannot parse {path}: {exc}") from exc
    return payload_to_matrix(obj)


def format_payload(obj: dict) -> str:
    return json.dumps(obj, indent=2) + "\n"


def write_matrix(path: str, m: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8") as fp:
        fp.write(format_payload(matrix_to_payload(m)))


def _tolerances_payload(tol: ToleranceConfig) -> dict:
    return {
        "eq_tol": tol.eq_tol,
        "rank_tol": tol.rank_tol,
        "convergence_tol": tol.convergence_tol,
    }


def _read_square_pair(path_x: str, path_y: str) -> tuple[np.ndarray, np.ndarray]:
    x = read_matrix(path_x)
    y = read_matrix(path_y)
    if x.shape != y.shape:
        raise ShapeMismatchError(f"shape mismatch: {x.shape} vs {y.shape}")
    if x.shape[0] != x.shape[1]:
        raise ShapeMismatchError(f"expected square matrices, got {x.shape}")
    return x, y


def _cmd_abs(args, tol: ToleranceConfig) -> int:
    m = read_matrix(args.input)
    if m.shape[0] != m.shape[1]:
        raise ShapeMismatchError(f"expected a square matrix, got {m.shape}")
    sys.stdout.write(format_payload(matrix_to_payload(abs_val(m, tol))))
    return EXIT_OK


def _cmd_check(args, tol: ToleranceConfig) -> int:
    x, y = _read_square_pair(args.x, args.y)
    report = triangle_defect(x, y, tol)
    payload = {
        "command": "check",
        "inputs": [args.x, args.y],
        "tolerances": _tolerances_payload(tol),
        "n": x.shape[0],
        "defect": report.defect,
        "scale": report.scale,
        "holds": report.holds,
        "verdict": "holds" if report.holds else "fails",
    }
    sys.stdout.write(format_payload(payload))
    return EXIT_OK if report.holds else EXIT_NEGATIVE


def _cmd_extract(args, tol: ToleranceConfig) -> int:
    x, y = _read_square_pair(args.x, args.y)
    result = extract_common_isometry(x, y, tol)
    ok = result.residual_x <= 10.0 * tol.eq_tol and result.residual_y <= 10.0 * tol.eq_tol
    if args.out:
        write_matrix(args.out, result.u)
    payload = {
        "command": "extract",
        "inputs": [args.x, args.y],
        "tolerances": _tolerances_payload(tol),
        "n": x.shape[0],
        "residual_x": result.residual_x,
        "residual_y": result.residual_y,
        "verdict": "pass" if ok else "fail",
        "u": matrix_to_payload(result.u),
    }
    sys.stdout.write(format_payload(payload))
    return EXIT_OK if ok else EXIT_NEGATIVE


def _cmd_certify(args, tol: ToleranceConfig) -> int:
    x, y = _read_square_pair(args.x, args.y)
    try:
        certificate = certify_proof_chain(x, y, tol, grid_size=args.grid)
    except EqualityPreconditionError as exc:
        payload = {
            "command": "certify",
            "inputs": [args.x, args.y],
            "tolerances": _tolerances_payload(tol),
            "grid": args.grid,
            "defect": exc.report.defect,
            "scale": exc.report.scale,
            "verdict": "precondition_failed",
        }
        sys.stdout.write(format_payload(payload))
        return EXIT_PRECONDITION
    payload = {
        "command": "certify",
        "inputs": [args.x, args.y],
        "tolerances": _tolerances_payload(tol),
        "grid": args.grid,
        "steps": [
            {
                "name": step.name,
                "residual": step.residual,
                "threshold": step.threshold,
                "passed": step.passed,
            }
            for step in certificate.steps
        ],
        "verdict": "pass" if certificate.all_passed else "fail",
    }
    sys.stdout.write(format_payload(payload))
    return EXIT_OK if certificate.all_passed else EXIT_NEGATIVE


def _cmd_gen(args, tol: ToleranceConfig) -> int:
    if not 1 <= args.rank <= args.n:
        raise ValueError(f"--rank must lie in [1, {args.n}], got {args.rank}")
    spec = make_pair_spec(args.n, args.rank, args.seed)
    x, y = synthesize_equality_pair(spec, tol)
    write_matrix(args.out_x, x)
    write_matrix(args.out_y, y)
    payload = {
        "command": "gen",
        "tolerances": _tolerances_payload(tol),
        "n": args.n,
        "rank": args.rank,
        "seed": args.seed,
        "out_x": args.out_x,
        "out_y": args.out_y,
        "verdict": "written",
    }
    sys.stdout.write(format_payload(payload))
    return EXIT_OK


def _trial_seed(seed: int, trial: int) -> int:
    return (seed * 1_000_003 + trial) % 2**63


def _isometry_law(u: np.ndarray, tol: ToleranceConfig) -> float:
    return operator_norm(u @ u.conj().T @ u - u, tol)


def _fuzz_equality(args, tol: ToleranceConfig) -> tuple[int, dict]:
    failures = 0
    max_defect = 0.0
    max_residual = 0.0
    max_law = 0.0
    for trial in range(args.trials):
        rank = 1 + trial % args.n
        spec = make_pair_spec(args.n, rank, _trial_seed(args.seed, trial))
        x, y = synthesize_equality_pair(spec, tol)
        report = triangle_defect(x, y, tol)
        extraction = extract_common_isometry(x, y, tol)
        law = _isometry_law(extraction.u, tol)
        max_defect = max(max_defect, report.defect / report.scale)
        max_residual = max(max_residual, extraction.residual_x, extraction.residual_y)
        max_law = max(max_law, law)
        ok = (
            report.holds
            and extraction.residual_x <= 10.0 * tol.eq_tol
            and extraction.residual_y <= 10.0 * tol.eq_tol
            and law <= tol.eq_tol
        )
        failures += 0 if ok else 1
    stats = {
        "max_defect_rel": max_defect,
        "max_residual": max_residual,
        "max_isometry_law": max_law,
    }
    return failures, stats


def _fuzz_counterexample(args, tol: ToleranceConfig) -> tuple[int, dict]:
    combos = [
        (rank_p, rank_q)
        for rank_p in range(2, args.n + 1)
        for rank_q in range(1, rank_p)
    ]
    failures = 0
    worst_defect_gap = 0.0
    min_residual_y = float("inf")
    for trial in range(args.trials):
        rank_p, rank_q = combos[trial % len(combos)]
        x, y = make_projection_counterexample(args.n, rank_p, rank_q)
        report = triangle_defect(x, y, tol)
        extraction = extract_common_isometry(x, y, tol)
        worst_defect_gap = max(worst_defect_gap, abs(report.defect - 2.0))
        min_residual_y = min(min_residual_y, extraction.residual_y)
        ok = (
            not report.holds
            and abs(report.defect - 2.0) <= tol.eq_tol * report.scale
            and extraction.residual_y >= 0.9
        )
        failures += 0 if ok else 1
    stats = {
        "max_defect_gap": worst_defect_gap,
        "min_residual_y": min_residual_y,
    }
    return failures, stats


def _fuzz_perturbed(args, tol: ToleranceConfig) -> tuple[int, dict]:
    failures = 0
    max_defect = 0.0
    max_residual = 0.0
    max_law = 0.0
    for trial in range(args.trials):
        rank = 1 + trial % args.n
        spec = make_pair_spec(args.n, rank, _trial_seed(args.seed, trial))
        x, y = synthesize_equality_pair(spec, tol)
        rng = np.random.default_rng(_trial_seed(args.seed, trial) + 1)
        scale = max(operator_norm(x, tol), operator_norm(y, tol), 1.0)
        noise = ginibre(rng, args.n, args.n)
        x = x + PERTURBATION_SIZE * scale * noise / max(operator_norm(noise, tol), 1.0)
        report = triangle_defect(x, y, tol)
        extraction = extract_common_isometry(x, y, tol)
        law = _isometry_law(extraction.u, tol)
        max_defect = max(max_defect, report.defect / report.scale)
        max_residual = max(max_residual, extraction.residual_x, extraction.residual_y)
        max_law = max(max_law, law)
        # No equality theorem applies off the equality manifold; the contract
        # is only that extraction still yields a genuine partial isometry.
        failures += 0 if law <= tol.eq_tol else 1
    stats = {
        "perturbation": PERTURBATION_SIZE,
        "max_defect_rel": max_defect,
        "max_residual": max_residual,
        "max_isometry_law": max_law,
    }
    return failures, stats


_FUZZ_MODES = {
    "equality": _fuzz_equality,
    "counterexample": _fuzz_counterexample,
    "perturbed": _fuzz_perturbed,
}


def _cmd_fuzz(args, tol: ToleranceConfig) -> int:
    if not 2 <= args.n <= 64:
        raise ValueError(f"--n must lie in [2, 64], got {args.n}")
    if args.trials < 1:
        raise ValueError(f"--trials must be >= 1, got {args.trials}")
    failures, stats = _FUZZ_MODES[args.mode](args, tol)
    payload = {
        "command": "fuzz",
        "mode": args.mode,
        "tolerances": _tolerances_payload(tol),
        "n": args.n,
        "trials": args.trials,
        "seed": args.seed,
        "failures": failures,
        "stats": stats,
        "verdict": "pass" if failures == 0 else "fail",
    }
    sys.stdout.write(format_payload(payload))
    return EXIT_OK if failures == 0 else EXIT_NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL.eq_tol,
                        help="relative equality tolerance (default 1e-9)")
    common.add_argument("--rank-tol", type=float, default=DEFAULT_TOL.rank_tol,
                        help="relative rank cutoff (default 1e-12)")
    common.add_argument("--grid", type=int, default=256,
                        help="angle-grid size for disk checks (default 256)")
    common.add_argument("--quiet", action="store_true",
                        help="suppress diagnostics on stderr")

    parser = argparse.ArgumentParser(
        prog="trieq",
        description="Matrix absolute values, polar decompositions, and "
                    "triangle-equality analysis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("abs", parents=[common],
                       help="absolute value of a square matrix")
    p.add_argument("input", help="matrix file")

    p = sub.add_parser("check", parents=[common],
                       help="test the triangle equality for a pair")
    p.add_argument("x", help="first matrix file")
    p.add_argument("y", help="second matrix file")

    p = sub.add_parser("extract", parents=[common],
                       help="extract the common partial isometry of a pair")
    p.add_argument("x", help="first matrix file")
    p.add_argument("y", help="second matrix file")
    p.add_argument("--out", help="write the isometry to this file")

    p = sub.add_parser("certify", parents=[common],
                       help="run the full step-by-step certificate")
    p.add_argument("x", help="first matrix file")
    p.add_argument("y", help="second matrix file")

    p = sub.add_parser("fuzz", parents=[common],
                       help="run a seeded population and report statistics")
    p.add_argument("--n", type=int, default=8, help="matrix dimension")
    p.add_argument("--trials", type=int, default=100, help="number of trials")
    p.add_argument("--seed", type=int, default=0, help="population seed")
    p.add_argument("--mode", choices=sorted(_FUZZ_MODES), default="equality")

    p = sub.add_parser("gen", parents=[common],
                       help="generate and write an equality-satisfying pair")
    p.add_argument("--n", type=int, required=True, help="matrix dimension")
    p.add_argument("--rank", type=int, required=True,
                   help="rank of the common isometry")
    p.add_argument("--seed", type=int, default=0, help="generator seed")
    p.add_argument("--out-x", required=True, help="output file for x")
    p.add_argument("--out-y", required=True, help="output file for y")

    return parser


_HANDLERS = {
    "abs": _cmd_abs,
    "check": _cmd_check,
    "extract": _cmd_extract,
    "certify": _cmd_certify,
    "fuzz": _cmd_fuzz,
    "gen": _cmd_gen,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    try:
        tol = ToleranceConfig(
            eq_tol=args.tol,
            rank_tol=args.rank_tol,
            convergence_tol=DEFAULT_TOL.convergence_tol,
        )
    except ValueError as exc:
        print(f"trieq: {exc}", file=sys.stderr)
        return EXIT_INPUT
    started = time.perf_counter()
    try:
        code = _HANDLERS[args.command](args, tol)
    except (MatrixFileError, ShapeMismatchError, ValueError, OSError) as exc:
        print(f"trieq: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if not args.quiet:
        print(f"trieq: elapsed {time.perf_counter() - started:.3f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
