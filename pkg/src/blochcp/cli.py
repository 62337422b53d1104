"""Command-line front end.

Exit codes: 0 completely positive / success, 1 not completely positive,
2 input error, 3 the fast test and the Choi oracle disagree.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from itertools import product
from pathlib import Path
from typing import Optional

import numpy as np

from . import channels as ch
from .diagonal_af import BETA_TOL, DiagonalSpec, betas_batch, is_cp_diagonal, kraus_from_spec
from .errors import BlochCPError, NotCompletelyPositiveError
from .pauli_basis import basis_matrices, index_digits
from .specfile import ChannelSpecFile, SpecFileError, encode_matrix, load_spec
from .svd_reduction import is_unital_quantum_operation, signed_svd

EXIT_CP = 0
EXIT_NOT_CP = 1
EXIT_INPUT = 2
EXIT_INCONSISTENT = 3

#: Half-width of the band around beta = 0 (or Choi eigenvalue 0) where
#: verdicts are reported as "boundary" and disagreements are not counted.
BOUNDARY_BAND = 1e-7

#: Largest number of grid rows a sweep will generate.
MAX_SWEEP_ROWS = 5_000_000

_PAULI_NAMES = "IXYZ"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _label(n: int, j: int) -> str:
    return "".join(_PAULI_NAMES[k] for k in index_digits(n, j))


def _matrix_lines(m: np.ndarray, indent: str = "    ") -> list[str]:
    m = np.asarray(m)
    if np.iscomplexobj(m) and np.abs(m.imag).max(initial=0.0) > 0:
        cell = lambda z: f"{z.real:+.6f}{z.imag:+.6f}j"
    else:
        m = m.real
        cell = lambda z: f"{z:+.6f}"
    return [indent + "[" + " ".join(cell(z) for z in row) + "]" for row in m]


def _real_matrix(m) -> list:
    return [[float(x) for x in row] for row in np.asarray(m, dtype=float)]


class _Inconsistent(Exception):
    pass


def _verdicts_disagree(fast_cp: bool, fast_margin: Optional[float], oracle_cp: bool,
                       oracle_margin: float) -> bool:
    if fast_cp == oracle_cp:
        return False
    if abs(oracle_margin) <= BOUNDARY_BAND:
        return False
    if fast_margin is not None and abs(fast_margin) <= BOUNDARY_BAND:
        return False
    return True


def build_report(spec: ChannelSpecFile, tol: float = BETA_TOL, oracle: bool = False) -> dict:
    """Certify the map described by ``spec``.

    The fast path depends on the kind: the beta vector for diagonal maps,
    the signed SVD followed by the beta vector for 3x3 Bloch matrices, and
    the sign pattern for operator sums with independent elements. When the
    fast path has no verdict (dependent elements) the Choi test decides.
    """
    start = time.perf_counter()
    channel = spec.channel()
    report: dict = {"kind": spec.kind, "n": spec.n, "tol": tol}
    beta = None
    fast_margin = None
    if spec.kind == "diagonal":
        fast_cp, beta = is_cp_diagonal(spec.diagonal(), tol)
        method = "beta"
        bloch = np.diag(spec.diagonal().d)
    elif spec.kind == "bloch_matrix_3x3":
        fast_cp, beta = is_unital_quantum_operation(spec.matrix(), tol)
        method = "signed_svd+beta"
        bloch = spec.matrix()
    else:
        bloch = None
        if ch.is_unital(channel) and ch.is_trace_preserving(channel):
            bloch = ch.bloch_matrix(channel)
        fast_cp = ch.sign_verdict(channel)
        method = "sign_pattern"
    if beta is not None:
        fast_margin = float(beta.min())

    independent = ch.elements_linearly_independent(channel)
    report.update(
        is_trace_preserving=ch.is_trace_preserving(channel),
        is_unital=ch.is_unital(channel),
        elements_independent=independent,
        sign_verdict=ch.sign_verdict(channel),
    )

    min_eig = None
    if oracle or fast_cp is None:
        oracle_cp, min_eig = ch.is_completely_positive(channel, tol)
        if fast_cp is None:
            fast_cp, method = oracle_cp, "choi"
        elif _verdicts_disagree(fast_cp, fast_margin, oracle_cp, min_eig):
            report["inconsistent"] = True
        report["oracle_is_cp"] = oracle_cp

    report.update(
        is_cp=bool(fast_cp),
        method=method,
        beta=None if beta is None else [float(b) for b in beta],
        min_beta=fast_margin,
        min_choi_eigenvalue=min_eig,
        bloch_matrix=None if bloch is None else _real_matrix(bloch),
        kraus_terms=[{"weight": float(w), "element": encode_matrix(a)} for w, a in channel.terms],
    )
    report.setdefault("inconsistent", False)
    report["seconds"] = time.perf_counter() - start
    return report


def _print_check(report: dict, out) -> None:
    n = report["n"]
    verdict = "completely positive" if report["is_cp"] else "NOT completely positive"
    print(f"kind: {report['kind']}  n: {n}", file=out)
    print(f"verdict: {verdict}  (method: {report['method']}, tol {report['tol']:g})", file=out)
    if report["beta"] is not None:
        print("beta:", file=out)
        for j, b in enumerate(report["beta"]):
            print(f"  beta_{j:<3d} {_label(n, j):>4s}  {b:+.12g}", file=out)
        print(f"min beta: {report['min_beta']:+.12g}", file=out)
    if report["min_choi_eigenvalue"] is not None:
        print(f"choi min eigenvalue: {report['min_choi_eigenvalue']:+.12g}", file=out)
    sv = report["sign_verdict"]
    print(f"trace preserving: {str(report['is_trace_preserving']).lower()}  "
          f"unital: {str(report['is_unital']).lower()}", file=out)
    print(f"elements independent: {str(report['elements_independent']).lower()}  "
          f"sign verdict: {'n/a' if sv is None else str(sv).lower()}", file=out)
    if report["bloch_matrix"] is not None and len(report["bloch_matrix"]) <= 15:
        print("bloch matrix:", file=out)
        for line in _matrix_lines(np.array(report["bloch_matrix"])):
            print(line, file=out)
    print(f"kraus terms: {len(report['kraus_terms'])}", file=out)
    if report["inconsistent"]:
        print("INCONSISTENT: fast test and Choi oracle disagree", file=out)
    print(f"time: {report['seconds']:.6f} s", file=out)


def _write_json(path: Optional[str], payload) -> None:
    if path:
        Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def cmd_check(args) -> int:
    spec = load_spec(args.spec)
    report = build_report(spec, args.tol, args.oracle)
    _print_check(report, sys.stdout)
    _write_json(args.out, report)
    if report["inconsistent"]:
        return EXIT_INCONSISTENT
    return EXIT_CP if report["is_cp"] else EXIT_NOT_CP


def cmd_kraus(args) -> int:
    spec = load_spec(args.spec)
    channel = spec.channel()

    if args.fold_weights:
        if channel.weights.min(initial=0.0) < -args.tol:
            if spec.kind != "operator_sum" or ch.elements_linearly_independent(channel):
                j = int(channel.weights.argmin())
                print(f"cannot fold weights: weight {j} is {channel.weights[j]:.12g} < 0, "
                      "so the map is not completely positive", file=sys.stderr)
                return EXIT_NOT_CP
            # dependent elements: signs are inconclusive, go through the Choi matrix
            try:
                kraus = ch.kraus_from_choi(channel, args.tol)
            except NotCompletelyPositiveError as e:
                print(f"cannot fold weights: {e}", file=sys.stderr)
                return EXIT_NOT_CP
        else:
            kraus = [np.sqrt(max(w, 0.0)) * a for w, a in channel.terms if w > args.tol]
        folded = ch.channel_from_elements(kraus) if kraus else None
        tp = folded is not None and ch.is_trace_preserving(folded)
        print(f"kraus operators: {len(kraus)}")
        for i, k in enumerate(kraus):
            print(f"K_{i}:")
            for line in _matrix_lines(k):
                print(line)
        print(f"sum K^dagger K = I: {str(tp).lower()}")
        _write_json(args.out, {"folded": True, "trace_preserving": tp,
                               "kraus": [encode_matrix(k) for k in kraus]})
        return EXIT_CP

    print(f"terms: {len(channel)}")
    for i, (w, a) in enumerate(channel.terms):
        head = f"term {i}: weight {w:+.12g}"
        if spec.kind == "diagonal":
            head += f"  element lambda_{_diag_index(spec, a)}"
        print(head)
        for line in _matrix_lines(a):
            print(line)
    _write_json(args.out, {"folded": False,
                           "terms": [{"weight": float(w), "element": encode_matrix(a)}
                                     for w, a in channel.terms]})
    return EXIT_CP


def _diag_index(spec: ChannelSpecFile, a: np.ndarray) -> str:
    lam = basis_matrices(spec.n)
    j = int(np.argmin(np.abs(lam - a).max(axis=(1, 2))))
    return f"{j} ({_label(spec.n, j)})"


def cmd_factor(args) -> int:
    spec = load_spec(args.spec)
    if spec.kind != "bloch_matrix_3x3":
        raise SpecFileError(f"factor needs kind 'bloch_matrix_3x3', got {spec.kind!r}", 1, args.spec)
    f = signed_svd(spec.matrix())
    det = float(np.linalg.det(f.M))
    for name, m in (("B", f.B), ("D", f.D), ("A", f.A)):
        print(f"{name}:")
        for line in _matrix_lines(m):
            print(line)
    print(f"det M: {det:+.17g}")
    print(f"det B: {np.linalg.det(f.B):+.17g}  det A: {np.linalg.det(f.A):+.17g}")
    print(f"residual max|BDA - M|: {f.residual:.3e}")
    _write_json(args.out, {"B": _real_matrix(f.B), "D": [float(x) for x in f.d],
                           "A": _real_matrix(f.A), "det_M": det, "residual": f.residual})
    return EXIT_CP


def cmd_choi(args) -> int:
    spec = load_spec(args.spec)
    channel = spec.channel()
    j = ch.choi_matrix(channel)
    vals = ch.choi_eigenvalues(channel)
    if j.shape[0] <= 16:
        print("choi matrix:")
        for line in _matrix_lines(j):
            print(line)
    else:
        print(f"choi matrix: {j.shape[0]}x{j.shape[1]} (written to --out only)")
    print("eigenvalues:")
    print("  " + " ".join(f"{v:+.12g}" for v in vals))
    print(f"min eigenvalue: {vals[0]:+.12g}")
    _write_json(args.out, {"choi": encode_matrix(j), "eigenvalues": [float(v) for v in vals]})
    return EXIT_CP


def sweep_rows(n: int, d: np.ndarray, tol: float = BETA_TOL, oracle: bool = False):
    """Evaluate a batch of diagonals; yields one dict per row, in input order."""
    beta = betas_batch(d, n)
    min_beta = beta.min(axis=1)
    for i in range(len(d)):
        row = {"d": d[i], "min_beta": float(min_beta[i]),
               "is_cp": bool(min_beta[i] >= -tol),
               "label": "boundary" if abs(min_beta[i]) <= BOUNDARY_BAND
               else ("cp" if min_beta[i] >= -tol else "not_cp")}
        if oracle:
            ocp, lo = ch.is_completely_positive(kraus_from_spec(DiagonalSpec(n, d[i])), tol)
            row["choi_min_eigenvalue"] = lo
            if row["label"] != "boundary" and _verdicts_disagree(row["is_cp"], row["min_beta"], ocp, lo):
                raise _Inconsistent(f"row {i}: beta verdict {row['is_cp']} but Choi verdict {ocp}")
        yield row


def sweep_points(n: int, grid: Optional[int], count: Optional[int], lo: float, hi: float,
                 seed: int) -> np.ndarray:
    m = 4 ** n - 1
    if grid is not None:
        if grid < 1:
            raise SpecFileError("--grid needs at least one point per axis")
        total = grid ** m
        if total > MAX_SWEEP_ROWS:
            raise SpecFileError(f"grid of {grid}^{m} = {total} rows exceeds {MAX_SWEEP_ROWS}")
        axis = np.linspace(lo, hi, grid)
        return np.array(list(product(axis, repeat=m)), dtype=float).reshape(-1, m)
    if count < 0 or count > MAX_SWEEP_ROWS:
        raise SpecFileError(f"--random must be in [0, {MAX_SWEEP_ROWS}]")
    rng = np.random.default_rng(seed)
    return rng.uniform(lo, hi, size=(count, m))


def cmd_sweep(args) -> int:
    if not 1 <= args.n <= 4:
        raise SpecFileError(f"--n must be in [1, 4], got {args.n}")
    d = sweep_points(args.n, args.grid, args.random, args.range[0], args.range[1], args.seed)
    m = d.shape[1]
    header = [f"d{i}" for i in range(1, m + 1)] + ["min_beta", "is_cp", "label"]
    if args.oracle:
        header.append("choi_min_eigenvalue")
    try:
        fh = open(args.out, "w", newline="")
    except OSError as e:
        raise SpecFileError(f"cannot write {args.out}: {e.strerror or e}") from e
    n_cp = n_boundary = 0
    with fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        try:
            for row in sweep_rows(args.n, d, args.tol, args.oracle):
                n_cp += row["is_cp"]
                n_boundary += row["label"] == "boundary"
                out = [_fmt(x) for x in row["d"]]
                out += [_fmt(row["min_beta"]), "true" if row["is_cp"] else "false", row["label"]]
                if args.oracle:
                    out.append(_fmt(row["choi_min_eigenvalue"]))
                writer.writerow(out)
        except _Inconsistent as e:
            print(f"INCONSISTENT: {e}", file=sys.stderr)
            return EXIT_INCONSISTENT
    rows = len(d)
    frac = n_cp / rows if rows else float("nan")
    print(f"rows: {rows}  cp: {n_cp}  boundary: {n_boundary}  cp fraction: {frac:.6f}")
    return EXIT_CP


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="blochcp",
                                description="Certify complete positivity of Bloch-matrix superoperators.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, spec=True):
        if spec:
            sp.add_argument("spec", help="channel description file (JSON)")
        sp.add_argument("--tol", type=float, default=BETA_TOL, help="verdict tolerance (default 1e-9)")
        sp.add_argument("--out", help="write structured output to this path")

    sp = sub.add_parser("check", help="decide complete positivity")
    common(sp)
    sp.add_argument("--oracle", action=argparse.BooleanOptionalAction, default=False,
                    help="also run the Choi-matrix test and require agreement")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("kraus", help="print an operator-sum decomposition")
    common(sp)
    sp.add_argument("--fold-weights", action="store_true",
                    help="fold sqrt(weight) into the elements (CP maps only)")
    sp.set_defaults(func=cmd_kraus)

    sp = sub.add_parser("factor", help="signed SVD M = B D A of a 3x3 Bloch matrix")
    common(sp)
    sp.set_defaults(func=cmd_factor)

    sp = sub.add_parser("choi", help="print the Choi matrix and its eigenvalues")
    common(sp)
    sp.set_defaults(func=cmd_choi)

    sp = sub.add_parser("sweep", help="tabulate the CP verdict over many diagonals")
    common(sp, spec=False)
    sp.add_argument("--n", type=int, default=1, help="qubit count")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--grid", type=int, metavar="K", help="K points per axis")
    g.add_argument("--random", type=int, metavar="K", help="K uniform random samples")
    sp.add_argument("--range", type=float, nargs=2, default=(-1.0, 1.0), metavar=("LO", "HI"))
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--oracle", action=argparse.BooleanOptionalAction, default=False,
                    help="re-verify every row with the Choi matrix")
    sp.set_defaults(func=cmd_sweep)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_CP
    if getattr(args, "command", None) == "sweep" and not args.out:
        print("error: sweep needs --out", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except BlochCPError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
