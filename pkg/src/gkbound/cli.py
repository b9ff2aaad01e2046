"""Batch command-line front end.

Exit codes: 0 success, 1 a verify check failed, 2 domain or precondition
error, 3 size guard.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import ccp, matgt, verify
from .bell import invert_series
from .errors import DomainError, GkBoundError, SizeGuard
from .series import TruncatedSeries, eval_series


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _check_order(function: str, order: int) -> ccp.CcpDescriptor:
    d = ccp.catalog(function)
    if d.parity == "odd" and (order < 3 or order % 2 == 0):
        raise DomainError(f"odd-series pipelines need an odd order >= 3, got {order}")
    return d


def cmd_bound(args) -> int:
    rep = ccp.bound(_check_order(args.function, args.order), args.order, args.backend)
    if args.format == "csv":
        row = {k: v for k, v in rep.to_dict().items() if k != "notes"}
        row["notes"] = "; ".join(rep.notes)
        _emit(_csv([row]), args.output)
    else:
        _emit(json.dumps(rep.to_dict(), indent=2), args.output)
    return 0


def cmd_invert(args) -> int:
    text = Path(args.input).read_text()
    s = TruncatedSeries.from_csv(text) if args.input.endswith(".csv") else TruncatedSeries.from_json(text)
    backend = args.backend or ("odd" if s.parity == "odd" else "bell")
    inv = invert_series(s, args.order, backend)
    _emit(inv.to_csv() if args.format == "csv" else inv.to_json(), args.output)
    return 0


def cmd_wht(args) -> int:
    if args.entry:
        if args.complex:
            raise DomainError("--entry reads the real transform only")
        nu, mu = args.entry
        _emit(json.dumps({"m": args.m, "nu": nu, "mu": mu, "sign": matgt.wht_sign(args.m, nu, mu),
                          "value": matgt.wht_entry(args.m, nu, mu)}), args.output)
        return 0
    H = matgt.wht_complex(args.m) if args.complex else matgt.wht(args.m)
    _emit(matgt.write_matrix(H), args.output)
    return 0


def cmd_norm(args) -> int:
    if (args.matrix is None) == (args.had is None):
        raise DomainError("give exactly one of --matrix and --had")
    if args.had is not None:
        res = matgt.a_had_norm_exact(args.had)
        _emit(json.dumps(res.to_dict()), args.output)
        return 0
    A = matgt.read_matrix(Path(args.matrix).read_text())
    if A.is_complex:
        res = matgt.norm_inf1_complex_estimate(A, seed=args.seed)
    else:
        res = matgt.norm_inf1_real(A)
    _emit(json.dumps(res.to_dict()), args.output)
    return 0


def cmd_verify(args) -> int:
    if args.samples < 1000:
        raise DomainError("--samples must be at least 1000")
    checks = verify.run(args.suite, args.seed, args.samples)
    summary = {
        "suite": args.suite,
        "seed": args.seed,
        "samples": args.samples,
        "passed": all(c.passed for c in checks),
        "checks": [c.to_dict() for c in checks],
    }
    if args.format == "csv":
        _emit(_csv(summary["checks"]), args.output)
    else:
        _emit(json.dumps(summary, indent=2), args.output)
    return 0 if summary["passed"] else 1


def cmd_curve(args) -> int:
    if args.grid < 2:
        raise DomainError("--grid needs at least 2 points")
    d = _check_order(args.function, args.order)
    r = d.l2_norm_sq
    h = ccp.h_series(d, args.order)
    beta_abs = ccp.abs_inverse(d, args.order, args.backend)
    rows = []
    for rho in np.linspace(-r, r, args.grid):
        rho = float(rho)
        try:
            psi = ccp.psi_hyp(beta_abs, rho, r)
        except DomainError:
            psi = float("nan")
        rows.append({"rho": rho, "h": float(eval_series(h, rho)),
                     "h_inv_abs": float(eval_series(beta_abs, rho)), "psi_hyp": psi})
    _emit(_csv(rows), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gkbound", description="Grothendieck-constant bound pipeline.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt=True):
        sp.add_argument("--output", "-o", help="write to this file instead of stdout")
        if fmt:
            sp.add_argument("--format", choices=("json", "csv"), default="json")

    b = sub.add_parser("bound", help="upper-bound estimate for a catalog function")
    b.add_argument("--function", required=True, help="grothendieck, haagerup, fk(k) or kappa")
    b.add_argument("--order", type=int, default=ccp.DEFAULT_ORDER)
    b.add_argument("--backend", choices=ccp.BACKENDS, default="bell")
    common(b)
    b.set_defaults(run=cmd_bound)

    inv = sub.add_parser("invert", help="revert a series file")
    inv.add_argument("--in", dest="input", required=True, help="series .json or .csv")
    inv.add_argument("--order", type=int)
    inv.add_argument("--backend", choices=ccp.BACKENDS, help="default: odd for odd series, else bell")
    common(inv)
    inv.set_defaults(run=cmd_invert)

    w = sub.add_parser("wht", help="Walsh-Hadamard transform matrix or entry")
    w.add_argument("--m", type=int, required=True)
    w.add_argument("--entry", type=int, nargs=2, metavar=("NU", "MU"))
    w.add_argument("--complex", action="store_true")
    common(w, fmt=False)
    w.set_defaults(run=cmd_wht)

    n = sub.add_parser("norm", help="(inf,1) norm with witnesses")
    n.add_argument("--matrix", help="matrix file")
    n.add_argument("--had", type=int, metavar="M", help="exact norm of the scaled transform A^Had_M instead")
    n.add_argument("--seed", type=int, default=0, help="restarts seed for complex matrices")
    common(n, fmt=False)
    n.set_defaults(run=cmd_norm)

    v = sub.add_parser("verify", help="run self-check suites")
    v.add_argument("--suite", choices=verify.SUITES + ("all",), default="all")
    v.add_argument("--seed", type=int, required=True)
    v.add_argument("--samples", type=int, default=10**6)
    common(v)
    v.set_defaults(run=cmd_verify)

    c = sub.add_parser("curve", help="CSV of h, the abs-inverse and psi^hyp on a grid")
    c.add_argument("--function", required=True)
    c.add_argument("--order", type=int, default=ccp.DEFAULT_ORDER)
    c.add_argument("--grid", type=int, default=101)
    c.add_argument("--backend", choices=ccp.BACKENDS, default="bell")
    common(c, fmt=False)
    c.set_defaults(run=cmd_curve)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except SizeGuard as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (GkBoundError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
