"""Command-line interface.

Exit codes: 0 success, 1 domain or validation error, 2 Newton did not
converge (results are still written and flagged), 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from symkdv import field, lie, reductions, spectral, verify
from symkdv.errors import SymKdVError
from symkdv.solver import NewtonConfig

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_NOT_CONVERGED = 2
EXIT_USAGE = 64

VARIANT_ENV = "SYMKDV_VARIANT"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


# --- formatting --------------------------------------------------------------


def fmt_csv(v) -> str:
    """Shortest round-trip repr, with integral values printed without '.0'."""
    v = float(v)
    if v == 0:
        return "0"
    if v.is_integer() and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def to_json(obj) -> str:
    """JSON with every float written at 17 significant digits."""
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not math.isfinite(v):
            return "null"
        s = f"{v:.17g}"
        if s == "-0":
            s = "0"
        if not any(ch in s for ch in ".en"):
            s += ".0"
        return s
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{to_json(str(k))}: {to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _triple(text: str) -> tuple:
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated numbers, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected three comma-separated numbers, got {text!r}") from None


def _write(args, text: str) -> None:
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _variant(args) -> reductions.Variant:
    raw = args.variant or os.environ.get(VARIANT_ENV) or reductions.Variant.PRINTED_DISCRETE.value
    return reductions.Variant.parse(raw)


def _newton_config(args, kind: reductions.Kind) -> NewtonConfig:
    return NewtonConfig(
        max_iters=args.max_iters,
        abs_tol=args.abs_tol,
        step_tol=args.step_tol,
        fd_step=args.fd_step,
        backtracking=not args.no_backtracking,
        positivity_guard=(lambda v: bool(np.all(v > 0))) if kind is reductions.Kind.PROBLEM2 else None,
    )


def _solve_all(args):
    kind = reductions.Kind(args.problem)
    variant = _variant(args)
    times = [None] if kind is reductions.Kind.PROBLEM1 else (args.t or [1.0])
    sols = []
    for t in times:
        prob = reductions.ReducedProblem(kind, args.n, variant, t_param=t)
        sol = reductions.solve_reduced(prob, _newton_config(args, kind))
        label = "problem 1" if t is None else f"problem 2 (t = {t:g})"
        print(f"{label}: {sol.newton.summary()}", file=sys.stderr)
        sols.append(sol)
    return sols


def _status(sols) -> int:
    if all(s.converged for s in sols):
        return EXIT_OK
    print("warning: Newton did not converge; results are flagged as unconverged", file=sys.stderr)
    return EXIT_NOT_CONVERGED


# --- subcommands ---------------------------------------------------------------


def cmd_nodes(args) -> int:
    grid = spectral.cgl_nodes(args.n)
    if args.format == "json":
        _write(args, to_json({"n": grid.n, "nodes": grid.nodes}) + "\n")
    else:
        _write(args, ",".join(fmt_csv(v) for v in grid.nodes) + "\n")
    return EXIT_OK


def cmd_diffmat(args) -> int:
    d1 = spectral.diff_matrix(spectral.cgl_nodes(args.n), negative_sum=not args.literal_diagonal)
    d = spectral.diff_matrix_power(d1, args.order)
    if args.format == "json":
        _write(args, to_json({"n": d.n, "order": d.order, "entries": d.entries}) + "\n")
    else:
        _write(args, "".join(",".join(fmt_csv(v) for v in row) + "\n" for row in d.entries))
    return EXIT_OK


def cmd_solve(args) -> int:
    sols = _solve_all(args)
    if args.format == "json":
        payload = [
            {
                "problem": s.problem.kind.value,
                "n": s.problem.n,
                "t": s.problem.t_param,
                "variant": s.problem.variant.value,
                "converged": s.converged,
                "iterations": s.newton.iterations,
                "final_residual_norm": s.newton.final_residual_norm,
                "nodes": s.grid.nodes,
                "values": s.values,
                "residuals": s.residuals,
            }
            for s in sols
        ]
        _write(args, to_json(payload if len(payload) > 1 else payload[0]) + "\n")
    else:
        lines = ["t,i,node,value,converged"]
        for s in sols:
            t = "" if s.problem.t_param is None else fmt_csv(s.problem.t_param)
            for i, (z, v) in enumerate(zip(s.grid.nodes, s.values)):
                lines.append(f"{t},{i},{fmt_csv(z)},{fmt_csv(v)},{int(s.converged)}")
        _write(args, "\n".join(lines) + "\n")
    return _status(sols)


def cmd_table(args) -> int:
    sols = _solve_all(args)
    if args.format == "json":
        payload = {
            "problem": args.problem,
            "n": args.n,
            "variant": sols[0].problem.variant.value,
            "columns": [
                {"t": s.problem.t_param, "converged": s.converged, "residuals": s.residuals} for s in sols
            ],
        }
        _write(args, to_json(payload) + "\n")
    elif len(sols) == 1:
        _write(args, reductions.residual_table_csv(sols[0]))
    else:
        header = "i," + ",".join(f"t={fmt_csv(s.problem.t_param)}" for s in sols)
        rows = [header]
        for k in range(args.n - 1):
            rows.append(f"{k + 1}," + ",".join(reductions.format_residual(s.residuals[k]) for s in sols))
        _write(args, "\n".join(rows) + "\n")
    return _status(sols)


def cmd_reconstruct(args) -> int:
    if args.samples < 1:
        raise SymKdVError(f"--samples must be >= 1, got {args.samples}")
    kind = reductions.Kind(args.problem)
    lo = args.x_min if args.x_min is not None else (field.DEFAULT_X_MIN if kind is reductions.Kind.PROBLEM1 else -1.0)
    hi = args.x_max if args.x_max is not None else 1.0
    if not hi >= lo:
        raise SymKdVError(f"--x-max ({hi}) must be >= --x-min ({lo})")
    xs = np.linspace(lo, hi, args.samples) if args.samples > 1 else np.array([lo])
    sols = _solve_all(args)
    times = [1.0] if kind is reductions.Kind.PROBLEM1 and not args.t else (args.t or [1.0])
    if kind is reductions.Kind.PROBLEM1:
        parts = [field.reconstruct_problem1(sols[0], xs, t, x_min=args.singular_guard) for t in times]
    else:
        parts = [field.reconstruct_problem2(s, s.problem.t_param, xs) for s in sols]
    combined = field.SpaceTimeField.stack(parts)
    text = field.plot_data_json(combined) + "\n" if args.format == "json" else field.emit_plot_data(combined)
    _write(args, text)
    return _status(sols)


def cmd_lie(args) -> int:
    if args.lie_command == "commutator":
        res = lie.commutator(lie.AlgebraElement(args.x), lie.AlgebraElement(args.y))
        payload = {"x": args.x, "y": args.y, "commutator": [float(a) for a in res.coeffs]}
    elif args.lie_command == "adjoint":
        m = lie.adjoint_closed_form(args.generator, args.eps)
        payload = {"generator": m.generator, "eps": m.eps, "matrix": m.entries}
        if args.coeffs is not None:
            payload["image"] = m.apply(lie.AlgebraElement(args.coeffs)).coeffs
    elif args.lie_command == "reduce":
        red = lie.reduce_to_optimal(lie.AlgebraElement(args.coeffs), tol=args.tol)
        payload = {
            "input": args.coeffs,
            "representative": red.representative.coeffs,
            "case": red.case,
            "chain": [[g, p] for g, p in red.chain],
            "scale": red.scale,
        }
    else:
        payload = {
            "generator": args.generator,
            "eps": args.eps,
            "point": args.point,
            "image": lie.flow(args.generator, args.eps, args.point),
        }
    _write(args, to_json(payload) + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    names = list(verify.SUITES) if args.suite == "all" else [args.suite]
    ok = True
    lines = []
    for name in names:
        for check in verify.SUITES[name](seed=args.seed):
            lines.append(f"[{name}] {check.line()}")
            ok &= check.passed
    _write(args, "\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_DOMAIN


# --- parser --------------------------------------------------------------------


def _add_output(p, formats=("csv", "json"), default="csv"):
    p.add_argument("--format", choices=formats, default=default, help=f"output format (default: {default})")
    p.add_argument("--output", "-o", help="write to this file instead of stdout")


def _add_problem(p, with_newton=True):
    p.add_argument("--problem", type=int, choices=(1, 2), required=True, help="reduced problem to solve")
    p.add_argument("--n", type=int, default=25, help="resolution N (default: 25)")
    p.add_argument(
        "--t", type=float, nargs="+", help="time value(s); problem 2 only (default: 1)", metavar="T"
    )
    p.add_argument(
        "--variant",
        choices=[v.value for v in reductions.Variant],
        help=f"sign variant (default: ${VARIANT_ENV} or printed-discrete)",
    )
    if with_newton:
        g = p.add_argument_group("Newton settings")
        g.add_argument("--max-iters", type=int, default=50, help="default: 50")
        g.add_argument("--abs-tol", type=float, default=1e-12, help="residual max-norm tolerance (default: 1e-12)")
        g.add_argument("--step-tol", type=float, default=1e-12, help="relative step tolerance (default: 1e-12)")
        g.add_argument("--fd-step", type=float, default=1e-7, help="finite-difference step (default: 1e-7)")
        g.add_argument("--no-backtracking", action="store_true", help="take full Newton steps")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="symkdv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("nodes", help="Chebyshev-Gauss-Lobatto nodes")
    p.add_argument("--n", type=int, required=True)
    _add_output(p)
    p.set_defaults(func=cmd_nodes)

    p = sub.add_parser("diffmat", help="differentiation matrix D^order")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--order", type=int, default=1)
    p.add_argument("--literal-diagonal", action="store_true", help="closed-form diagonal instead of negative row sums")
    _add_output(p)
    p.set_defaults(func=cmd_diffmat)

    p = sub.add_parser("solve", help="solve a reduced boundary-value problem")
    _add_problem(p)
    _add_output(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("table", help="residual table at the interior nodes")
    _add_problem(p)
    _add_output(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("reconstruct", help="u(x, t) samples as plot data")
    _add_problem(p)
    p.add_argument("--x-min", type=float, help="left end of the x samples (default: 0.2 for problem 1, -1 for 2)")
    p.add_argument("--x-max", type=float, help="right end of the x samples (default: 1)")
    p.add_argument("--samples", type=int, default=101, help="number of x samples (default: 101)")
    p.add_argument(
        "--singular-guard", type=float, default=field.DEFAULT_X_MIN, help="problem 1: reject |x| below this (default: 0.2)"
    )
    _add_output(p)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("lie", help="symmetry-algebra computations (JSON output)")
    lsub = p.add_subparsers(dest="lie_command", required=True, parser_class=_Parser)
    q = lsub.add_parser("commutator", help="[X, Y] for coefficient triples")
    q.add_argument("--x", type=_triple, required=True, metavar="A1,A2,A3")
    q.add_argument("--y", type=_triple, required=True, metavar="B1,B2,B3")
    q = lsub.add_parser("adjoint", help="matrix of Ad(exp(eps X_i))")
    q.add_argument("--generator", type=int, required=True)
    q.add_argument("--eps", type=float, required=True)
    q.add_argument("--coeffs", type=_triple, metavar="A1,A2,A3", help="also apply the matrix to this element")
    q = lsub.add_parser("reduce", help="optimal-system representative")
    q.add_argument("--coeffs", type=_triple, required=True, metavar="A1,A2,A3")
    q.add_argument("--tol", type=float, default=1e-12)
    q = lsub.add_parser("flow", help="image of (x, t, u) under exp(eps X_i)")
    q.add_argument("--generator", type=int, required=True)
    q.add_argument("--eps", type=float, required=True)
    q.add_argument("--point", type=_triple, required=True, metavar="X,T,U")
    for q in lsub.choices.values():
        q.add_argument("--output", "-o", help="write to this file instead of stdout")
    p.set_defaults(func=cmd_lie)

    p = sub.add_parser("verify", help="run built-in property checks")
    p.add_argument("--suite", choices=[*verify.SUITES, "all"], default="all")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o", help="write to this file instead of stdout")
    p.set_defaults(func=cmd_verify)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except SymKdVError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def main() -> None:
    sys.exit(run())
