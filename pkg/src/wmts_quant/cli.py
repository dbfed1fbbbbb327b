"""Command-line front end (``wmts-quant``).

Exit status: 0 on success, 1 when the result is undefined or inconsistent
(or ``validate`` finds errors), 2 on usage, parse and input-validation errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import distance, games, logic, operators, thorough
from .io import STRUCTURED, TEXT, WmtsParseError, detect_format, dumps, loads_with_kind
from .model import Wmts, add_covering_mays, is_implementation, validate

ENV_LAMBDA = "WMTS_QUANT_LAMBDA"


class InputError(Exception):
    """An input file that cannot be used; maps to exit status 2."""


def fmt_num(x: float) -> str:
    return "inf" if x == math.inf else f"{x:.9f}"


def load_wmts(path, auto_may: bool = False, check: bool = True) -> tuple:
    """Read and validate a system file; returns ``(system, kind, format)``."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        s, kind = loads_with_kind(text, str(path))
    except WmtsParseError as exc:
        raise InputError(str(exc)) from None
    if auto_may:
        s = add_covering_mays(s)
    if check:
        diag = validate(s)
        if not diag.ok:
            raise InputError(f"{path}: " + "; ".join(str(e) for e in diag.errors))
    return s, kind, detect_format(text)


def _lambda(text: str) -> float:
    try:
        return distance.check_lambda(float(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive(kind):
    def conv(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid value {text!r}") from None
        if not v > 0:
            raise argparse.ArgumentTypeError(f"value must be positive, got {text}")
        return v

    return conv


def _nonneg_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"value must be non-negative, got {text}")
    return v


def _nonneg_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number {text!r}") from None
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"value must be non-negative, got {text}")
    return v


def build_parser(default_lambda: float) -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lambda", dest="lam", type=_lambda, default=default_lambda, help="discount factor in (0,1)")
    common.add_argument("--tol", type=_positive(float), default=distance.DEFAULT_TOL)
    common.add_argument("--depth", type=_positive(int), default=6)
    common.add_argument("--eps", type=_nonneg_float, default=0.0)
    common.add_argument("--delta", type=_nonneg_int, default=0)
    common.add_argument("--auto-may", action="store_true", help="add covering may-transitions for uncovered musts")
    common.add_argument("--format", choices=[TEXT, STRUCTURED], default=None, help="output encoding for systems")
    common.add_argument("--exact", action="store_true", help="also report exact rational distances")
    common.add_argument("--max-weights", type=_positive(int), default=8, help="weight choices per transition when unrolling")

    p = argparse.ArgumentParser(prog="wmts-quant", description="Distances and operators for weighted modal transition systems.")
    sub = p.add_subparsers(dest="command", required=True)

    def cmd(name, files, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        for f in files:
            sp.add_argument(f)
        return sp

    cmd("validate", ["system"], "check well-formedness")
    cmd("dist-modal", ["left", "right"], "modal refinement distance")
    cmd("dist-impl", ["left", "right"], "implementation distance")
    cmd("refine-check", ["left", "right"], "decide distance <= eps")
    cmd("compose", ["left", "right"], "structural composition")
    cmd("quotient", ["left", "right"], "quotient of left by right")
    cmd("conjoin", ["left", "right"], "conjunction of deterministic systems")
    cmd("determinize", ["system"], "subset construction")
    cmd("widen", ["system"], "widen every interval by --delta")
    cmd("relax-check", ["system", "relaxed"], "check that relaxed is an eps-relaxation")
    sp = cmd("logic-eval", ["system"], "evaluate a formula")
    sp.add_argument("formula", help="formula text, or @FILE to read it from a file")
    cmd("thorough-approx", ["left", "right"], "bounds on the thorough distance")
    cmd("game-export", ["left", "right"], "emit the distance game as JSON")
    return p


def _emit_system(s: Wmts, args, in_kind: str, in_fmt: str, out) -> None:
    fmt = args.format or in_fmt
    kind = "impl" if in_kind == "impl" and is_implementation(s) else "wmts"
    out.write(dumps(s, fmt, kind))


def _report_dist(label, value, table, args, out):
    out.write(f"{label}: {fmt_num(value)}\n")
    if value != math.inf:
        out.write(f"error bound: {table.error_bound:.3e}\n")
    if args.exact:
        ex = table.exact_value
        out.write(f"exact: {'inf' if ex == math.inf else ex}\n")


def run(args, out=None) -> int:
    out = sys.stdout if out is None else out
    c = args.command
    load = lambda path: load_wmts(path, args.auto_may)  # noqa: E731

    if c == "validate":
        try:
            s, _, _ = load_wmts(args.system, args.auto_may, check=False)
        except InputError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        diag = validate(s)
        for issue in diag:
            kind = "error" if issue in diag.errors else "warning"
            out.write(f"{kind}: {issue}\n")
        out.write("valid\n" if diag.ok else "invalid\n")
        return 0 if diag.ok else 1

    if c in ("dist-modal", "refine-check", "thorough-approx", "game-export", "dist-impl", "compose", "quotient", "conjoin"):
        (s1, k1, f1), (s2, _, _) = load(args.left), load(args.right)
    elif c == "relax-check":
        (s1, k1, f1), (s2, _, _) = load(args.system), load(args.relaxed)
    else:
        s1, k1, f1 = load(args.system)

    if c == "dist-modal":
        d, t = distance.modal_dist(s1, s2, args.lam, args.tol, exact=args.exact)
        _report_dist("distance", d, t, args, out)
    elif c == "dist-impl":
        for name, s in (("left", s1), ("right", s2)):
            if not is_implementation(s):
                raise InputError(f"{name} argument is not an implementation")
        d, t = distance.impl_dist(s1, s2, args.lam, args.tol, exact=args.exact)
        _report_dist("distance", d, t, args, out)
    elif c == "refine-check":
        d, t = distance.modal_dist(s1, s2, args.lam, args.tol, exact=args.exact)
        _report_dist("distance", d, t, args, out)
        out.write(f"refines within {args.eps:g}: {'yes' if d <= args.eps + args.tol else 'no'}\n")
    elif c == "compose":
        _emit_system(operators.compose(s1, s2), args, k1, f1, out)
    elif c == "quotient":
        q = operators.quotient(s1, s2)
        if q is None:
            print("undefined: the quotient is inconsistent", file=sys.stderr)
            return 1
        _emit_system(q, args, k1, f1, out)
    elif c == "conjoin":
        r = operators.conjoin(s1, s2)
        if r is None:
            print("undefined: the conjunction is inconsistent", file=sys.stderr)
            return 1
        _emit_system(r, args, k1, f1, out)
    elif c == "determinize":
        _emit_system(operators.determinize(s1), args, k1, f1, out)
    elif c == "widen":
        _emit_system(operators.widen(s1, args.delta), args, k1, f1, out)
    elif c == "relax-check":
        down, _ = distance.modal_dist(s1, s2, args.lam, args.tol)
        up, _ = distance.modal_dist(s2, s1, args.lam, args.tol)
        ok = down <= args.tol and up <= args.eps + args.tol
        out.write(f"distance to relaxed: {fmt_num(down)}\n")
        out.write(f"distance from relaxed: {fmt_num(up)}\n")
        out.write(f"relaxation within {args.eps:g}: {'yes' if ok else 'no'}\n")
    elif c == "logic-eval":
        text = args.formula
        if text.startswith("@"):
            try:
                text = Path(text[1:]).read_text(encoding="utf-8")
            except OSError as exc:
                raise InputError(f"{text[1:]}: {exc.strerror}") from None
        try:
            phi = logic.parse_formula(text)
        except logic.FormulaSyntaxError as exc:
            raise InputError(f"formula: {exc}") from None
        v = logic.evaluate(phi, s1, args.lam)
        out.write(f"value: {fmt_num(v[s1.initial])}\n")
    elif c == "thorough-approx":
        est = thorough.thorough_dist_approx(
            s1, s2, args.lam, thorough.UnrollBudget(args.depth, args.max_weights), args.tol
        )
        out.write(f"lower: {fmt_num(est.lower)}\nupper: {fmt_num(est.upper)}\ndepth: {est.depth}\n")
    elif c == "game-export":
        g, _ = games.reduce_to_game(s1, s2, args.lam)
        out.write(json.dumps(g.to_dict(), indent=2) + "\n")
    return 0


def main(argv=None) -> int:
    env = os.environ.get(ENV_LAMBDA)
    default_lambda = distance.DEFAULT_LAMBDA
    if env:
        try:
            default_lambda = distance.check_lambda(float(env))
        except ValueError:
            print(f"error: {ENV_LAMBDA}={env!r} is not a discount factor in (0,1)", file=sys.stderr)
            return 2
    parser = build_parser(default_lambda)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return run(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except operators.NotDeterministicError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
