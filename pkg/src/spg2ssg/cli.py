"""Command line interface.

Exit codes: 0 success or check passed, 1 check failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import io
from .game import Parity, Reachability, delta_min, max_denominator, validate
from .markov import reach_probability
from .reduction import (
    AlphaOutOfRange,
    AlphaUndefinedForPriority,
    DeltaMinTooLarge,
    alpha_base,
    bounds_report,
    check_alpha,
    default_alpha,
    reduce,
    sink_reach_lower_bound,
    worst_case_mc,
)
from .solvers import (
    DidNotConverge,
    EnumerationCapExceeded,
    oracle_values,
    separation_check,
    strategy_iteration,
    value_iteration,
    verify_transfer,
)

OK, FAILED, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _load(path):
    try:
        return io.load(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except (io.GameSyntaxError, io.SemanticError) as exc:
        raise UsageError(f"{path}: {exc}") from None


def _alpha(spec, arena):
    if spec in (None, "default"):
        return default_alpha(arena.n, max_denominator(arena))
    try:
        return io.load_alpha(spec)
    except OSError as exc:
        raise UsageError(f"cannot read {spec}: {exc.strerror}") from None
    except (io.GameSyntaxError, io.SemanticError) as exc:
        raise UsageError(f"{spec}: {exc}") from None


def _parity(objective):
    if not isinstance(objective, Parity):
        raise UsageError("this command needs a parity game")
    return objective


def _print_values(arena, values, exact=True):
    for v, x in enumerate(values):
        shown = io.fmt_exact(x) if exact else f"{x:.12g}"
        print(f"  {arena.labels[v]}: {shown}")


def _print_strategy(name, strategy, arena):
    if strategy is None or not len(strategy):
        return
    picks = ", ".join(f"{arena.labels[u]}->{arena.labels[w]}" for u, w in strategy.choice)
    print(f"{name}: {picks}")


def cmd_validate(args):
    try:
        with open(args.file, encoding="utf-8") as fh:
            arena, objective = io.parse(fh.read(), check=False)
    except OSError as exc:
        raise UsageError(f"cannot read {args.file}: {exc.strerror}") from None
    except (io.GameSyntaxError, io.SemanticError) as exc:
        raise UsageError(f"{args.file}: {exc}") from None
    violations = validate(arena, objective)
    if violations:
        for v in violations:
            print(f"violation [{v.kind}]: {v.message}")
        return FAILED
    print(f"valid: {arena.n} vertices, {len(arena.edges)} edges")
    return OK


def _float_unsafe(arena):
    return any(float(p) == 0.0 or float(1 - p) == 1.0 for p in arena.delta.values() if p != 1)


def cmd_reduce(args):
    arena, objective = _load(args.file)
    objective = _parity(objective)
    alpha = _alpha(args.alpha, arena)
    out = reduce(arena, objective, alpha)
    io.dump(args.out, out.arena, out.objective, approx_hints=args.approx)
    print(f"reduced game: {out.arena.n} vertices, {len(out.arena.edges)} edges -> {args.out}")
    print(f"alpha: {alpha.provenance}")
    return OK


def cmd_solve(args):
    arena, objective = _load(args.file)
    if args.method == "oracle":
        res = oracle_values(arena, objective, cap=args.cap)
    elif not isinstance(objective, Reachability):
        raise UsageError(f"--method {args.method} needs a reachability game; reduce the parity game first")
    elif args.method == "si":
        res = strategy_iteration(arena, objective)
    else:
        if _float_unsafe(arena):
            print(
                "warning: some probabilities vanish in double precision; value iteration results are meaningless here",
                file=sys.stderr,
            )
        try:
            res = value_iteration(arena, objective, tol=args.tol, max_iters=args.max_iters)
        except DidNotConverge as exc:
            print(f"value iteration: {exc}", file=sys.stderr)
            res = exc.result
    print(f"method: {res.method}, iterations: {res.iterations}")
    print("values:")
    _print_values(arena, res.values, res.exact)
    _print_strategy("eve", res.eve_strategy, arena)
    _print_strategy("adam", res.adam_strategy, arena)
    return OK if res.converged else FAILED


def cmd_bounds(args):
    arena, objective = _load(args.file)
    try:
        rep = bounds_report(arena)
    except DeltaMinTooLarge as exc:
        print(f"bounds undefined: {exc}", file=sys.stderr)
        return FAILED
    print(f"n = {rep.n}")
    print(f"M = {rep.M}")
    print(f"delta_min = {io.fmt_exact(rep.delta_min)}")
    print(f"epsilon = {io.fmt_exact(rep.epsilon)}")
    print(f"alpha_0 must be <= {io.fmt_exact(rep.alpha0_max)}")
    print(f"alpha_(k+1)/alpha_k must be <= {io.fmt_exact(rep.ratio_max)}")
    print(f"crossPath threshold = {io.fmt_exact(rep.crosspath_threshold)}")
    print(f"win threshold = {io.fmt_exact(rep.win_threshold)}")
    print(f"default alpha_0 = 1/{alpha_base(rep.n, rep.M)}")
    return OK


def cmd_verify(args):
    arena, objective = _load(args.file)
    objective = _parity(objective)
    alpha = _alpha(args.alpha, arena)
    try:
        d = delta_min(arena)
        check = check_alpha(alpha, arena.n, max_denominator(arena), d, max(objective.priorities))
        print("alpha conditions: " + ("satisfied" if check.ok else f"violated ({check.first[0]} at k={check.first[1]})"))
    except (DeltaMinTooLarge, ValueError, KeyError) as exc:
        print(f"alpha conditions: not applicable ({exc})")
    rep = verify_transfer(arena, objective, alpha, cap=args.cap)
    print("parity values:")
    _print_values(arena, rep.spg_values)
    print(f"optimal strategies in the reduced game: eve {rep.eve_optimal}, adam {rep.adam_optimal}")
    if rep.converse_failures:
        print(f"note: {len(rep.converse_failures)} parity-optimal strategies are not optimal after reduction")
    if rep.holds:
        print("transfer: holds")
        return OK
    print(f"transfer: FAILS for {len(rep.failures)} strategies")
    for player, strat, ssg_guarantee, spg_guarantee in rep.failures:
        _print_strategy(f"  {player}", strat, arena)
        print("    guarantee in parity game: " + ", ".join(io.approx(x) for x in spg_guarantee))
    return FAILED


def cmd_separation(args):
    arena, objective = _load(args.file)
    objective = _parity(objective)
    rep = separation_check(arena, objective, cap=args.cap)
    print(f"epsilon = {io.fmt_exact(rep.epsilon)}")
    print("min nonzero gap = " + (io.fmt_exact(rep.min_gap) if rep.min_gap is not None else "none (all values equal)"))
    if rep.holds:
        print("separation: holds")
        return OK
    print(f"separation: {len(rep.violations)} violations")
    return FAILED


def _fraction_arg(text):
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not an exact rational: {text!r}") from None
    return value


def cmd_worst_case(args):
    try:
        mc = worst_case_mc(args.m, args.s, args.alpha)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    target = args.m + 1
    exact = reach_probability(mc, {target})[0]
    t = 1 - args.alpha - args.s
    bound = sink_reach_lower_bound(args.m, args.s, t, args.s, args.alpha)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(io.chain_document(mc, {target}) + "\n")
    print(f"reach probability = {io.fmt_exact(exact)}")
    print(f"lower bound       = {io.fmt_exact(bound)}")
    print("tight" if exact == bound else "NOT tight")
    return OK if exact == bound else FAILED


def cmd_export_dot(args):
    arena, objective = _load(args.file)
    sinks = ()
    if isinstance(objective, Reachability):
        absorbing = [v for v in range(arena.n) if arena.successors[v] == (v,)]
        lose = [v for v in absorbing if v not in objective.target]
        if len(objective.target) == 1 and len(lose) == 1:
            sinks = (next(iter(objective.target)), lose[0])
    text = io.to_dot(arena, objective, sinks)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return OK


def build_parser():
    p = argparse.ArgumentParser(prog="spg2ssg", description="Reduce stochastic parity games to simple stochastic games.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="check a game file")
    s.add_argument("file")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("reduce", help="write the reduced reachability game")
    s.add_argument("file")
    s.add_argument("--out", required=True)
    s.add_argument("--alpha", default="default", help="'default' or a schedule file")
    s.add_argument("--approx", action="store_true", help="add decimal hints next to probabilities")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("solve", help="solve a game")
    s.add_argument("file")
    s.add_argument("--method", choices=("oracle", "vi", "si"), default="oracle")
    s.add_argument("--tol", type=float, default=1e-12)
    s.add_argument("--max-iters", type=int, default=1_000_000)
    s.add_argument("--cap", type=int, default=10**6, help="limit on enumerated strategy pairs")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("bounds", help="print the quantities the reduction depends on")
    s.add_argument("file")
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("verify", help="check that optimal strategies transfer back")
    s.add_argument("file")
    s.add_argument("--alpha", default="default")
    s.add_argument("--cap", type=int, default=10**6)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("separation", help="check the gap between distinct strategy-pair values")
    s.add_argument("file")
    s.add_argument("--cap", type=int, default=10**6)
    s.set_defaults(func=cmd_separation)

    s = sub.add_parser("worst-case", help="emit the chain where the sink bound is tight")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--s", type=_fraction_arg, required=True)
    s.add_argument("--alpha", type=_fraction_arg, required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_worst_case)

    s = sub.add_parser("export-dot", help="Graphviz rendering of a game")
    s.add_argument("file")
    s.add_argument("--out")
    s.set_defaults(func=cmd_export_dot)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except (EnumerationCapExceeded, AlphaOutOfRange, AlphaUndefinedForPriority) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
