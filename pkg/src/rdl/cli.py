"""``rdl`` command line. Every subcommand parses flags, calls the library and prints."""

from __future__ import annotations

import argparse
import os
import sys
from typing import Sequence

from rdl.colouring import RED, parse_rule, prefix, read_view, write_view
from rdl.cover import conjecture_harness, greedy_path_cover, min_path_cover_exact
from rdl.density import profile, upper_density_estimate
from rdl.errors import BudgetExceeded, HarnessInfeasible, NotCrStructure, ParseError, RdlError
from rdl.paths import DirectedPath, SearchBudget, greedy_mono_path, level_partition, longest_mono_path_exact
from rdl.structure import detect_cr_structure
from rdl.suites import SUITES, run_suite

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_BUDGET, EXIT_IO = 0, 1, 2, 3, 4
TIME_CAP_ENV = "RDL_TIME_CAP_MS"


class UsageError(Exception):
    pass


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _non_negative(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {value}")
    return value


def _weights(text: str) -> tuple[int, int]:
    red, sep, blue = text.partition(":")
    try:
        w = (int(red), int(blue))
    except ValueError:
        w = None
    if not sep or w is None or min(w) < 0 or sum(w) == 0:
        raise argparse.ArgumentTypeError(f"weights must look like R:B with non-negative integers, got {text!r}")
    return w


def _time_cap() -> int | None:
    raw = os.environ.get(TIME_CAP_ENV)
    if raw is None or raw == "":
        return None
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"{TIME_CAP_ENV} must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise UsageError(f"{TIME_CAP_ENV} must be a positive integer, got {raw!r}")
    return value


def _levels(view, args):
    return level_partition(view, args.level_colour, depth_cap=args.cap,
                           budget=SearchBudget(time_cap_ms=_time_cap()))


def _emit(lines: Sequence[str]) -> None:
    sys.stdout.write("".join(line.rstrip() + "\n" for line in lines))


# -- subcommands -----------------------------------------------------------------

def cmd_gen(args) -> int:
    view = prefix(parse_rule(args.rule), args.n)
    write_view(view, args.out)
    _emit([f"wrote {args.out} n={args.n} colours={view.colour_count}"])
    return EXIT_OK


def cmd_longest(args) -> int:
    view = read_view(args.input)
    budget = SearchBudget(max_exact_vertices=args.max_exact, depth_cap=args.depth,
                          time_cap_ms=_time_cap())
    path = longest_mono_path_exact(view, args.colour, budget)
    _emit([f"length {path.length}", path.to_line()])
    return EXIT_OK


def cmd_partition(args) -> int:
    view = read_view(args.input)
    part = level_partition(view, args.colour, depth_cap=args.cap,
                           budget=SearchBudget(time_cap_ms=_time_cap()))
    _emit(part.to_lines())
    return EXIT_OK


def cmd_greedy(args) -> int:
    view = read_view(args.input)
    target = _levels(view, args).level_set(args.target_level)
    path, skipped = greedy_mono_path(view, args.colour, target)
    _emit([path.to_line(), "skipped : " + " ".join(map(str, skipped))])
    return EXIT_OK


def _read_path_file(name: str) -> DirectedPath:
    with open(name, encoding="ascii") as fh:
        lines = [line.strip() for line in fh if line.strip() and not line.startswith("#")]
    paths = [line for line in lines if line.startswith("path ")]
    if len(paths) != 1:
        raise ParseError(f"{name}: expected exactly one 'path colour=c : ...' line, found {len(paths)}")
    try:
        return DirectedPath.from_line(paths[0])
    except ValueError as exc:
        raise ParseError(f"{name}: {exc}") from None


def cmd_density(args) -> int:
    view = read_view(args.input)
    kind, sep, arg = args.set_from.partition(":")
    if kind == "level" and sep:
        try:
            level = int(arg)
        except ValueError:
            raise UsageError(f"bad --set-from {args.set_from!r}") from None
        members = _levels(view, args).level_set(level)
    elif kind == "path-file" and arg:
        members = _read_path_file(arg).vertices
    else:
        raise UsageError(f"--set-from must be level:I or path-file:F, got {args.set_from!r}")
    n = len(view)
    window = args.window if args.window is not None else max(1, n // 2)
    est = upper_density_estimate(profile(members, n), window)
    _emit([f"density n={n} window={window} members={len(set(members))} : {est}"])
    return EXIT_OK


def cmd_detect(args) -> int:
    view = read_view(args.input)
    try:
        found = detect_cr_structure(view, args.r, max_exceptional=args.max_u, time_cap_ms=_time_cap())
    except NotCrStructure as exc:
        _emit([f"not-c_{args.r} residual={exc.residual_violations} : {exc}"])
        return EXIT_NEGATIVE
    _emit([f"c_{args.r} structure |U|={len(found.exceptional)}"] + found.to_lines())
    return EXIT_OK


def cmd_cover(args) -> int:
    view = read_view(args.input)
    if args.greedy:
        cover = greedy_path_cover(view, args.colour)
        mode = "greedy"
    else:
        cover = min_path_cover_exact(view, args.colour, SearchBudget(max_exact_vertices=args.max_exact))
        mode = "exact"
    _emit([f"mode {mode}"] + cover.to_lines())
    return EXIT_OK


def cmd_conjecture(args) -> int:
    report = conjecture_harness(args.r, args.n, args.trials, args.seed, weights=args.weights,
                                max_attempts=args.max_attempts)
    _emit(report.to_lines())
    return EXIT_OK


def cmd_verify(args) -> int:
    extra = {"seed": args.seed}
    if args.walks is not None:
        extra["walks"] = args.walks
    if args.horizon is not None:
        extra["horizon"] = args.horizon
    checks = run_suite(args.suite, args.n, **extra)
    failed = sum(not c.ok for c in checks)
    _emit([c.to_line() for c in checks] + [f"summary {len(checks) - failed} passed {failed} failed"])
    return EXIT_OK if failed == 0 else EXIT_NEGATIVE


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rdl", description="Edge-coloured directed integer graphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a colouring file for a rule on [1..N]")
    p.add_argument("--rule", required=True,
                   help="density-zero | extremal:R | product:R1,R2,... | random:K:SEED")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("longest", help="longest monochromatic directed path")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--colour", type=_positive, required=True)
    p.add_argument("--depth", type=_positive, default=None)
    p.add_argument("--max-exact", type=_positive, default=SearchBudget().max_exact_vertices)
    p.set_defaults(func=cmd_longest)

    p = sub.add_parser("partition", help="level partition by longest path length")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--colour", type=_positive, required=True)
    p.add_argument("--cap", type=_positive, required=True)
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("greedy", help="greedy path through one level class")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--colour", type=_positive, required=True)
    p.add_argument("--target-level", type=_non_negative, required=True)
    p.add_argument("--level-colour", type=_positive, default=RED)
    p.add_argument("--cap", type=_positive, default=None)
    p.set_defaults(func=cmd_greedy)

    p = sub.add_parser("density", help="finite upper-density estimate of a vertex set")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--set-from", required=True, help="level:I | path-file:F")
    p.add_argument("--window", type=_positive, default=None)
    p.add_argument("--level-colour", type=_positive, default=RED)
    p.add_argument("--cap", type=_positive, default=None)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("detect", help="search for a c_r structure with a small exceptional set")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--r", type=_positive, required=True)
    p.add_argument("--max-u", type=_non_negative, default=16)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("cover", help="vertex-disjoint monochromatic path cover")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--colour", type=_positive, required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true")
    mode.add_argument("--greedy", action="store_true")
    p.add_argument("--max-exact", type=_positive, default=SearchBudget().max_exact_vertices)
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("conjecture", help="random harness for blue path covers")
    p.add_argument("--r", type=_positive, required=True)
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--trials", type=_positive, required=True)
    p.add_argument("--seed", type=_non_negative, required=True)
    p.add_argument("--weights", type=_weights, default=None, help="red:blue integer weights")
    p.add_argument("--max-attempts", type=_positive, default=200_000)
    p.set_defaults(func=cmd_conjecture)

    p = sub.add_parser("verify", help="run invariant suites")
    p.add_argument("--suite", choices=SUITES, required=True)
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--walks", type=_positive, default=None)
    p.add_argument("--horizon", type=_positive, default=None)
    p.add_argument("--seed", type=_non_negative, default=0)
    p.set_defaults(func=cmd_verify)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"rdl: usage: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, OSError) as exc:
        print(f"rdl: input error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (BudgetExceeded, HarnessInfeasible) as exc:
        print(f"rdl: budget exceeded: {exc}", file=sys.stderr)
        bound = getattr(exc, "lower_bound", None) or getattr(exc, "upper_bound", None)
        if bound is not None and hasattr(bound, "to_line"):
            print(f"rdl: best found: {bound.to_line()}", file=sys.stderr)
        return EXIT_BUDGET
    except (RdlError, ValueError) as exc:
        print(f"rdl: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
