"""Command-line entry point: ``tollshare {solve,alliance,axioms,verify}``.

Exit codes: 0 success, 1 usage error, 2 invalid input, 3 a verification or
axiom check failed.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import alliance as A
from . import axioms as X
from . import oracle as O
from . import pipeline as P
from .model import CoalitionStructure, HighwayProblem, InvalidProblemError
from .random_instances import random_instance
from .values import VALUE_NAMES, compute

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_VIOLATION = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _multiplier(text: str) -> tuple[int, Fraction]:
    level, sep, factor = text.partition(":")
    try:
        if not sep:
            raise ValueError
        out = int(level), Fraction(factor)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected <level>:<factor>, got {text!r}") from None
    if out[1] <= 0:
        raise argparse.ArgumentTypeError("the factor must be positive")
    return out


def _tariff(path: str | None) -> P.ClassTariffTable:
    return P.load_ap9() if path is None else P.parse_tariff_csv(path)


def _levels(table, multipliers):
    levels = P.build_level_costs(table)
    for level, factor in multipliers:
        levels = P.scale_level(levels, level, factor)
    return levels


def cmd_solve(args, out) -> int:
    table = _tariff(args.input)
    toll = P.solve(table, args.value, P.load_union_spec(args.unions), args.round, args.level_multiplier)
    out.write(toll.render(args.format))
    return EXIT_OK


def _load_explicit(path: str) -> tuple[HighwayProblem, CoalitionStructure]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    problem = HighwayProblem.build({t: Fraction(str(c)) for t, c in data["costs"].items()}, data["usage"])
    problem.check()
    if "unions" in data:
        structure = CoalitionStructure.from_mapping(data["unions"])
    else:
        structure = CoalitionStructure.singletons(problem)
    return problem, structure.check(problem)


def cmd_alliance(args, out) -> int:
    values = args.value or list(A.COALITIONAL_VALUES)
    if args.problem:
        if not args.merge:
            raise UsageError("--problem needs --merge")
        problem, structure = _load_explicit(args.problem)
        merge = [m.strip() for m in args.merge.split(",") if m.strip()]
        reports = [A.alliance(v, problem, structure, merge, args.label) for v in values]
    else:
        table = _tariff(args.input)
        levels = _levels(table, args.level_multiplier)
        before_spec, after_spec = P.load_union_spec(args.before), P.load_union_spec(args.unions)
        new = [lab for lab in after_spec.labels if lab not in before_spec.labels]
        if len(new) != 1:
            raise ValueError("the merged scenario must add exactly one union to the base scenario")
        before = P.build_problem(levels, table, before_spec)
        after = P.build_problem(levels, table, after_spec)
        reports = [A.aggregated_alliance(v, before, after, new[0]) for v in values]
    if args.format == "json":
        out.write(json.dumps([r.to_dict() for r in reports], indent=2) + "\n")
    else:
        out.write("\n\n".join(r.summary() for r in reports) + "\n")
    broken = [r for r in reports if r.theorem_holds is False]
    return EXIT_VIOLATION if broken else EXIT_OK


def cmd_axioms(args, out) -> int:
    start = time.perf_counter()
    matrix = X.satisfaction_matrix(args.values or VALUE_NAMES, args.trials, args.seed, args.max_agents, args.max_sections)
    out.write(matrix.render() + "\n")
    status = EXIT_OK
    for cell in matrix.unexpected_violations():
        inst, verdict = cell.counterexample
        out.write(f"unexpected violation: {cell.value} / {cell.axiom}: {verdict.witness}\n")
        status = EXIT_VIOLATION
    if args.freeze:
        for path in X.freeze_counterexamples(Path(args.freeze), args.seed):
            out.write(f"wrote {path}\n")
    fixtures = {(r["value"], r["instance"]["axiom"]): r for r in X.load_counterexamples(args.freeze)}
    for value in matrix.values:
        for axiom in X.AXIOMS:
            if value not in X.EXPECTED or axiom in X.EXPECTED[value]:
                continue
            record = fixtures.get((value, axiom))
            if record is None:
                out.write(f"missing counterexample fixture: {value} / {axiom}\n")
                status = EXIT_VIOLATION
            elif X.replay(record).passed:
                out.write(f"stale counterexample fixture: {value} / {axiom}\n")
                status = EXIT_VIOLATION
    out.write(f"done in {time.perf_counter() - start:.1f}s\n")
    return status


_ORACLES = {
    "shapley": lambda game, problem, structure: O.shapley(game),
    "tijs": lambda game, problem, structure: O.tijs(game),
    "owen": lambda game, problem, structure: O.owen(game, structure),
    "coalitional-tijs": lambda game, problem, structure: O.coalitional_tijs(game, structure),
    "shapley-tijs": lambda game, problem, structure: O.shapley_tijs_ref(problem, structure),
}


def verify_oracles(trials: int, seed: int, max_agents: int = 6, max_sections: int = 6) -> list[str]:
    """Compare every closed form with its brute-force oracle; return mismatches."""
    rng = random.Random(seed)
    mismatches = []
    for k in range(trials):
        problem, structure = random_instance(rng, max_agents, max_sections)
        game = O.to_tu_game(problem)
        for name in VALUE_NAMES:
            closed = dict(compute(name, problem, structure)[0].values)
            ref = dict(_ORACLES[name](game, problem, structure).values)
            if closed != ref:
                mismatches.append(f"instance {k}: {name} differs ({closed} vs {ref})")
    return mismatches


def cmd_verify(args, out) -> int:
    start = time.perf_counter()
    bad = verify_oracles(args.trials, args.seed, args.max_agents, args.max_sections)
    elapsed = time.perf_counter() - start
    for line in bad:
        out.write(line + "\n")
    if bad:
        out.write(f"{len(bad)} mismatches ({elapsed:.1f}s)\n")
        return EXIT_VIOLATION
    out.write(f"{len(VALUE_NAMES)} values × {args.trials} instances: all exact matches ({elapsed:.1f}s)\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tollshare", description="Cost sharing of highway sections among vehicles and unions.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    tariff = _Parser(add_help=False)
    tariff.add_argument("--input", help="tariff CSV (default: the shipped AP-9 table)")
    tariff.add_argument(
        "--level-multiplier", type=_multiplier, action="append", default=[], metavar="LEVEL:FACTOR",
        help="scale one level's costs before solving; repeatable",
    )

    p = sub.add_parser("solve", parents=[tariff], help="per-class toll table")
    p.add_argument("--value", choices=VALUE_NAMES, default="shapley")
    p.add_argument("--unions", default="none", help="none, class-block:<class>, or a union file")
    p.add_argument("--round", default="none", choices=P.ROUNDING_MODES + tuple(P._ROUNDING_ALIASES))
    p.add_argument("--format", choices=("csv", "json", "md"), default="csv")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("alliance", parents=[tariff], help="effect of merging unions")
    p.add_argument("--value", choices=A.COALITIONAL_VALUES, action="append")
    p.add_argument("--before", default="none", help="base union scenario for tariff input")
    p.add_argument("--unions", default="class-block:heavy2", help="merged union scenario for tariff input")
    p.add_argument("--problem", help="explicit problem as JSON: costs, usage, optional unions")
    p.add_argument("--merge", help="comma-separated union labels to merge (with --problem)")
    p.add_argument("--label", help="label of the merged union (with --problem)")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_alliance)

    p = sub.add_parser("axioms", help="randomized property satisfaction matrix")
    p.add_argument("--values", nargs="+", choices=VALUE_NAMES)
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-agents", type=int, default=6)
    p.add_argument("--max-sections", type=int, default=6)
    p.add_argument("--freeze", metavar="DIR", help="search and store counterexamples in DIR")
    p.set_defaults(func=cmd_axioms)

    p = sub.add_parser("verify", help="closed forms against brute-force oracles")
    p.add_argument("--max-agents", type=int, default=6)
    p.add_argument("--max-sections", type=int, default=6)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "trials", 1) < 1:
            raise UsageError("--trials must be positive")
        return args.func(args, out)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    except (InvalidProblemError, P.TariffError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"tollshare: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main_exit():
    sys.exit(main())
