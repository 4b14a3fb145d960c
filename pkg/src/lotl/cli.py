"""Command line interface: ``lotl <subcommand> ...``.

Exit status: 0 success, 1 selftest mismatches, 2 usage, 3 parse error,
4 shape or alphabet error, 5 no run, 6 UNKNOWN (item cap hit), 7 I/O error,
8 serialization refused.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .automaton import FIXTURES, load_fixture, materialize, state_name
from .construction import compile_formula, elementary_sizes, serialize
from .errors import (
    AlphabetError, BudgetExceeded, NoRunError, ParseError, ResourceExceeded,
    SerializationError, ShapeError,
)
from .formula import Atom, Binary, Const, Unary, atoms, parse, render
from .oracle import SuiteConfig, UPWord, differential_suite, eval_finite, eval_up
from .reach import parse_rules, satisfiable, satisfiable_within
from .runs import enumerate_accepting_runs_finite, find_run_term, render_run
from .words import (
    is_finite, letters, parse_term, power_set, render_finite, render_term,
    simplify, to_finite,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_PARSE, EXIT_SHAPE = 0, 1, 2, 3, 4
EXIT_NORUN, EXIT_UNKNOWN, EXIT_IO, EXIT_SERIAL = 5, 6, 7, 8


def ast_text(f) -> str:
    """``Until(Atom(a), Not(Atom(b)))`` style dump."""
    if isinstance(f, Atom):
        return f"Atom({f.name})"
    if isinstance(f, Const):
        return "True" if f.value else "False"
    if isinstance(f, Unary):
        return f"{type(f).__name__}({ast_text(f.child)})"
    if isinstance(f, Binary):
        return f"{type(f).__name__}({ast_text(f.left)}, {ast_text(f.right)})"
    raise TypeError(f)


def _props(arg, *formulas):
    props = set()
    for f in formulas:
        props |= atoms(f)
    if arg:
        props |= {p.strip() for p in arg.split(",") if p.strip()}
    return tuple(sorted(props))


def _alphabet_for(term):
    """Input alphabet for an alphabet-generic automaton, inferred from a term."""
    ls = letters(term)
    if ls and all(isinstance(a, frozenset) for a in ls):
        return power_set(frozenset().union(*ls))
    if ls and all(isinstance(a, int) for a in ls):
        return (0, 1)
    return tuple(sorted(ls, key=repr))


def _load(name, alphabet=None):
    try:
        return load_fixture(name, alphabet=alphabet)
    except FileNotFoundError as e:
        raise OSError(f"cannot read automaton {name!r}: {e.strerror}") from None


def cmd_parse(args, out):
    f = parse(args.formula)
    print(ast_text(f), file=out)
    print(render(f), file=out)
    return EXIT_OK


def cmd_compile(args, out):
    f = parse(args.formula)
    A = compile_formula(f, _props(args.props, f))
    print(f"states: {A.num_states}", file=out)
    print(f"elementary product: {elementary_sizes(f)}", file=out)
    if A.num_states <= args.count_cap:
        M = materialize(A)
        print(f"successor transitions: {sum(1 for _ in M.transitions())}", file=out)
    if args.out:
        text = serialize(A, args.cap)
        Path(args.out).write_text(text)
        print(f"written: {args.out}", file=out)
    return EXIT_OK


def cmd_eval(args, out):
    f = parse(args.formula)
    t = parse_term(args.word)
    A = compile_formula(f, _props(args.props, f))
    if is_finite(t):
        runs = enumerate_accepting_runs_finite(A, to_finite(t))
        if not runs:
            raise NoRunError("no accepting run")
        print(render_finite(runs[0][1]), file=out)
        return EXIT_OK
    _, output = find_run_term(A, t, args.budget)
    print(render_term(simplify(output)), file=out)
    return EXIT_OK


def cmd_oracle(args, out):
    f = parse(args.formula)
    t = parse_term(args.word)
    if is_finite(t):
        print(render_finite(eval_finite(f, to_finite(t))), file=out)
        return EXIT_OK
    try:
        w = UPWord.from_term(t)
    except ValueError as e:
        raise ShapeError(f"the oracle handles finite and u v^w words only ({e})") from None
    print(str(eval_up(f, w)), file=out)
    return EXIT_OK


def cmd_run(args, out):
    t = parse_term(args.word)
    A = _load(args.automaton, _alphabet_for(t))
    if is_finite(t):
        runs = enumerate_accepting_runs_finite(A, to_finite(t))
        if not runs:
            raise NoRunError("no accepting run")
        for states, output in runs:
            print(" ".join(map(state_name, states)) + " | " + render_finite(output), file=out)
        return EXIT_OK
    r, output = find_run_term(A, t, args.budget)
    print(render_run(r), file=out)
    print(render_term(simplify(output)), file=out)
    return EXIT_OK


def cmd_sat(args, out):
    f = parse(args.formula)
    rules = parse_rules(args.rules)
    props = _props(args.props, f)
    if args.within:
        B = _load(args.within, power_set(props))
        v = satisfiable_within(f, B, rules, args.max_items)
    else:
        v = satisfiable(f, rules, args.max_items, props=props)
    print(v.status, file=out)
    if v.status == "SAT" and not args.quiet:
        for line in v.trace:
            print("  " + line, file=out)
    if v.status == "UNKNOWN":
        print("item cap reached; no witness found", file=sys.stderr)
        return EXIT_UNKNOWN
    return EXIT_OK


def cmd_selftest(args, out):
    cfg = SuiteConfig(
        props=tuple(p.strip() for p in args.props.split(",")), depth=args.depth,
        max_len=args.len, cap=args.cap, seed=args.seed, mode=args.mode,
        max_prefix=args.len if args.mode == "up" else 3,
        max_cycle=args.len if args.mode == "up" else 3,
    )
    rep = differential_suite(cfg)
    text = rep.render(failures_only=not args.verbose)
    if args.out:
        Path(args.out).write_text(rep.render())
    out.write(text)
    return EXIT_OK if rep.fail == 0 else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lotl", description=(
        "LTL over linear orderings: compile formulas to transducers, "
        "evaluate truth words, decide satisfiability."))
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="print the desugared formula")
    p.add_argument("formula")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("compile", help="state and transition counts, optional serialization")
    p.add_argument("formula")
    p.add_argument("--out", help="write the automaton in text format")
    p.add_argument("--cap", type=int, default=12, help="largest automaton to serialize")
    p.add_argument("--count-cap", type=int, default=5000,
                   help="largest automaton whose transitions are counted")
    p.add_argument("--props", help="extra propositions, comma separated")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("eval", help="truth word computed by the compiled transducer")
    p.add_argument("formula")
    p.add_argument("word")
    p.add_argument("--props", help="extra propositions, comma separated")
    p.add_argument("--budget", type=int, default=200_000)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("oracle", help="truth word from the reference semantics")
    p.add_argument("formula")
    p.add_argument("word")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("run", help="accepting run of an automaton on a word")
    p.add_argument("automaton", help=f"file path or fixture name ({', '.join(FIXTURES)})")
    p.add_argument("word")
    p.add_argument("--budget", type=int, default=200_000)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sat", help="satisfiability by path saturation")
    p.add_argument("formula")
    p.add_argument("--within", help="restrict to words accepted by this automaton")
    p.add_argument("--rules", default=None,
                   help="comma separated subset of succ,cat,omega,negomega,shuffle")
    p.add_argument("--max-items", type=int, default=None,
                   help="item cap (default: $LOTL_MAX_ITEMS or 1000000)")
    p.add_argument("--props", help="extra propositions, comma separated")
    p.add_argument("--quiet", action="store_true", help="verdict only")
    p.set_defaults(func=cmd_sat)

    p = sub.add_parser("selftest", help="differential test against the oracle")
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--len", type=int, default=3, help="word length bound")
    p.add_argument("--cap", type=int, default=100, help="corpus size")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--props", default="a,b")
    p.add_argument("--mode", choices=("finite", "up"), default="finite")
    p.add_argument("--out", help="write the full report here")
    p.add_argument("--verbose", action="store_true", help="print every case")
    p.set_defaults(func=cmd_selftest)
    return ap


def run_cli(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (ShapeError, AlphabetError) as e:
        print(f"shape error: {e}", file=sys.stderr)
        return EXIT_SHAPE
    except BudgetExceeded as e:
        print(f"no run within budget: {e}", file=sys.stderr)
        return EXIT_NORUN
    except NoRunError as e:
        print(f"no run: {e}", file=sys.stderr)
        return EXIT_NORUN
    except ResourceExceeded as e:
        print(f"resource exceeded: {e}", file=sys.stderr)
        return EXIT_UNKNOWN
    except SerializationError as e:
        print(f"serialization refused: {e}", file=sys.stderr)
        return EXIT_SERIAL
    except ValueError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"io error: {e}", file=sys.stderr)
        return EXIT_IO


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
