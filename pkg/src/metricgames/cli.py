"""Command-line front end: ``metricgames <subcommand> ...``."""

import argparse
import json
import sys
from fractions import Fraction

from .distances import NO_BIJECTION, game_distance, gh_bruteforce, lipschitz_bruteforce
from .errors import DomainError, ParseError, UnknownSuite
from .games import (
    FunctionGameConfig,
    Menus,
    RelationGameConfig,
    default_menus,
    play_interactive,
    solve_function_game,
    solve_relation_game,
)
from .scott import (
    scott_formula_function,
    scott_formula_relation,
    scott_sentence_relation,
    watershed_function,
    watershed_relation,
)
from .structures import Vocabulary, format_rational, parse_rational, structure_to_json, \
    validate_structure


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _rational(text):
    try:
        return parse_rational(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _natural(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a natural number") from None
    if n < 0:
        raise argparse.ArgumentTypeError(f"{text!r} is negative")
    return n


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}", path=path) from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} is not valid JSON: {exc.msg} at line {exc.lineno}",
                         path=path) from None


def _load(path, multiplicative=False):
    raw = _read_json(path)
    vocab = None
    if multiplicative and isinstance(raw, dict) and "vocabulary" not in raw:
        # a bare metric space under --factor means the isomorphism semantics
        vocab = Vocabulary.LM_ISO if raw.get("kind") == "metric_space" else None
    return validate_structure(raw, vocab)


def _pair(args):
    if not args.a or not args.b:
        raise UsageError("--a and --b are both required")
    mult = getattr(args, "factor", None) is not None
    return _load(args.a, mult), _load(args.b, mult)


def _start_pairs(text):
    if not text:
        return ()
    out = []
    for item in text.split(","):
        parts = item.split(":")
        if len(parts) != 2:
            raise UsageError(f"--start entry {item!r} should be a:b")
        out.append((parts[0], parts[1]))
    return tuple(out)


def _function_start(text):
    if not text:
        return ()
    out = []
    for item in text.split(","):
        parts = item.split(":")
        if len(parts) != 4:
            raise UsageError(f"--start entry {item!r} should be a:b:s:k")
        out.append((parts[0], parts[1], parse_rational(parts[2]), int(parts[3])))
    return tuple(out)


def _menus(args, A, B):
    if args.menus:
        return Menus.from_json(_read_json(args.menus))
    if A.vocabulary is Vocabulary.LB:
        raise UsageError("--menus is required for normed (LB) structures")
    return default_menus(A, B, args.factor)


def _function_cfg(args, A, B):
    return FunctionGameConfig(A, B, args.factor, args.clock or 0, _menus(args, A, B),
                              _function_start(args.start))


def _emit(args, text):
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _dump(obj):
    return json.dumps(obj, indent=2)


# -- subcommands ---------------------------------------------------------------------

def cmd_validate(args):
    path = args.in_ or args.a
    if not path:
        raise UsageError("validate needs --in")
    S = _load(path)
    _emit(args, _dump(structure_to_json(S)) if args.json else "ok")
    return 0


def cmd_distance(args):
    A, B = _pair(args)
    out = {"method": args.method}
    if args.method == "gh-brute":
        value, R = gh_bruteforce(A, B, witness=True)
        out["value"] = format_rational(value)
        witness = sorted(map(list, R))
    elif args.method == "lipschitz":
        if A.vocabulary.additive:
            A, B = A.with_vocabulary(Vocabulary.LM_ISO), B.with_vocabulary(Vocabulary.LM_ISO)
        L, f = lipschitz_bruteforce(A, B, witness=True)
        out["value"] = str(L) if L is NO_BIJECTION else format_rational(L)
        witness = f
    else:
        semantics = args.semantics or ("additive" if A.vocabulary.additive else "multiplicative")
        lo, hi = game_distance(A, B, semantics, args.resolution)
        out["semantics"] = semantics
        out["interval"] = [format_rational(lo), None if hi is None else format_rational(hi)]
        witness = None
    if args.witness and witness is not None:
        out["witness"] = witness
    if args.json:
        _emit(args, _dump(out))
    elif "value" in out:
        _emit(args, out["value"])
    else:
        lo, hi = out["interval"]
        _emit(args, f"[{lo}, {hi if hi is not None else 'inf'}]")
    return 0


def cmd_solve(args):
    A, B = _pair(args)
    if args.clock is None:
        raise UsageError("solve needs --clock")
    if args.factor is not None:
        res = solve_function_game(_function_cfg(args, A, B), strategy=args.json)
    else:
        cfg = RelationGameConfig(A, B, args.eps or Fraction(0), args.clock,
                                 _start_pairs(args.start))
        res = solve_relation_game(cfg, strategy=args.json)
    _emit(args, _dump(res.to_json()) if args.json else res.winner)
    return 0


def cmd_watershed(args):
    A, B = _pair(args)
    if args.factor is not None:
        w = watershed_function(A, B, _function_cfg(args, A, B))
    else:
        w = watershed_relation(A, B, _start_pairs(args.start), args.eps or Fraction(0))
    _emit(args, _dump({"watershed": str(w)}) if args.json else str(w))
    return 0


def cmd_scott(args):
    A = _load(args.a or args.in_, args.factor is not None)
    labels = tuple(x for x in (args.tuple or "").split(",") if x)
    if args.rank is not None:
        targets = [_load(p) for p in (args.target or [])]
        F = scott_sentence_relation(A, args.eps or Fraction(0), args.rank, targets,
                                    args.tuple_bound)
    elif args.factor is not None:
        menus = Menus.from_json(_read_json(args.menus)) if args.menus else \
            default_menus(A, A, args.factor)
        start = []
        for item in (args.start or "").split(","):
            if item:
                parts = item.split(":")
                if len(parts) != 3:
                    raise UsageError(f"--start entry {item!r} should be a:s:k")
                start.append((parts[0], parse_rational(parts[1]), int(parts[2])))
        if labels:
            raise UsageError("with --factor give the start tuple as --start a:s:k,...")
        abar = [a for a, _, _ in start]
        sbar = [x for _, x, _ in start]
        kbar = [k for _, _, k in start]
        F = scott_formula_function(A, abar, args.factor, sbar, kbar, args.clock or 0, menus)
    else:
        F = scott_formula_relation(A, labels, args.eps or Fraction(0), args.clock or 0)
    _emit(args, json.dumps(F.to_json(shared=args.shared)))
    return 0


def cmd_play(args):
    A, B = _pair(args)
    if args.clock is None:
        raise UsageError("play needs --clock")
    if args.factor is not None:
        cfg = _function_cfg(args, A, B)
    else:
        cfg = RelationGameConfig(A, B, args.eps or Fraction(0), args.clock,
                                 _start_pairs(args.start))
    tokens = (line.rstrip("\n") for line in sys.stdin if line.strip())
    t = play_interactive(cfg, args.role, tokens)
    _emit(args, _dump(t.to_json()) if args.json else "\n".join(t.lines()))
    return 0


def cmd_suite(args):
    from .suites import run_suite
    try:
        report = run_suite(args.name, quick=args.quick)
    except UnknownSuite as exc:
        print(str(exc), file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(_dump(report) + "\n")
    if args.json:
        print(_dump(report))
    else:
        for p in report["properties"]:
            status = "PASS" if p["pass"] else "FAIL"
            info = "".join(f" {k}={v}" for k, v in p["info"].items())
            print(f"{status} {p['name']}: {p['checked']} checked, {p['failures']} failures{info}")
            for c in p["counterexamples"]:
                print(f"    counterexample: {c}")
        print(f"suite {report['suite']}: {'PASS' if report['pass'] else 'FAIL'}")
    return 0 if report["pass"] else 1


# -- parser ---------------------------------------------------------------------------

def build_parser():
    parser = _Parser(prog="metricgames",
                     description="Approximate Ehrenfeucht-Fraisse games on finite metric "
                                 "and normed structures")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def common(p, pair=True, precision=True, clock=False):
        if pair:
            p.add_argument("--a", help="structure A (JSON)")
            p.add_argument("--b", help="structure B (JSON)")
        if precision:
            g = p.add_mutually_exclusive_group()
            g.add_argument("--eps", type=_rational, help="additive precision, e.g. 1/2")
            g.add_argument("--factor", type=_rational, help="multiplicative factor s, e.g. 3/2")
            p.add_argument("--menus", help="JSON file of per-round (s, k) menus")
            p.add_argument("--start", help="start pairs a:b,... (a:b:s:k,... with --factor)")
        if clock:
            p.add_argument("--clock", type=_natural)
        p.add_argument("--out", help="write output to this file")
        p.add_argument("--json", action="store_true", help="JSON output")

    p = sub.add_parser("validate", help="validate a structure file")
    p.add_argument("--in", dest="in_", help="structure file")
    p.add_argument("--a", help=argparse.SUPPRESS)
    common(p, pair=False, precision=False)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("distance", help="brute-force or game distance")
    common(p, precision=False)
    p.add_argument("--method", choices=["gh-brute", "lipschitz", "game"], default="gh-brute")
    p.add_argument("--semantics", choices=["additive", "multiplicative"])
    p.add_argument("--resolution", type=_rational, default=Fraction(1, 16))
    p.add_argument("--witness", action="store_true", help="include an optimal correspondence or bijection in --json output")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("solve", help="decide the winner of a clocked game")
    common(p, clock=True)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("watershed", help="least clock at which I wins")
    common(p)
    p.set_defaults(func=cmd_watershed, clock=None)

    p = sub.add_parser("scott", help="emit a Scott formula or sentence as JSON")
    common(p, clock=True)
    p.add_argument("--in", dest="in_", help=argparse.SUPPRESS)
    p.add_argument("--tuple", help="start tuple of A's points, comma separated")
    p.add_argument("--rank", type=_natural, help="emit the sentence at this rank")
    p.add_argument("--target", action="append", help="structure the sentence is evaluated on")
    p.add_argument("--tuple-bound", type=_natural, default=2)
    p.add_argument("--shared", action="store_true", help="serialize as a DAG of shared nodes")
    p.set_defaults(func=cmd_scott)

    p = sub.add_parser("play", help="play against the solver; moves on stdin")
    common(p, clock=True)
    p.add_argument("--role", choices=["I", "II"], required=True)
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("suite", help="run a property suite")
    p.add_argument("name")
    p.add_argument("--quick", action="store_true", help="smaller corpus and sample counts")
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "scott" and not (args.a or args.in_):
            raise UsageError("scott needs --a")
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(str(exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
