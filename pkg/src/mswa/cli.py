"""Command-line front end: ``mswa <subcommand> ...``.

Exit status: 0 success, 1 usage error, 2 validation error, 3 resource cap,
4 numeric or degenerate-model error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, construct, inside, train as training
from .core import Multiset, WeightedMultisetAutomaton, check_commutativity, read_multisets, write_multisets
from .errors import InternalInvariantError, MswaError, UsageError, ValidationError
from .regex import Product, cnf_to_regex, parse, parse_dimacs, satisfiable, size, symbols, to_text, validate_mc
from .semiring import BOOLEAN, SEMIRINGS


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _read_text(path):
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write_text(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def _load_automaton(path):
    try:
        return WeightedMultisetAutomaton.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from None


def _expression(args):
    if getattr(args, "expr", None) is not None:
        return parse(args.expr)
    if getattr(args, "file", None) is not None:
        return parse(_read_text(args.file).strip())
    raise UsageError("give an expression with -e or a file with -f")


def _alphabet(args):
    if getattr(args, "alphabet", None):
        return tuple(args.alphabet.replace(",", " ").split())
    return None


def _automaton_from(args):
    if getattr(args, "automaton", None):
        return _load_automaton(args.automaton)
    return construct.compile(_expression(args), _alphabet(args), args.semiring)


# -- subcommands ---------------------------------------------------------------

def cmd_parse(args):
    alpha = _expression(args)
    violations = validate_mc(alpha)
    if args.json:
        out = {
            "regex": to_text(alpha),
            "size": size(alpha),
            "symbols": sorted(symbols(alpha)),
            "mc_valid": not violations,
            "violations": [
                {"path": list(v.path), "kind": v.kind, "subtree": v.subtree, "message": v.message}
                for v in violations
            ],
        }
        print(json.dumps(out, indent=2))
    else:
        print(to_text(alpha))
    if violations:
        for v in violations:
            print(f"error: {v}", file=sys.stderr)
        return 2
    return 0


def cmd_compile(args):
    m = construct.compile(_expression(args), _alphabet(args), args.semiring)
    _write_text(args.output, m.dumps() + "\n")
    if args.dot:
        _write_text(args.dot, m.to_dot())
    return 0


def cmd_weight(args):
    m = _automaton_from(args)
    ws = args.multiset if args.multiset else [""]
    for line in ws:
        print(m.semiring.format(m.weight(Multiset.parse(line))))
    return 0


def _analysis_text(report):
    lines = [f"semiring {report['semiring']}, {report['d']} states"]
    for a, info in report["symbols"].items():
        lines.append(f"symbol {a}:")
        lines.append(f"  simple cycles: {info['simple_cycles']}")
        lines.append(f"  two node-disjoint cycles: {'yes' if info['two_node_disjoint_cycles'] else 'no'}")
        lines.append(f"  characteristic equation left:  {' '.join(info['char_equation']['left'])}")
        lines.append(f"  characteristic equation right: {' '.join(info['char_equation']['right'])}")
        lines.append(f"  compressible: {'yes' if info['compressible'] else 'no'}")
    size_ = report.get("generating_set_size")
    lines.append(f"generating set size: {size_ if size_ is not None else 'n/a'}")
    if report.get("generating_set_note"):
        lines.append(f"  ({report['generating_set_note']})")
    return "\n".join(lines) + "\n"


def cmd_analyze(args):
    m = _automaton_from(args)
    report = inside.analyze(m)
    commut = check_commutativity(m)
    kappa = inside.verify_kappa_laws(m)
    report["commutativity_violation"] = commut.max_violation
    report["kappa_laws"] = kappa.as_dict()
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        sys.stdout.write(_analysis_text(report))
        print(f"commutativity violation: {commut.max_violation!r}")
        print(f"kappa laws hold: {'yes' if kappa.ok else 'no'}")
    if args.dot:
        _write_text(args.dot, m.to_dot())
    return 0


def cmd_train(args):
    data = read_multisets(_read_text(args.data).rstrip("\n"))
    mode = {"skeleton": "regex_skeleton", "free": "free"}[args.mode]
    config = training.TrainingConfig(
        size_bound=args.bound, learning_rate=args.lr, epochs=args.epochs,
        penalty_start=args.penalty_start, penalty_growth=args.penalty_growth,
        seed=args.seed, mode=mode, batch_size=args.batch_size,
    )
    if mode == "regex_skeleton":
        if args.regex is None:
            raise UsageError("skeleton mode needs --regex")
        skeleton = parse(_read_text(args.regex).strip())
        result = training.train(config, data, skeleton=skeleton, alphabet=_alphabet(args))
    else:
        if args.states is None:
            raise UsageError("free mode needs --states")
        result = training.train(config, data, states=args.states, alphabet=_alphabet(args))
    _write_text(args.output, result.automaton.dumps() + "\n")
    curve = result.curve_csv()
    if args.curve:
        _write_text(args.curve, curve)
    else:
        sys.stderr.write(curve)
    return 0


def cmd_sample(args):
    m = _load_automaton(args.automaton)
    if m.semiring.name != "real":
        raise ValidationError("sampling needs a real-weighted automaton")
    draws = training.sample(m, args.bound, np.random.default_rng(args.seed), size=args.count)
    _write_text(args.output, write_multisets(draws))
    return 0


def cmd_reduce_sat(args):
    phi = parse_dimacs(_read_text(args.cnf))
    alpha, beta, w = cnf_to_regex(phi)
    print(to_text(Product(alpha, beta)))
    print(str(w))
    if not args.check:
        return 0
    member = not BOOLEAN.is_zero(construct.compile_lazy(Product(alpha, beta), None, BOOLEAN).weight(w))
    sat = satisfiable(phi)
    if sat != member:
        raise InternalInvariantError(
            f"reduction disagrees: formula is {'satisfiable' if sat else 'unsatisfiable'} "
            f"but w is {'in' if member else 'not in'} L(alpha beta)"
        )
    if sat:
        print("SAT-consistent: w in L(alpha beta)")
    else:
        print("UNSAT-consistent: w not in L(alpha beta)")
    return 0


# -- argument parsing ----------------------------------------------------------

def _add_source(p, automaton=True):
    p.add_argument("-e", "--expr", help="regular expression text")
    p.add_argument("-f", "--file", help="file holding a regular expression")
    if automaton:
        p.add_argument("-a", "--automaton", help="automaton JSON file")
    p.add_argument("--semiring", default="real", choices=sorted(SEMIRINGS))
    p.add_argument("--alphabet", help="symbols, comma or space separated (default: those in the expression)")


def build_parser():
    parser = _Parser(prog="mswa", description="Weighted multiset automata toolkit.")
    parser.add_argument("--version", action="version", version=f"mswa {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("parse", help="parse and check an expression")
    p.add_argument("expr_pos", nargs="?", metavar="EXPR")
    p.add_argument("-e", "--expr")
    p.add_argument("-f", "--file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("compile", help="compile an expression to automaton JSON")
    _add_source(p, automaton=False)
    p.add_argument("-o", "--output")
    p.add_argument("--dot", metavar="PATH", help="also write Graphviz text")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("weight", help="weight of multisets")
    _add_source(p)
    p.add_argument("-w", "--multiset", action="append", help="whitespace-separated symbols (repeatable)")
    p.set_defaults(func=cmd_weight)

    p = sub.add_parser("analyze", help="cycles, characteristic equations, compressibility")
    p.add_argument("automaton_pos", nargs="?", metavar="AUTOMATON")
    _add_source(p)
    p.add_argument("--json", action="store_true")
    p.add_argument("--dot", metavar="PATH")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("train", help="learn weights from multiset data")
    p.add_argument("--mode", choices=("skeleton", "free"), required=True)
    p.add_argument("--regex", help="file with the skeleton expression")
    p.add_argument("--states", type=int)
    p.add_argument("--data", required=True, help="one multiset per line")
    p.add_argument("--alphabet")
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--lr", type=float, default=0.05)
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--penalty-start", type=float, default=0.0)
    p.add_argument("--penalty-growth", type=float, default=1.0)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", help="automaton JSON (default stdout)")
    p.add_argument("--curve", help="loss curve CSV (default stderr)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("sample", help="draw multisets from a real automaton")
    p.add_argument("-a", "--automaton", required=True)
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("-n", "--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("reduce-sat", help="map a DIMACS CNF formula to an expression and target multiset")
    p.add_argument("cnf")
    p.add_argument("--check", action="store_true", help="also test membership against a truth table")
    p.set_defaults(func=cmd_reduce_sat)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "parse" and args.expr is None and args.file is None:
            args.expr = args.expr_pos
        if args.command == "analyze" and args.automaton is None:
            args.automaton = args.automaton_pos
        return args.func(args)
    except MswaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
