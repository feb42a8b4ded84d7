"""Compressed inside weights: cycle structure, characteristic equations,
unary polynomial encodings and graded generating sets."""

from ..errors import MswaError
from .chareq import CharEquation, char_equation
from .cycles import (
    has_two_node_disjoint_cycles, iter_simple_cycles, make_thomassen_graph,
    simple_cycles, support_graph,
)
from .graded import (
    GeneratingSet, StructureConstants, build_generating_set, graded_add,
    graded_compose, graded_decode, graded_encode,
)
from .kappa import KappaReport, verify_kappa_laws
from .unary import (
    InsideVector, UnaryInside, is_compressible, unary_add, unary_compose,
    unary_encode, unary_inside,
)


def analyze(m):
    """Per-symbol cycle and compressibility summary of an automaton."""
    sr = m.semiring
    report = {"semiring": sr.name, "d": m.d, "symbols": {}}
    for a in m.alphabet:
        graph = support_graph(m.mu[a])
        eq = char_equation(m.mu[a])
        report["symbols"][a] = {
            "simple_cycles": len(simple_cycles(graph)),
            "two_node_disjoint_cycles": has_two_node_disjoint_cycles(graph),
            "char_equation": {
                "left": [sr.format(c) for c in eq.left],
                "right": [sr.format(c) for c in eq.right],
            },
            "compressible": is_compressible(m, a),
        }
    try:
        report["generating_set_size"] = len(build_generating_set(m).generators)
    except MswaError as exc:
        report["generating_set_size"] = None
        report["generating_set_note"] = str(exc)
    return report


__all__ = [
    "CharEquation", "GeneratingSet", "InsideVector", "KappaReport", "StructureConstants",
    "UnaryInside", "analyze", "build_generating_set", "char_equation", "graded_add",
    "graded_compose", "graded_decode", "graded_encode", "has_two_node_disjoint_cycles",
    "is_compressible", "iter_simple_cycles", "make_thomassen_graph", "simple_cycles",
    "support_graph", "unary_add", "unary_compose", "unary_encode", "unary_inside",
    "verify_kappa_laws",
]
