"""Seeded random instances: mc-regular expressions, CNF formulas, matrices."""

from __future__ import annotations

import random
from fractions import Fraction

from .regex import (
    CnfFormula, Empty, Epsilon, Product, Scale, Star, Sym, Union, size, validate_mc,
)


def random_weight(rng, kind="rational"):
    """A weight literal: ``p/q`` (or an integer) for rationals, a short decimal for reals."""
    if kind == "rational":
        num = rng.randint(-4, 6)
        den = rng.choice((1, 1, 2, 3, 4))
        return str(Fraction(num, den))
    return f"{rng.uniform(-1.5, 2.5):.3f}"


def _unary(rng, budget, sym, kind):
    """Proper expression over the single symbol ``sym`` with at most ``budget`` nodes."""
    if budget <= 1:
        return Sym(sym)
    r = rng.random()
    if r < 0.3:
        return Sym(sym)
    if r < 0.5 and budget >= 2:
        return Scale(random_weight(rng, kind), _unary(rng, budget - 1, sym, kind))
    if r < 0.75 and budget >= 3:
        left = rng.randint(1, budget - 2)
        return Union(_unary(rng, left, sym, kind), _unary(rng, budget - 1 - left, sym, kind))
    if budget >= 3:
        left = rng.randint(1, budget - 2)
        # a product is proper as soon as one side is
        return Product(_unary(rng, left, sym, kind), _any_unary(rng, budget - 1 - left, sym, kind))
    return Sym(sym)


def _any_unary(rng, budget, sym, kind):
    if budget >= 2 and rng.random() < 0.3:
        return Star(_unary(rng, budget - 1, sym, kind))
    return _unary(rng, budget, sym, kind)


def _expr(rng, budget, alphabet, kind):
    if budget <= 1:
        r = rng.random()
        if r < 0.85:
            return Sym(rng.choice(alphabet))
        return Epsilon() if r < 0.95 else Empty()
    r = rng.random()
    if r < 0.15:
        return Sym(rng.choice(alphabet))
    if r < 0.35:
        return Star(_unary(rng, budget - 1, rng.choice(alphabet), kind))
    if r < 0.5:
        return Scale(random_weight(rng, kind), _expr(rng, budget - 1, alphabet, kind))
    left = rng.randint(1, budget - 2) if budget >= 3 else 1
    right = budget - 1 - left
    if right < 1:
        return Sym(rng.choice(alphabet))
    node = Union if r < 0.72 else Product
    return node(_expr(rng, left, alphabet, kind), _expr(rng, right, alphabet, kind))


def random_mc_regex(rng, max_size=8, alphabet=("a", "b", "c"), kind="rational"):
    """Random mc-regular expression with at most ``max_size`` nodes.

    Star operands are written over a single symbol, so the result is always
    mc-valid (checked anyway).
    """
    if isinstance(rng, int):
        rng = random.Random(rng)
    alphabet = tuple(alphabet)
    while True:
        alpha = _expr(rng, rng.randint((max_size + 1) // 2, max_size), alphabet, kind)
        if size(alpha) <= max_size and not validate_mc(alpha):
            return alpha


def random_cnf(rng, max_vars=3, max_clauses=3, max_width=3):
    if isinstance(rng, int):
        rng = random.Random(rng)
    n = rng.randint(1, max_vars)
    clauses = []
    for _ in range(rng.randint(1, max_clauses)):
        width = rng.randint(1, max_width)
        clause = []
        for _ in range(width):
            clause.append(rng.randint(1, n) * rng.choice((1, -1)))
        clauses.append(tuple(clause))
    return CnfFormula(n, tuple(clauses))


def random_int_matrix(rng, d, low=-5, high=5, density=1.0):
    if isinstance(rng, int):
        rng = random.Random(rng)
    return [[rng.randint(low, high) if rng.random() < density else 0 for _ in range(d)] for _ in range(d)]

