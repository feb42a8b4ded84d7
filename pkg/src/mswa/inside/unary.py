"""Inside weights of one symbol as polynomials of degree < d.

By the characteristic equation, ``mu(a)^d`` is a fixed combination of lower
powers, so any polynomial in ``mu(a)`` reduces to ``d`` coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from ..errors import InternalInvariantError, UnsupportedError, ValidationError, VocabularyError
from ..semiring import Matrix
from .chareq import char_equation
from .cycles import has_two_node_disjoint_cycles, support_graph


@dataclass(frozen=True, eq=False)
class InsideVector:
    """Coefficients of an inside-weight matrix in a fixed generating set.

    ``grade`` is the sub-alphabet the represented words use, or None for a
    sum across several grades.
    """

    owner: object
    grade: object
    coeffs: tuple

    def decode(self):
        return self.owner.decode(self)

    def __len__(self):
        return len(self.coeffs)


def _same_owner(x, y):
    if x.owner is not y.owner:
        raise ValidationError("inside vectors belong to different automata or symbols")


def is_compressible(m, a):
    """Whether ``mu(a)``'s characteristic equation has only ``x^d`` on its left.

    The coefficient verdict is cross-checked against the disjoint-cycle test.
    They can disagree only through additive cancellation, which is possible
    in rings alone; there the coefficient verdict stands.
    """
    if a not in m.mu:
        raise VocabularyError(f"symbol {a!r} is not in the automaton alphabet")
    mat = m.mu[a]
    by_coeffs = char_equation(mat).left_has_only_leading_term()
    by_graph = not has_two_node_disjoint_cycles(support_graph(mat))
    if by_coeffs != by_graph and not m.semiring.is_ring:
        raise InternalInvariantError(
            f"compressibility of mu({a}) disagrees: coefficients say {by_coeffs}, cycles say {by_graph}"
        )
    return by_coeffs


class UnaryInside:
    """Polynomial arithmetic in ``mu(a)`` modulo its characteristic equation."""

    def __init__(self, m, a):
        if a not in m.mu:
            raise VocabularyError(f"symbol {a!r} is not in the automaton alphabet")
        sr = m.semiring
        if not sr.is_ring and not is_compressible(m, a):
            raise UnsupportedError(
                f"mu({a}) has two node-disjoint cycles; over the {sr.name} semiring "
                "its powers have no degree-d rewrite"
            )
        self.automaton = m
        self.symbol = a
        self.semiring = sr
        self.d = m.d
        self.matrix = m.mu[a]
        self.equation = char_equation(self.matrix)
        self.rule = self.equation.rewrite_rule()
        self._powers = None

    def _reduce(self, poly):
        sr = self.semiring
        d = self.d
        poly = list(poly)
        for k in range(len(poly) - 1, d - 1, -1):
            c = poly[k]
            if sr.is_zero(c):
                continue
            poly[k] = sr.zero
            base = k - d
            for j, r in enumerate(self.rule):
                if not sr.is_zero(r):
                    poly[base + j] = sr.plus(poly[base + j], sr.times(c, r))
        poly = poly[:d] + [sr.zero] * max(0, d - len(poly))
        return tuple(poly)

    def _vector(self, coeffs, grade):
        return InsideVector(self, grade, tuple(coeffs))

    def unit(self, k):
        sr = self.semiring
        return self._reduce([sr.one if i == k else sr.zero for i in range(max(k + 1, self.d))])

    def encode(self, n):
        """Coefficients of ``mu(a)^n``."""
        if n < 0:
            raise ValueError("power must be nonnegative")
        grade = frozenset([self.symbol]) if n else frozenset()
        if n < self.d:
            return self._vector(self.unit(n), grade)
        result = self.unit(0)
        base = self.unit(1)
        while n:
            if n & 1:
                result = self._mul(result, base)
            n >>= 1
            if n:
                base = self._mul(base, base)
        return self._vector(result, grade)

    def _mul(self, x, y):
        sr = self.semiring
        out = [sr.zero] * (2 * self.d - 1)
        for i, xi in enumerate(x):
            if sr.is_zero(xi):
                continue
            for j, yj in enumerate(y):
                if not sr.is_zero(yj):
                    out[i + j] = sr.plus(out[i + j], sr.times(xi, yj))
        return self._reduce(out)

    def compose(self, x, y):
        _same_owner(x, y)
        return self._vector(self._mul(x.coeffs, y.coeffs), _merge(x.grade, y.grade))

    def add(self, x, y):
        _same_owner(x, y)
        sr = self.semiring
        grade = x.grade if x.grade == y.grade else None
        return self._vector(map(sr.plus, x.coeffs, y.coeffs), grade)

    def powers(self):
        if self._powers is None:
            pw = [Matrix.identity(self.semiring, self.d)]
            for _ in range(1, self.d):
                pw.append(pw[-1] @ self.matrix)
            self._powers = pw
        return self._powers

    def decode(self, x):
        sr = self.semiring
        acc = Matrix.zeros(sr, self.d)
        for c, p in zip(x.coeffs, self.powers()):
            if not sr.is_zero(c):
                acc = acc + p.scale(c)
        return acc


def _merge(g1, g2):
    if g1 is None or g2 is None:
        return None
    return g1 | g2


@lru_cache(maxsize=256)
def unary_inside(m, a):
    return UnaryInside(m, a)


def unary_encode(m, a, n):
    return unary_inside(m, a).encode(n)


def unary_compose(x, y):
    return x.owner.compose(x, y)


def unary_add(x, y):
    return x.owner.add(x, y)
