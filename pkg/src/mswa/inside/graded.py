"""d-coefficient inside weights for automata compiled from expressions.

The generating set follows the expression tree: a subexpression over at most
one symbol contributes ``I, mu(a), ..., mu(a)^(d-1)``; a weight leaves it
unchanged; a union takes the direct sum; a product of generating sets
``{e_i}`` and ``{f_j}`` uses ``e_i (x) kappa2(D_i) f_j``, where ``D_i`` is the
sub-alphabet (grade) of ``e_i``.  Every generator carries the grade of the
words it spans, and products of generators are decomposed, once, inside the
block of the merged grade.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .. import construct
from ..core import Multiset, WeightedMultisetAutomaton
from ..errors import InternalInvariantError, UnsupportedError, ValidationError
from ..regex import Empty, Epsilon, Product, Scale, Star, Sym, Union, symbols
from ..semiring import Matrix, block_diag, kron
from ._exact import SpanSolver
from .unary import InsideVector


@dataclass(frozen=True)
class StructureConstants:
    """``g_i g_j = sum_k c[i][j][k] g_k``, stored sparsely as (i, j) -> ((k, c), ...)."""

    d: int
    entries: dict

    @property
    def nonzeros(self):
        return sum(len(v) for v in self.entries.values())


def _unary_generators(node, alphabet, sr):
    m = construct.compile(node, alphabet, sr)
    syms = symbols(node)
    a = next(iter(syms)) if syms else None
    mat = m.mu[a] if a is not None else Matrix.zeros(sr, m.d)
    gens = [Matrix.identity(sr, m.d)]
    for _ in range(1, m.d):
        gens.append(gens[-1] @ mat)
    grade = frozenset(syms)
    return m, gens, [frozenset()] + [grade] * (m.d - 1)


def _build(node, alphabet, sr):
    if len(symbols(node)) <= 1:
        return _unary_generators(node, alphabet, sr)
    if isinstance(node, Scale):
        m, gens, grades = _build(node.child, alphabet, sr)
        return construct.scale(node.weight, m), gens, grades
    if isinstance(node, Union):
        m1, g1, d1 = _build(node.left, alphabet, sr)
        m2, g2, d2 = _build(node.right, alphabet, sr)
        z1, z2 = Matrix.zeros(sr, m1.d), Matrix.zeros(sr, m2.d)
        gens = [block_diag(g, z2) for g in g1] + [block_diag(z1, h) for h in g2]
        return construct.union(m1, m2), gens, d1 + d2
    if isinstance(node, Product):
        m1, g1, d1 = _build(node.left, alphabet, sr)
        m2, g2, d2 = _build(node.right, alphabet, sr)
        gens, grades = [], []
        for e, de in zip(g1, d1):
            gate = [True] * m2.d
            for a in de:
                gate = [x and y for x, y in zip(gate, m2.kappa[a])]
            gate_m = Matrix.diag(sr, (sr.from_bool(x) for x in gate))
            for f, df in zip(g2, d2):
                gens.append(kron(e, gate_m @ f))
                grades.append(de | df)
        return construct.shuffle(m1, m2), gens, grades
    if isinstance(node, Star):
        raise UnsupportedError(
            "star operand uses several symbols syntactically; the graded generating set "
            "is only built for star operands written over a single symbol"
        )
    raise TypeError(f"not an expression node: {node!r}")


def _exact_entries(mat):
    return [Fraction(x) for x in mat.entries]


def _exact_mul(a, b, d):
    out = [Fraction(0)] * (d * d)
    for i in range(d):
        row = a[i * d:(i + 1) * d]
        acc = out[i * d:(i + 1) * d]
        for k, aik in enumerate(row):
            if aik:
                bk = b[k * d:(k + 1) * d]
                for j in range(d):
                    if bk[j]:
                        acc[j] += aik * bk[j]
        out[i * d:(i + 1) * d] = acc
    return out


class GeneratingSet:
    """Generators, grades and structure constants of ``ins(M)``."""

    def __init__(self, m):
        sr = m.semiring
        if not sr.is_ring:
            raise UnsupportedError(f"graded inside weights need a ring, not {sr.name!r}")
        if m.source is None:
            raise UnsupportedError("automaton carries no source expression")
        built, gens, grades = _build(m.source, m.alphabet, sr)
        if (built.d != m.d or built.lam != m.lam or built.rho != m.rho
                or any(built.mu[a] != m.mu[a] for a in m.alphabet)):
            raise InternalInvariantError("generating set was built for a different automaton")
        if len(gens) != m.d:
            raise InternalInvariantError(f"{len(gens)} generators for {m.d} states")
        self.automaton = m
        self.semiring = sr
        self.d = m.d
        self.generators = gens
        self.grades = grades
        blocks = {}
        for i, g in enumerate(grades):
            blocks.setdefault(g, []).append(i)
        self.blocks = blocks
        self._exact = [_exact_entries(g) for g in gens]
        self._solvers = {
            g: SpanSolver([self._exact[i] for i in idx], self.d * self.d) for g, idx in blocks.items()
        }
        self.structure = self._structure_constants()
        self._symbol_codes = {a: self.decompose(m.mu[a], frozenset([a])) for a in m.alphabet}
        self._empty_code = self.decompose(Matrix.identity(sr, self.d), frozenset())

    def _to_semiring(self, x):
        return self.semiring.coerce(x)

    def _solve(self, target, grade):
        """Exact coefficients of ``target`` (Fraction entries) in the ``grade`` block."""
        if not any(target):
            return {}
        solver = self._solvers.get(grade)
        sol = solver.solve(target) if solver is not None else None
        if sol is None:
            raise InternalInvariantError(
                f"matrix is not in the span of the generators of grade {sorted(grade)}"
            )
        idx = self.blocks[grade]
        return {idx[t]: c for t, c in enumerate(sol) if c}

    def decompose(self, mat, grade):
        """Inside vector of ``mat``, which must lie in the block of ``grade``."""
        coeffs = [self.semiring.zero] * self.d
        for k, c in self._solve(_exact_entries(mat), frozenset(grade)).items():
            coeffs[k] = self._to_semiring(c)
        return InsideVector(self, frozenset(grade), tuple(coeffs))

    def _structure_constants(self):
        d = self.d
        entries = {}
        for i, gi in enumerate(self._exact):
            if not any(gi):
                continue
            for j, gj in enumerate(self._exact):
                if not any(gj):
                    continue
                prod = _exact_mul(gi, gj, d)
                sol = self._solve(prod, self.grades[i] | self.grades[j])
                if sol:
                    entries[(i, j)] = tuple((k, self._to_semiring(c)) for k, c in sorted(sol.items()))
        return StructureConstants(self.d, entries)

    def _check(self, x):
        if x.owner is not self:
            raise ValidationError("inside vector belongs to a different automaton")

    def compose(self, x, y):
        self._check(x)
        self._check(y)
        sr = self.semiring
        out = [sr.zero] * self.d
        table = self.structure.entries
        for i, xi in enumerate(x.coeffs):
            if sr.is_zero(xi):
                continue
            for j, yj in enumerate(y.coeffs):
                if sr.is_zero(yj):
                    continue
                terms = table.get((i, j))
                if not terms:
                    continue
                xy = sr.times(xi, yj)
                for k, c in terms:
                    out[k] = sr.plus(out[k], sr.times(xy, c))
        grade = None if x.grade is None or y.grade is None else x.grade | y.grade
        return InsideVector(self, grade, tuple(out))

    def add(self, x, y):
        self._check(x)
        self._check(y)
        sr = self.semiring
        grade = x.grade if x.grade == y.grade else None
        return InsideVector(self, grade, tuple(map(sr.plus, x.coeffs, y.coeffs)))

    def power(self, x, n):
        result = self._empty_code
        base = x
        while n:
            if n & 1:
                result = self.compose(result, base)
            n >>= 1
            if n:
                base = self.compose(base, base)
        return result

    def encode(self, w):
        w = w if isinstance(w, Multiset) else Multiset(w)
        self.automaton._check_vocabulary(w)
        result = self._empty_code
        for a, n in w.items():
            result = self.compose(result, self.power(self._symbol_codes[a], n))
        return result

    def decode(self, x):
        self._check(x)
        sr = self.semiring
        acc = Matrix.zeros(sr, self.d)
        for c, g in zip(x.coeffs, self.generators):
            if not sr.is_zero(c):
                acc = acc + g.scale(c)
        return acc

    def grade_support(self, x):
        """Grades of the generators ``x`` actually uses."""
        sr = self.semiring
        return {self.grades[k] for k, c in enumerate(x.coeffs) if not sr.is_zero(c)}


@lru_cache(maxsize=128)
def _cached(m):
    return GeneratingSet(m)


def build_generating_set(m):
    if not isinstance(m, WeightedMultisetAutomaton):
        raise TypeError("expected a compiled automaton")
    return _cached(m)


def graded_encode(m, w):
    gs = m if isinstance(m, GeneratingSet) else build_generating_set(m)
    return gs.encode(w)


def graded_compose(x, y):
    return x.owner.compose(x, y)


def graded_add(x, y):
    return x.owner.add(x, y)


def graded_decode(x):
    return x.owner.decode(x)
