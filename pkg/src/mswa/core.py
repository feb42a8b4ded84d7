"""Multisets, weighted multiset automata and their evaluation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import comb
from typing import Mapping

from .errors import ResourceError, ShapeError, ValidationError, VocabularyError
from .semiring import Matrix, Semiring, get_semiring

ENUMERATION_CAP = 1_000_000


class Multiset:
    """Finite multiset of symbols, kept in canonical (sorted, zero-free) form."""

    __slots__ = ("_items", "_hash")

    def __init__(self, counts=None):
        if counts is None:
            counts = {}
        elif isinstance(counts, Multiset):
            counts = counts.counts
        elif not isinstance(counts, Mapping):
            bag = {}
            for sym in counts:
                bag[sym] = bag.get(sym, 0) + 1
            counts = bag
        items = []
        for sym, n in counts.items():
            if not isinstance(n, int) or n < 0:
                raise ValueError(f"count of {sym!r} must be a nonnegative integer, got {n!r}")
            if n:
                items.append((sym, n))
        items.sort()
        self._items = tuple(items)
        self._hash = hash(self._items)

    @classmethod
    def parse(cls, line):
        """Whitespace-separated symbols; an empty line is the empty multiset."""
        return cls(line.split())

    @property
    def counts(self):
        return dict(self._items)

    def items(self):
        return self._items

    def __getitem__(self, sym):
        for s, n in self._items:
            if s == sym:
                return n
        return 0

    def __len__(self):
        return sum(n for _, n in self._items)

    size = property(__len__)

    @property
    def alphabet(self):
        return frozenset(s for s, _ in self._items)

    def elements(self):
        """Symbols with repetition, in canonical order."""
        return [s for s, n in self._items for _ in range(n)]

    def __add__(self, other):
        counts = self.counts
        for s, n in other.items():
            counts[s] = counts.get(s, 0) + n
        return Multiset(counts)

    def __sub__(self, other):
        counts = self.counts
        for s, n in other.items():
            left = counts.get(s, 0) - n
            if left < 0:
                raise ValueError(f"{other} is not contained in {self}")
            counts[s] = left
        return Multiset(counts)

    def __le__(self, other):
        return all(other[s] >= n for s, n in self._items)

    def __eq__(self, other):
        if not isinstance(other, Multiset):
            return NotImplemented
        return self._items == other._items

    def __hash__(self):
        return self._hash

    def __str__(self):
        return " ".join(self.elements())

    def __repr__(self):
        if not self._items:
            return "Multiset()"
        body = ", ".join(f"{s!r}: {n}" for s, n in self._items)
        return f"Multiset({{{body}}})"

    def submultisets(self):
        """Every u with u <= self, as (u, self - u) pairs."""
        syms = [s for s, _ in self._items]
        limits = [n for _, n in self._items]

        def rec(i, chosen):
            if i == len(syms):
                u = Multiset(dict(zip(syms, chosen)))
                v = Multiset({s: lim - c for s, lim, c in zip(syms, limits, chosen)})
                yield u, v
                return
            for c in range(limits[i] + 1):
                yield from rec(i + 1, chosen + [c])

        return rec(0, [])


EPSILON = Multiset()


@dataclass(frozen=True, eq=False)
class WeightedMultisetAutomaton:
    """``(d, alphabet, lambda, mu, rho, kappa)`` over a commutative semiring.

    ``kappa[a]`` is the Boolean diagonal of the "has not read ``a`` yet"
    matrix; it is interpreted into the semiring on demand.  ``source`` keeps
    the regular expression an automaton was compiled from, if any.
    """

    semiring: Semiring
    d: int
    alphabet: tuple
    lam: Matrix
    mu: dict
    rho: Matrix
    kappa: dict
    source: object = field(default=None, compare=False)

    def __post_init__(self):
        d = self.d
        object.__setattr__(self, "alphabet", tuple(sorted(self.alphabet)))
        if self.lam.shape != (1, d):
            raise ShapeError(f"lambda must be 1x{d}, got {self.lam.rows}x{self.lam.cols}")
        if self.rho.shape != (d, 1):
            raise ShapeError(f"rho must be {d}x1, got {self.rho.rows}x{self.rho.cols}")
        for a in self.alphabet:
            if a not in self.mu:
                raise ShapeError(f"symbol {a!r} has no transition matrix")
            if self.mu[a].shape != (d, d):
                raise ShapeError(f"mu({a}) must be {d}x{d}")
            kap = self.kappa.get(a)
            if kap is None or len(kap) != d:
                raise ShapeError(f"kappa({a}) must be a length-{d} Boolean vector")
        extra = set(self.mu) - set(self.alphabet)
        if extra:
            raise ShapeError(f"transition matrices for symbols outside the alphabet: {sorted(extra)}")
        object.__setattr__(self, "kappa", {a: tuple(bool(x) for x in self.kappa[a]) for a in self.alphabet})

    def kappa_matrix(self, a):
        return Matrix.diag(self.semiring, (self.semiring.from_bool(x) for x in self.kappa[a]))

    def _check_vocabulary(self, w):
        unknown = w.alphabet - set(self.alphabet)
        if unknown:
            raise VocabularyError(f"symbols {sorted(unknown)} are not in the automaton alphabet")

    def mu_of(self, w):
        return mu_of_multiset(self, w)

    def weight(self, w):
        return weight(self, w)

    # -- serialization -------------------------------------------------

    def to_json(self):
        sr = self.semiring
        out = {
            "semiring": sr.name,
            "d": self.d,
            "alphabet": list(self.alphabet),
            "lambda": [sr.to_json(x) for x in self.lam.entries],
            "mu": {a: [[sr.to_json(x) for x in row] for row in self.mu[a].to_rows()]
                   for a in self.alphabet},
            "rho": [sr.to_json(x) for x in self.rho.entries],
            "kappa": {a: [int(x) for x in self.kappa[a]] for a in self.alphabet},
        }
        if self.source is not None:
            from .regex import to_text
            out["regex"] = to_text(self.source)
        return out

    def dumps(self):
        return json.dumps(self.to_json(), indent=2, sort_keys=False)

    @classmethod
    def from_json(cls, obj):
        try:
            sr = get_semiring(obj["semiring"])
            d = int(obj["d"])
            alphabet = list(obj["alphabet"])
            lam = Matrix.row_vector(sr, (sr.from_json(x) for x in obj["lambda"]))
            rho = Matrix.col_vector(sr, (sr.from_json(x) for x in obj["rho"]))
            mu = {a: Matrix.from_rows(sr, [[sr.from_json(x) for x in row] for row in obj["mu"][a]])
                  for a in alphabet}
            kappa = {a: [bool(x) for x in obj["kappa"][a]] for a in alphabet}
        except KeyError as exc:
            raise ValidationError(f"automaton file is missing field {exc}") from None
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"malformed automaton file: {exc}") from None
        source = None
        if obj.get("regex") is not None:
            from .regex import parse
            source = parse(obj["regex"])
        return cls(sr, d, tuple(alphabet), lam, mu, rho, kappa, source=source)

    @classmethod
    def loads(cls, text):
        return cls.from_json(json.loads(text))

    def to_dot(self):
        sr = self.semiring
        lines = ["digraph {", "  rankdir=LR;"]
        for q in range(self.d):
            shape = "circle" if sr.is_zero(self.rho[q, 0]) else "doublecircle"
            label = f"q{q}"
            if not sr.is_zero(self.rho[q, 0]) and not sr.eq(self.rho[q, 0], sr.one):
                label += f"/{sr.format(self.rho[q, 0])}"
            lines.append(f'  q{q} [shape={shape}, label="{label}"];')
        for q in range(self.d):
            if not sr.is_zero(self.lam[0, q]):
                lines.append(f"  start{q} [shape=point];")
                lines.append(f'  start{q} -> q{q} [label="{sr.format(self.lam[0, q])}"];')
        for a in self.alphabet:
            mat = self.mu[a]
            for i in range(self.d):
                for j in range(self.d):
                    if not sr.is_zero(mat[i, j]):
                        lines.append(f'  q{i} -> q{j} [label="{a}/{sr.format(mat[i, j])}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _as_multiset(w):
    return w if isinstance(w, Multiset) else Multiset(w)


def mu_of_multiset(m, w):
    """Product of ``mu(a)`` over the symbols of ``w`` in canonical order."""
    w = _as_multiset(w)
    m._check_vocabulary(w)
    result = Matrix.identity(m.semiring, m.d)
    for a, n in w.items():
        result = result @ (m.mu[a] ** n)
    return result


def weight(m, w):
    """``lambda mu(w) rho``, propagated as a row vector."""
    w = _as_multiset(w)
    m._check_vocabulary(w)
    v = m.lam
    for a in w.elements():
        v = v @ m.mu[a]
    return (v @ m.rho).entries[0]


@dataclass
class CommutativityReport:
    max_violation: float
    pairs: list

    @property
    def ok(self):
        return not self.pairs


def check_commutativity(m):
    """Largest entrywise gap between ``mu(a) mu(b)`` and ``mu(b) mu(a)``."""
    worst = 0.0
    bad = []
    syms = m.alphabet
    for i, a in enumerate(syms):
        for b in syms[i + 1:]:
            ab = m.mu[a] @ m.mu[b]
            ba = m.mu[b] @ m.mu[a]
            dev = ab.max_deviation(ba)
            worst = max(worst, dev)
            if not ab.equals(ba):
                bad.append((a, b, dev))
    return CommutativityReport(worst, bad)


def count_multisets(num_symbols, size_bound):
    """Number of multisets of size <= size_bound over num_symbols symbols."""
    return comb(size_bound + num_symbols, num_symbols)


def _sort_key(counts):
    return (sum(counts), tuple(-c for c in counts))


def forward_table(m, size_bound, cap=ENUMERATION_CAP):
    """Row vectors ``lambda mu(w)`` for every multiset of size <= size_bound.

    Returns a list of (count tuple in alphabet order, row vector).
    """
    if size_bound < 0:
        raise ValueError("size_bound must be nonnegative")
    total = count_multisets(len(m.alphabet), size_bound)
    if total > cap:
        raise ResourceError(f"{total} multisets exceed the enumeration cap of {cap}")
    frontier = [((), size_bound, m.lam)]
    for a in m.alphabet:
        mat = m.mu[a]
        nxt = []
        for counts, budget, v in frontier:
            for k in range(budget + 1):
                nxt.append((counts + (k,), budget - k, v))
                if k < budget:
                    v = v @ mat
        frontier = nxt
    return [(counts, v) for counts, _, v in frontier]


def enumerate_language(m, size_bound, cap=ENUMERATION_CAP):
    """Every multiset of size <= size_bound with its weight, smallest first."""
    table = forward_table(m, size_bound, cap)
    table.sort(key=lambda item: _sort_key(item[0]))
    out = []
    for counts, v in table:
        w = Multiset(dict(zip(m.alphabet, counts)))
        out.append((w, (v @ m.rho).entries[0]))
    return out


def read_multisets(text):
    """Parse a data file: one multiset per line, blank line = empty multiset."""
    return [Multiset.parse(line) for line in text.splitlines()]


def write_multisets(data):
    return "".join(str(w) + "\n" for w in data)
