"""Weighted multiset regular expressions.

Concrete syntax::

    expr    := concat ('|' concat)*
    concat  := prefix+
    prefix  := ('[' WEIGHT ']')* postfix
    postfix := atom '*'*
    atom    := SYM | '&' | '0' | '(' expr ')'
    SYM     := [a-zA-Z] "'"?

``&`` is the empty multiset, ``0`` the empty language, juxtaposition is the
(shuffle) product and ``[k]`` multiplies by a weight.  Whitespace is ignored.
A weight is a decimal, optionally signed, with optional exponent; ``p/q``
fractions are accepted as well.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

from .core import EPSILON, Multiset
from .errors import McViolationError, RegexSyntaxError, ResourceError, ValidationError

ORACLE_BOUND = 10


class Regex:
    """Base class of expression nodes."""

    __slots__ = ()

    def children(self):
        return ()

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True, repr=False)
class Sym(Regex):
    name: str

    def __repr__(self):
        return f"Sym({self.name!r})"


@dataclass(frozen=True, repr=False)
class Epsilon(Regex):
    def __repr__(self):
        return "Epsilon()"


@dataclass(frozen=True, repr=False)
class Empty(Regex):
    def __repr__(self):
        return "Empty()"


@dataclass(frozen=True)
class Union(Regex):
    left: Regex
    right: Regex

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Product(Regex):
    left: Regex
    right: Regex

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Star(Regex):
    child: Regex

    def children(self):
        return (self.child,)


@dataclass(frozen=True)
class Scale(Regex):
    """``[weight] child``; ``weight`` is a literal string or a semiring value."""

    weight: object
    child: Regex

    def children(self):
        return (self.child,)


def size(alpha):
    return 1 + sum(size(c) for c in alpha.children())


def symbols(alpha):
    """Symbols occurring syntactically in the expression."""
    if isinstance(alpha, Sym):
        return frozenset([alpha.name])
    return frozenset().union(*(symbols(c) for c in alpha.children()))


def union_of(parts):
    return reduce(Union, parts)


def product_of(parts):
    parts = list(parts)
    if not parts:
        return Epsilon()
    return reduce(Product, parts)


# -- parsing -------------------------------------------------------------

_WEIGHT_RE = re.compile(r"\s*([+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?(?:/\d+)?)\s*\]")
_PREFIX_START = set("&0([") | set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ")


class _Parser:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def skip(self):
        text = self.text
        while self.pos < len(text) and text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def fail(self, message, offset=None):
        raise RegexSyntaxError(message, self.pos if offset is None else offset)

    def expr(self):
        node = self.concat()
        while self.peek() == "|":
            self.pos += 1
            node = Union(node, self.concat())
        return node

    def concat(self):
        if self.peek() not in _PREFIX_START or self.peek() == "":
            self._unexpected("expected an expression")
        node = self.prefix()
        while self.peek() and self.peek() in _PREFIX_START:
            node = Product(node, self.prefix())
        return node

    def prefix(self):
        if self.peek() == "[":
            start = self.pos
            self.pos += 1
            m = _WEIGHT_RE.match(self.text, self.pos)
            if not m:
                self.fail("malformed weight literal", start)
            self.pos = m.end()
            return Scale(m.group(1), self.prefix())
        return self.postfix()

    def postfix(self):
        node = self.atom()
        while self.peek() == "*":
            self.pos += 1
            node = Star(node)
        return node

    def atom(self):
        ch = self.peek()
        if ch == "&":
            self.pos += 1
            return Epsilon()
        if ch == "0":
            self.pos += 1
            return Empty()
        if ch == "(":
            start = self.pos
            self.pos += 1
            node = self.expr()
            if self.peek() != ")":
                self.fail("unbalanced parenthesis", start)
            self.pos += 1
            return node
        if ch.isascii() and ch.isalpha():
            self.pos += 1
            if self.pos < len(self.text) and self.text[self.pos] == "'":
                self.pos += 1
                return Sym(ch + "'")
            return Sym(ch)
        self._unexpected("expected a symbol, '&', '0' or '('")

    def _unexpected(self, message):
        ch = self.peek()
        if ch == "\\":
            self.fail("unknown escape")
        if ch == "":
            self.fail(f"{message}, found end of input")
        self.fail(f"{message}, found {ch!r}")


def parse(text):
    """Parse concrete syntax into an expression tree."""
    p = _Parser(text)
    node = p.expr()
    if p.peek() != "":
        p._unexpected("unexpected trailing input")
    return node


def _weight_text(k):
    if isinstance(k, str):
        return k
    if isinstance(k, bool):
        return "1" if k else "0"
    if isinstance(k, Fraction):
        return str(k)
    if isinstance(k, int):
        return str(k)
    return repr(float(k))


_PREC = {Union: 0, Product: 1, Scale: 2, Star: 3}


def to_text(alpha):
    """Print an expression so that ``parse(to_text(a)) == a``."""

    def go(node, min_prec):
        prec = _PREC.get(type(node), 4)
        if isinstance(node, Sym):
            s = node.name
        elif isinstance(node, Epsilon):
            s = "&"
        elif isinstance(node, Empty):
            s = "0"
        elif isinstance(node, Union):
            s = go(node.left, 0) + "|" + go(node.right, 1)
        elif isinstance(node, Product):
            s = go(node.left, 1) + " " + go(node.right, 2)
        elif isinstance(node, Scale):
            s = "[" + _weight_text(node.weight) + "]" + go(node.child, 2)
        elif isinstance(node, Star):
            s = go(node.child, 3) + "*"
        else:
            raise TypeError(f"not an expression node: {node!r}")
        return f"({s})" if prec < min_prec else s

    return go(alpha, 0)


# -- structural predicates -----------------------------------------------

def nullable(alpha):
    """True iff the empty multiset is in the language (weights ignored)."""
    if isinstance(alpha, (Epsilon, Star)):
        return True
    if isinstance(alpha, (Sym, Empty)):
        return False
    if isinstance(alpha, Union):
        return nullable(alpha.left) or nullable(alpha.right)
    if isinstance(alpha, Product):
        return nullable(alpha.left) and nullable(alpha.right)
    if isinstance(alpha, Scale):
        return nullable(alpha.child)
    raise TypeError(f"not an expression node: {alpha!r}")


def language_alphabet(alpha):
    """Symbols used by the language, or None when the language is empty."""
    if isinstance(alpha, Sym):
        return frozenset([alpha.name])
    if isinstance(alpha, Epsilon):
        return frozenset()
    if isinstance(alpha, Empty):
        return None
    if isinstance(alpha, Union):
        left, right = language_alphabet(alpha.left), language_alphabet(alpha.right)
        if left is None:
            return right
        if right is None:
            return left
        return left | right
    if isinstance(alpha, Product):
        left, right = language_alphabet(alpha.left), language_alphabet(alpha.right)
        if left is None or right is None:
            return None
        return left | right
    if isinstance(alpha, Star):
        inner = language_alphabet(alpha.child)
        return frozenset() if inner is None else inner
    if isinstance(alpha, Scale):
        return language_alphabet(alpha.child)
    raise TypeError(f"not an expression node: {alpha!r}")


@dataclass(frozen=True)
class Violation:
    path: tuple
    kind: str
    subtree: str
    message: str

    def __str__(self):
        where = "/".join(map(str, self.path)) or "root"
        return f"{self.message} in star '{self.subtree}' (path {where})"


def validate_mc(alpha):
    """List every starred subexpression whose operand is nullable or not unary."""
    found = []

    def walk(node, path):
        if isinstance(node, Star):
            child = node.child
            if nullable(child):
                found.append(Violation(path, "not-proper", to_text(node),
                                       "star-unary rule: star operand accepts the empty multiset"))
            alpha_set = language_alphabet(child)
            if alpha_set is None or len(alpha_set) != 1:
                shown = "empty language" if alpha_set is None else "{" + ",".join(sorted(alpha_set)) + "}"
                found.append(Violation(path, "not-unary", to_text(node),
                                       f"star-unary rule: star operand alphabet is {shown}, not a single symbol"))
        for i, c in enumerate(node.children()):
            walk(c, path + (i,))

    walk(alpha, ())
    return found


def require_mc(alpha):
    violations = validate_mc(alpha)
    if violations:
        raise McViolationError(violations)


# -- weighted semantics oracle -------------------------------------------

def regex_weight_oracle(alpha, w, semiring, bound=ORACLE_BOUND):
    """Weight of ``w`` under ``alpha`` by direct recursion on the expression.

    Products sum over all splits ``u + v = w`` (each pair of multisets once);
    a star over the single symbol ``a`` satisfies
    ``W(a^m) = sum_{j=1..m} W1(a^j) W(a^{m-j})`` with ``W(empty) = 1``.
    Exponential time; intended as a reference for small inputs.
    """
    w = w if isinstance(w, Multiset) else Multiset(w)
    if len(w) > bound:
        raise ResourceError(f"oracle bound {bound} exceeded by a multiset of size {len(w)}")
    require_mc(alpha)
    sr = semiring
    memo = {}
    star_symbol = {}

    def weight_of(node, v):
        key = (id(node), v)
        hit = memo.get(key)
        if hit is not None:
            return hit
        val = compute(node, v)
        memo[key] = val
        return val

    def compute(node, v):
        if isinstance(node, Sym):
            return sr.from_bool(v == Multiset([node.name]))
        if isinstance(node, Epsilon):
            return sr.from_bool(len(v) == 0)
        if isinstance(node, Empty):
            return sr.zero
        if isinstance(node, Scale):
            return sr.times(_coerce(sr, node.weight), weight_of(node.child, v))
        if isinstance(node, Union):
            return sr.plus(weight_of(node.left, v), weight_of(node.right, v))
        if isinstance(node, Product):
            total = sr.zero
            for u, rest in v.submultisets():
                left = weight_of(node.left, u)
                if sr.is_zero(left):
                    continue
                total = sr.plus(total, sr.times(left, weight_of(node.right, rest)))
            return total
        if isinstance(node, Star):
            if len(v) == 0:
                return sr.one
            if id(node) not in star_symbol:
                (star_symbol[id(node)],) = language_alphabet(node.child)
            a = star_symbol[id(node)]
            if v.alphabet != {a}:
                return sr.zero
            m = v[a]
            total = sr.zero
            for j in range(1, m + 1):
                head = weight_of(node.child, Multiset({a: j}))
                if sr.is_zero(head):
                    continue
                total = sr.plus(total, sr.times(head, weight_of(node, Multiset({a: m - j}))))
            return total
        raise TypeError(f"not an expression node: {node!r}")

    return weight_of(alpha, w)


def _coerce(semiring, k):
    return semiring.coerce(k) if isinstance(k, str) else k


# -- 3CNF reduction --------------------------------------------------------

VARIABLE_LETTERS = "xyzwvutsrqponmlkjihgfedcba"


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple

    def __post_init__(self):
        clauses = tuple(tuple(c) for c in self.clauses)
        object.__setattr__(self, "clauses", clauses)
        for clause in clauses:
            if not clause:
                raise ValidationError("empty clause")
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValidationError(f"literal {lit} out of range for {self.num_vars} variables")

    def evaluate(self, assignment):
        """``assignment[i]`` is the truth value of variable ``i + 1``."""
        return all(any(assignment[abs(l) - 1] == (l > 0) for l in c) for c in self.clauses)


def parse_dimacs(text):
    num_vars = None
    clauses = []
    current = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValidationError(f"invalid problem line: {line!r}")
            num_vars = int(parts[2])
            continue
        if num_vars is None:
            raise ValidationError("clause before the 'p cnf' problem line")
        try:
            lits = [int(tok) for tok in line.split()]
        except ValueError:
            raise ValidationError(f"invalid clause line: {line!r}") from None
        for lit in lits:
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(lit)
    if current:
        clauses.append(tuple(current))
    if num_vars is None:
        raise ValidationError("missing 'p cnf' problem line")
    return CnfFormula(num_vars, tuple(clauses))


def satisfiable(phi):
    """Truth-table satisfiability."""
    return any(phi.evaluate(bits) for bits in itertools.product((False, True), repeat=phi.num_vars))


def variable_symbol(i, negated=False):
    if i > len(VARIABLE_LETTERS):
        raise ValidationError(f"at most {len(VARIABLE_LETTERS)} variables are supported")
    name = VARIABLE_LETTERS[i - 1]
    return name + "'" if negated else name


def _power(node, n):
    return product_of([node] * n)


def cnf_to_regex(phi):
    """Map a CNF formula to ``(alpha, beta, w)``.

    ``phi`` is satisfiable iff ``w`` is in the language of ``alpha beta``.
    ``alpha`` turns disjunction into union and conjunction into product;
    ``beta`` supplies, per variable, all copies of one literal plus any
    number of copies of the other; ``w`` has ``n`` copies of every literal,
    ``n`` being the clause count.
    """
    n = len(phi.clauses)
    alpha = product_of(
        union_of([Sym(variable_symbol(abs(l), l < 0)) for l in clause]) for clause in phi.clauses
    )
    factors = []
    counts = {}
    for i in range(1, phi.num_vars + 1):
        x, xbar = Sym(variable_symbol(i)), Sym(variable_symbol(i, True))
        pos = product_of([_power(x, n), _power(Union(xbar, Epsilon()), n)])
        neg = product_of([_power(Union(x, Epsilon()), n), _power(xbar, n)])
        factors.append(Union(pos, neg))
        counts[x.name] = n
        counts[xbar.name] = n
    beta = product_of(factors)
    return alpha, beta, Multiset(counts)
