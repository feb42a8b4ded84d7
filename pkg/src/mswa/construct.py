"""Compile mc-regular expressions into weighted multiset automata.

Every rule keeps the Boolean ``kappa`` diagonals ("state has not read ``a``
yet") that the product rule needs to feed each symbol to the left factor
only before the right factor has consumed it.

Besides the dense :func:`compile`, :func:`compile_lazy` yields the same
automaton as an on-the-fly transition function over structured states, so
large products can be evaluated without materializing their matrices.
"""

from __future__ import annotations

from .core import Multiset, WeightedMultisetAutomaton
from .errors import AlphabetMismatchError, InternalInvariantError, ValidationError, VocabularyError
from .regex import (
    Empty, Epsilon, Product, Scale, Star, Sym, Union,
    language_alphabet, nullable, require_mc, symbols,
)
from .semiring import REAL, Matrix, block_diag, get_semiring, hconcat, kron, vconcat

WMA = WeightedMultisetAutomaton


def _const_automaton(alphabet, semiring, final):
    sr = semiring
    one = Matrix(sr, 1, 1, [sr.one])
    zero = Matrix(sr, 1, 1, [sr.zero])
    return WMA(sr, 1, tuple(alphabet), one, {a: zero for a in alphabet},
               one if final else zero, {a: (True,) for a in alphabet})


def epsilon_automaton(alphabet, semiring=REAL):
    """One state, initial and final, no transitions."""
    return _const_automaton(alphabet, get_semiring(semiring), True)


def empty_automaton(alphabet, semiring=REAL):
    return _const_automaton(alphabet, get_semiring(semiring), False)


def atom_automaton(a, alphabet, semiring=REAL):
    sr = get_semiring(semiring)
    alphabet = tuple(sorted(alphabet))
    if a not in alphabet:
        raise VocabularyError(f"symbol {a!r} is not in the alphabet {list(alphabet)}")
    z, o = sr.zero, sr.one
    mu = {}
    kappa = {}
    for b in alphabet:
        if b == a:
            mu[b] = Matrix(sr, 2, 2, [z, o, z, z])
            kappa[b] = (True, False)
        else:
            mu[b] = Matrix.zeros(sr, 2)
            kappa[b] = (True, True)
    return WMA(sr, 2, alphabet, Matrix.row_vector(sr, [o, z]), mu,
               Matrix.col_vector(sr, [z, o]), kappa)


def scale(k, m):
    """Multiply every accepting path by ``k`` (through the final weights)."""
    sr = m.semiring
    if isinstance(k, str):
        k = sr.coerce(k)
    return WMA(sr, m.d, m.alphabet, m.lam, dict(m.mu), m.rho.scale(k), dict(m.kappa))


def _check_compatible(m1, m2):
    if m1.alphabet != m2.alphabet:
        raise AlphabetMismatchError(f"alphabets differ: {list(m1.alphabet)} vs {list(m2.alphabet)}")
    if m1.semiring is not m2.semiring:
        raise AlphabetMismatchError(f"semirings differ: {m1.semiring.name} vs {m2.semiring.name}")


def union(m1, m2):
    """Disjoint union with both start vectors kept (block-diagonal matrices)."""
    _check_compatible(m1, m2)
    return WMA(
        m1.semiring, m1.d + m2.d, m1.alphabet,
        hconcat(m1.lam, m2.lam),
        {a: block_diag(m1.mu[a], m2.mu[a]) for a in m1.alphabet},
        vconcat(m1.rho, m2.rho),
        {a: m1.kappa[a] + m2.kappa[a] for a in m1.alphabet},
    )


def shuffle(m1, m2):
    """Product automaton on state pairs.

    ``mu(a) = mu1(a) (x) kappa2(a) + I (x) mu2(a)``: a symbol may go to the
    left factor only while the right factor has not read it.
    """
    _check_compatible(m1, m2)
    sr = m1.semiring
    eye1 = Matrix.identity(sr, m1.d)
    mu = {}
    kappa = {}
    for a in m1.alphabet:
        mu[a] = kron(m1.mu[a], m2.kappa_matrix(a)) + kron(eye1, m2.mu[a])
        kappa[a] = tuple(x and y for x in m1.kappa[a] for y in m2.kappa[a])
    return WMA(sr, m1.d * m2.d, m1.alphabet, kron(m1.lam, m2.lam), mu,
               kron(m1.rho, m2.rho), kappa)


def _restart_state(m):
    sr = m.semiring
    for q, x in enumerate(m.lam.entries):
        if sr.eq(x, sr.one):
            return q
    return None


def star_unary(m1, a=None):
    """Kleene star of an automaton for a proper unary language.

    Every final state gets the transitions leaving the start states
    (``mu(b) = mu1(b) + rho1 lambda1 mu1(b)``), and the empty multiset is
    accepted with weight one through a single start state.
    """
    src = m1.source
    if a is not None and src is not None:
        alpha_set = language_alphabet(src)
        if nullable(src) or alpha_set != frozenset([a]):
            raise ValidationError(f"star operand must be a proper language over {{{a}}}")
    sr = m1.semiring
    mu = {}
    for b in m1.alphabet:
        restart = m1.lam @ m1.mu[b]
        mu[b] = m1.mu[b] + (m1.rho @ restart)
    q = _restart_state(m1)
    if q is None:
        rho = m1.rho + m1.lam.transpose()
    else:
        bump = Matrix.col_vector(sr, (sr.one if i == q else sr.zero for i in range(m1.d)))
        rho = m1.rho + bump
    return WMA(sr, m1.d, m1.alphabet, m1.lam, mu, rho, dict(m1.kappa))


def state_count(alpha):
    """Number of states compile() produces, by the inductive formula."""
    if isinstance(alpha, Sym):
        return 2
    if isinstance(alpha, (Epsilon, Empty)):
        return 1
    if isinstance(alpha, Union):
        return state_count(alpha.left) + state_count(alpha.right)
    if isinstance(alpha, Product):
        return state_count(alpha.left) * state_count(alpha.right)
    if isinstance(alpha, (Star, Scale)):
        return state_count(alpha.child)
    raise TypeError(f"not an expression node: {alpha!r}")


def _alphabet_for(alpha, alphabet):
    syms = symbols(alpha)
    if alphabet is None:
        return tuple(sorted(syms))
    alphabet = tuple(sorted(set(alphabet)))
    missing = syms - set(alphabet)
    if missing:
        raise VocabularyError(f"expression uses symbols {sorted(missing)} outside the alphabet")
    return alphabet


def compile(alpha, alphabet=None, semiring=REAL):
    """Build the multiset automaton of an mc-regular expression.

    ``alphabet`` defaults to the symbols occurring in ``alpha``.
    """
    sr = get_semiring(semiring)
    require_mc(alpha)
    sigma = _alphabet_for(alpha, alphabet)

    def go(node):
        if isinstance(node, Sym):
            return atom_automaton(node.name, sigma, sr)
        if isinstance(node, Epsilon):
            return epsilon_automaton(sigma, sr)
        if isinstance(node, Empty):
            return empty_automaton(sigma, sr)
        if isinstance(node, Scale):
            return scale(node.weight, go(node.child))
        if isinstance(node, Union):
            return union(go(node.left), go(node.right))
        if isinstance(node, Product):
            return shuffle(go(node.left), go(node.right))
        if isinstance(node, Star):
            return star_unary(go(node.child))
        raise TypeError(f"not an expression node: {node!r}")

    m = go(alpha)
    return WMA(sr, m.d, m.alphabet, m.lam, m.mu, m.rho, m.kappa, source=alpha)


# -- lazy evaluation ---------------------------------------------------------

class _Node:
    """A component automaton given by its transition function."""

    d = 0

    def initial(self):
        raise NotImplementedError

    def final(self, s):
        raise NotImplementedError

    def step(self, s, a):
        raise NotImplementedError

    def kappa(self, s, a):
        raise NotImplementedError

    def states(self):
        raise NotImplementedError

    def index(self, s):
        raise NotImplementedError


class _Const(_Node):
    d = 1

    def __init__(self, sr, accepting):
        self.sr = sr
        self.accepting = accepting

    def initial(self):
        return [(0, self.sr.one)]

    def final(self, s):
        return self.sr.one if self.accepting else self.sr.zero

    def step(self, s, a):
        return ()

    def kappa(self, s, a):
        return True

    def states(self):
        return [0]

    def index(self, s):
        return 0


class _Atom(_Node):
    d = 2

    def __init__(self, sr, a):
        self.sr = sr
        self.a = a

    def initial(self):
        return [(0, self.sr.one)]

    def final(self, s):
        return self.sr.one if s == 1 else self.sr.zero

    def step(self, s, a):
        return [(1, self.sr.one)] if (s == 0 and a == self.a) else ()

    def kappa(self, s, a):
        return a != self.a or s == 0

    def states(self):
        return [0, 1]

    def index(self, s):
        return s


class _Scale(_Node):
    def __init__(self, sr, k, inner):
        self.sr = sr
        self.k = k
        self.inner = inner
        self.d = inner.d

    def initial(self):
        return self.inner.initial()

    def final(self, s):
        return self.sr.times(self.k, self.inner.final(s))

    def step(self, s, a):
        return self.inner.step(s, a)

    def kappa(self, s, a):
        return self.inner.kappa(s, a)

    def states(self):
        return self.inner.states()

    def index(self, s):
        return self.inner.index(s)


class _Union(_Node):
    def __init__(self, sr, left, right):
        self.sr = sr
        self.left = left
        self.right = right
        self.d = left.d + right.d
        self._steps = {}

    def _part(self, side):
        return self.left if side == 0 else self.right

    def initial(self):
        return ([((0, s), x) for s, x in self.left.initial()]
                + [((1, s), x) for s, x in self.right.initial()])

    def final(self, s):
        return self._part(s[0]).final(s[1])

    def step(self, s, a):
        key = (s, a)
        hit = self._steps.get(key)
        if hit is None:
            side, inner = s
            hit = self._steps[key] = [((side, t), x) for t, x in self._part(side).step(inner, a)]
        return hit

    def kappa(self, s, a):
        return self._part(s[0]).kappa(s[1], a)

    def states(self):
        return [(0, s) for s in self.left.states()] + [(1, s) for s in self.right.states()]

    def index(self, s):
        return self.left.index(s[1]) if s[0] == 0 else self.left.d + self.right.index(s[1])


class _Shuffle(_Node):
    def __init__(self, sr, left, right):
        self.sr = sr
        self.left = left
        self.right = right
        self.d = left.d * right.d
        self._steps = {}
        self._kappa = {}

    def initial(self):
        times = self.sr.times
        return [((s1, s2), times(x1, x2))
                for s1, x1 in self.left.initial() for s2, x2 in self.right.initial()]

    def final(self, s):
        return self.sr.times(self.left.final(s[0]), self.right.final(s[1]))

    def step(self, s, a):
        key = (s, a)
        out = self._steps.get(key)
        if out is None:
            s1, s2 = s
            out = []
            if self.right.kappa(s2, a):
                out.extend(((t, s2), x) for t, x in self.left.step(s1, a))
            out.extend(((s1, t), x) for t, x in self.right.step(s2, a))
            self._steps[key] = out
        return out

    def kappa(self, s, a):
        key = (s, a)
        hit = self._kappa.get(key)
        if hit is None:
            hit = self._kappa[key] = self.left.kappa(s[0], a) and self.right.kappa(s[1], a)
        return hit

    def states(self):
        return [(s1, s2) for s1 in self.left.states() for s2 in self.right.states()]

    def index(self, s):
        return self.left.index(s[0]) * self.right.d + self.right.index(s[1])


class _Star(_Node):
    def __init__(self, sr, inner):
        self.sr = sr
        self.inner = inner
        self.d = inner.d
        self.starts = [(s, x) for s, x in inner.initial() if not sr.is_zero(x)]
        self.restart = next((s for s, x in self.starts if sr.eq(x, sr.one)), None)

    def initial(self):
        return self.inner.initial()

    def final(self, s):
        f = self.inner.final(s)
        if self.restart is None:
            bump = self.sr.sum(x for t, x in self.starts if t == s)
        else:
            bump = self.sr.from_bool(s == self.restart)
        return self.sr.plus(f, bump)

    def step(self, s, a):
        sr = self.sr
        out = list(self.inner.step(s, a))
        f = self.inner.final(s)
        if not sr.is_zero(f):
            for i, li in self.starts:
                fl = sr.times(f, li)
                out.extend((t, sr.times(fl, x)) for t, x in self.inner.step(i, a))
        return out

    def kappa(self, s, a):
        return self.inner.kappa(s, a)

    def states(self):
        return self.inner.states()

    def index(self, s):
        return self.inner.index(s)


class LazyAutomaton:
    """Sparse forward evaluation of the automaton compile() would build."""

    def __init__(self, root, alphabet, semiring, source=None):
        self.root = root
        self.alphabet = alphabet
        self.semiring = semiring
        self.source = source
        self._steps = {}

    @property
    def d(self):
        return self.root.d

    def step(self, s, a):
        key = (s, a)
        hit = self._steps.get(key)
        if hit is None:
            sr = self.semiring
            acc = {}
            for t, x in self.root.step(s, a):
                acc[t] = sr.plus(acc[t], x) if t in acc else x
            hit = [(t, x) for t, x in acc.items() if not sr.is_zero(x)]
            self._steps[key] = hit
        return hit

    def forward(self, w):
        """Sparse row vector ``lambda mu(w)`` as a dict state -> weight."""
        w = w if isinstance(w, Multiset) else Multiset(w)
        unknown = w.alphabet - set(self.alphabet)
        if unknown:
            raise VocabularyError(f"symbols {sorted(unknown)} are not in the automaton alphabet")
        sr = self.semiring
        vec = {}
        for s, x in self.root.initial():
            if not sr.is_zero(x):
                vec[s] = sr.plus(vec[s], x) if s in vec else x
        for a in w.elements():
            nxt = {}
            for s, x in vec.items():
                for t, y in self.step(s, a):
                    xy = sr.times(x, y)
                    nxt[t] = sr.plus(nxt[t], xy) if t in nxt else xy
            vec = {t: x for t, x in nxt.items() if not sr.is_zero(x)}
        return vec

    def weight(self, w):
        sr = self.semiring
        return sr.sum(sr.times(x, self.root.final(s)) for s, x in self.forward(w).items())

    def to_dense(self):
        sr = self.semiring
        root = self.root
        d = root.d
        states = root.states()
        if len(states) != d:
            raise InternalInvariantError("lazy state enumeration disagrees with the state count")
        lam = [sr.zero] * d
        for s, x in root.initial():
            i = root.index(s)
            lam[i] = sr.plus(lam[i], x)
        rho = [root.final(s) for s in states]
        mu = {}
        kappa = {}
        for a in self.alphabet:
            entries = [sr.zero] * (d * d)
            for s in states:
                i = root.index(s)
                for t, x in root.step(s, a):
                    j = i * d + root.index(t)
                    entries[j] = sr.plus(entries[j], x)
            mu[a] = Matrix(sr, d, d, entries)
            kappa[a] = tuple(root.kappa(s, a) for s in states)
        return WMA(sr, d, self.alphabet, Matrix.row_vector(sr, lam), mu,
                   Matrix.col_vector(sr, rho), kappa, source=self.source)


def compile_lazy(alpha, alphabet=None, semiring=REAL):
    """Same automaton as :func:`compile`, evaluated on demand."""
    sr = get_semiring(semiring)
    require_mc(alpha)
    sigma = _alphabet_for(alpha, alphabet)

    def go(node):
        if isinstance(node, Sym):
            return _Atom(sr, node.name)
        if isinstance(node, Epsilon):
            return _Const(sr, True)
        if isinstance(node, Empty):
            return _Const(sr, False)
        if isinstance(node, Scale):
            k = sr.coerce(node.weight) if isinstance(node.weight, str) else node.weight
            return _Scale(sr, k, go(node.child))
        if isinstance(node, Union):
            return _Union(sr, go(node.left), go(node.right))
        if isinstance(node, Product):
            return _Shuffle(sr, go(node.left), go(node.right))
        if isinstance(node, Star):
            return _Star(sr, go(node.child))
        raise TypeError(f"not an expression node: {node!r}")

    return LazyAutomaton(go(alpha), sigma, sr, source=alpha)
