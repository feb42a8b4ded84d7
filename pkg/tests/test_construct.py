from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from mswa import construct
from mswa.core import EPSILON, Multiset, check_commutativity, enumerate_language
from mswa.corpus import random_mc_regex
from mswa.errors import AlphabetMismatchError, McViolationError, ValidationError, VocabularyError
from mswa.regex import CnfFormula, Product, cnf_to_regex, parse, regex_weight_oracle, satisfiable, size
from mswa.semiring import BOOLEAN, RATIONAL, REAL, VITERBI, Matrix


def comp(text, sr=RATIONAL, alphabet=None):
    return construct.compile(parse(text), alphabet, sr)


def test_atom_matrices():
    m = construct.atom_automaton("a", ("a", "b"), RATIONAL)
    assert m.d == 2
    assert m.lam.entries == (1, 0)
    assert m.mu["a"].to_rows() == [[0, 1], [0, 0]]
    assert m.kappa["a"] == (True, False)
    assert m.rho.entries == (0, 1)
    assert m.mu["b"].is_zero() and m.kappa["b"] == (True, True)
    assert m.weight(Multiset("a")) == 1 and m.weight(Multiset("b")) == 0


def test_atom_outside_alphabet():
    with pytest.raises(VocabularyError):
        construct.atom_automaton("z", ("a",), RATIONAL)


def test_scale():
    m = comp("a")
    assert construct.scale("1", m).weight(Multiset("a")) == 1
    zero = construct.scale("0", m)
    assert all(x == 0 for _, x in enumerate_language(zero, 3))
    assert comp("[2]a", REAL).weight(Multiset("a")) == 2


def test_union():
    assert comp("a|a", REAL).weight(Multiset("a")) == 2
    m = comp("a b*", alphabet=("a", "b"))
    u = construct.union(m, construct.empty_automaton(("a", "b"), RATIONAL))
    for w, x in enumerate_language(m, 4):
        assert u.weight(w) == x


def test_union_alphabet_mismatch():
    with pytest.raises(AlphabetMismatchError):
        construct.union(comp("a"), comp("b"))


def test_shuffle():
    m = comp("a b")
    assert m.weight(Multiset("ab")) == 1
    assert m.weight(Multiset("a")) == 0
    assert m.weight(Multiset("aa")) == 0
    assert comp("a a").weight(Multiset("aa")) == 1
    e = construct.shuffle(comp("a b"), construct.epsilon_automaton(("a", "b"), RATIONAL))
    for w, x in enumerate_language(m, 3):
        assert e.weight(w) == x


def test_star_examples():
    m = comp("a*", BOOLEAN)
    assert all(m.weight(Multiset("a" * n)) for n in range(6))
    m = comp("(a a)*")
    assert [m.weight(Multiset("a" * n)) for n in range(5)] == [1, 0, 1, 0, 1]
    m = comp("([2]a)*", REAL)
    assert [m.weight(Multiset("a" * n)) for n in range(5)] == [1, 2, 4, 8, 16]


def test_star_with_weighted_final_states():
    # the operand accepts a with weight 3 and aa with weight 5
    m = comp("([3]a | [5](a a))*")
    expect = {0: 1, 1: 3, 2: 3 * 3 + 5, 3: 27 + 2 * 15}
    for n, x in expect.items():
        assert m.weight(Multiset("a" * n)) == x


def test_state_counts():
    assert comp("a").d == 2
    assert comp("a b").d == 4
    assert comp("(a|b) c").d == 8
    assert comp("&").d == 1 and comp("0").d == 1
    assert comp("&").weight(EPSILON) == 1 and comp("0").weight(EPSILON) == 0


def test_invalid_star_rejected():
    with pytest.raises(McViolationError):
        comp("(a b)*")


def test_unknown_semiring_weight():
    with pytest.raises(ValidationError):
        comp("[0.5]a", BOOLEAN)


@given(st.integers(0, 100_000))
def test_random_regex_matches_oracle(seed):
    r = random.Random(seed)
    kind = r.choice(("rational", "real"))
    sr = RATIONAL if kind == "rational" else REAL
    alpha = random_mc_regex(r, kind=kind)
    m = construct.compile(alpha, ("a", "b", "c"), sr)
    for w, x in enumerate_language(m, 4):
        y = regex_weight_oracle(alpha, w, sr)
        assert x == y if sr is RATIONAL else abs(x - y) <= 1e-9


@given(st.integers(0, 100_000))
def test_compiled_automata_commute_and_respect_bound(seed):
    alpha = random_mc_regex(random.Random(seed))
    m = construct.compile(alpha, ("a", "b", "c"), RATIONAL)
    assert check_commutativity(m).max_violation == 0
    assert m.d == construct.state_count(alpha) <= 2 ** size(alpha)


@given(st.integers(0, 100_000))
def test_lazy_matches_dense(seed):
    alpha = random_mc_regex(random.Random(seed))
    m = construct.compile(alpha, ("a", "b", "c"), RATIONAL)
    lazy = construct.compile_lazy(alpha, ("a", "b", "c"), RATIONAL)
    dense = lazy.to_dense()
    assert dense.d == m.d
    for w, x in enumerate_language(m, 3):
        assert lazy.weight(w) == x == dense.weight(w)


@pytest.mark.parametrize("text", ["a*", "(a a)*", "[2]a (a|[3]&)", "a*|a a a", "a* a*"])
def test_unary_compile_has_source_state(text):
    m = comp(text)
    total = m.mu["a"]
    assert any(all(total[i, j] == 0 for i in range(m.d)) and m.lam[0, j] != 0 for j in range(m.d))


def test_viterbi_star():
    m = comp("([0.5]a | [0.2](a a))*", VITERBI)
    assert VITERBI.eq(m.weight(Multiset("aa")), 0.25)


def test_matrix_kappa_is_boolean():
    m = comp("[2](a|b) c*", REAL)
    assert all(isinstance(x, bool) for k in m.kappa.values() for x in k)
    assert m.kappa_matrix("c") == Matrix.diag(REAL, [REAL.from_bool(x) for x in m.kappa["c"]])


def test_fraction_weights():
    m = comp("[1/3]a* b")
    assert m.weight(Multiset("aab")) == Fraction(1, 3)


@pytest.mark.parametrize("clauses", [((1,),), ((1,), (-1,)), ((1, -1),), ((-1,), (-1,))])
def test_reduction_dense_and_lazy_agree(clauses):
    phi = CnfFormula(1, clauses)
    alpha, beta, w = cnf_to_regex(phi)
    dense = construct.compile(Product(alpha, beta), None, BOOLEAN)
    lazy = construct.compile_lazy(Product(alpha, beta), None, BOOLEAN)
    assert dense.weight(w) == lazy.weight(w) == satisfiable(phi)
