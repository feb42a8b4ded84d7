from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from mswa.core import EPSILON, Multiset
from mswa.corpus import random_cnf
from mswa.errors import McViolationError, RegexSyntaxError, ResourceError, ValidationError
from mswa.regex import (
    CnfFormula, Empty, Epsilon, Product, Scale, Star, Sym, Union, cnf_to_regex, language_alphabet,
    nullable, parse, parse_dimacs, regex_weight_oracle, require_mc, satisfiable, size, to_text,
    validate_mc,
)
from mswa.semiring import BOOLEAN, RATIONAL, REAL

weights = st.sampled_from(["0.5", "2", "-1.25", "3/4", "1e-2", "0"])
leaves = st.one_of(
    st.sampled_from(["a", "b", "c", "x'"]).map(Sym), st.just(Epsilon()), st.just(Empty())
)
trees = st.recursive(
    leaves,
    lambda kids: st.one_of(
        st.tuples(kids, kids).map(lambda t: Union(*t)),
        st.tuples(kids, kids).map(lambda t: Product(*t)),
        kids.map(Star),
        st.tuples(weights, kids).map(lambda t: Scale(*t)),
    ),
    max_leaves=8,
)


@settings(max_examples=500)
@given(trees)
def test_print_parse_round_trip(alpha):
    assert parse(to_text(alpha)) == alpha


def test_parse_examples():
    assert parse("a") == Sym("a")
    assert parse("[0.5](a|b) c*") == Product(Scale("0.5", Union(Sym("a"), Sym("b"))), Star(Sym("c")))
    assert parse("x' x") == Product(Sym("x'"), Sym("x"))
    assert parse(" a  |  b ") == Union(Sym("a"), Sym("b"))


def test_precedence():
    assert parse("[2]a*") == Scale("2", Star(Sym("a")))
    assert parse("a b|c") == Union(Product(Sym("a"), Sym("b")), Sym("c"))
    assert size(parse("(a|b) c")) == 5


@pytest.mark.parametrize("text", ["(a", "a|", "[0.5", "[x]a", "a)", "*a", "", "a $"])
def test_syntax_errors(text):
    with pytest.raises(ValidationError):
        parse(text)


def test_syntax_error_offset():
    with pytest.raises(RegexSyntaxError) as info:
        parse("ab)")
    assert info.value.offset == 2


def test_nullable():
    assert nullable(parse("a*"))
    assert not nullable(parse("a b"))
    assert nullable(parse("(a|&)"))
    assert nullable(parse("[0]&"))


def test_language_alphabet():
    assert language_alphabet(parse("a | 0 b")) == {"a"}
    assert language_alphabet(parse("0")) is None
    assert language_alphabet(parse("a b*")) == {"a", "b"}
    assert language_alphabet(parse("0*")) == frozenset()


def test_validate_mc():
    (v,) = validate_mc(parse("(ab)*"))
    assert v.kind == "not-unary" and "star-unary rule" in v.message
    (v,) = validate_mc(parse("(a|&)*"))
    assert v.kind == "not-proper"
    assert validate_mc(parse("a* b* (a|b)")) == []
    with pytest.raises(McViolationError):
        require_mc(parse("c (a b)*"))


def test_violation_location():
    (v,) = validate_mc(parse("c (a|&)*"))
    assert v.path == (1,) and v.subtree == "(a|&)*"


def test_oracle_examples():
    assert regex_weight_oracle(parse("a"), Multiset("a"), RATIONAL) == 1
    assert regex_weight_oracle(parse("a"), EPSILON, RATIONAL) == 0
    assert regex_weight_oracle(parse("[2]a [3]a"), Multiset("aa"), REAL) == 6
    assert regex_weight_oracle(parse("a*"), Multiset("aaa"), BOOLEAN) is True


def test_oracle_star_counts_compositions():
    # (a|aa)* over counts: compositions of 4 into parts 1 and 2
    assert regex_weight_oracle(parse("(a|a a)*"), Multiset("aaaa"), RATIONAL) == 5


def test_oracle_product_counts_splits_once():
    assert regex_weight_oracle(parse("(a|b)(a|b)"), Multiset("ab"), RATIONAL) == 2
    assert regex_weight_oracle(parse("(a|b)(a|b)"), Multiset("aa"), RATIONAL) == 1


def test_oracle_bound():
    with pytest.raises(ResourceError):
        regex_weight_oracle(parse("a*"), Multiset("a" * 11), RATIONAL)


def test_oracle_rejects_non_mc():
    with pytest.raises(McViolationError):
        regex_weight_oracle(parse("(ab)*"), Multiset("ab"), RATIONAL)


def _member(alpha, beta, w):
    return regex_weight_oracle(Product(alpha, beta), w, BOOLEAN, bound=64)


def test_reduction_single_clause():
    phi = CnfFormula(2, ((1, 2),))
    alpha, beta, w = cnf_to_regex(phi)
    assert alpha == Union(Sym("x"), Sym("y"))
    assert w == Multiset(["x", "x'", "y", "y'"])
    assert _member(alpha, beta, w)


def test_reduction_contradiction():
    phi = CnfFormula(1, ((1,), (-1,)))
    alpha, beta, w = cnf_to_regex(phi)
    assert w == Multiset({"x": 2, "x'": 2})
    assert not _member(alpha, beta, w)


def test_reduction_tautology():
    alpha, beta, w = cnf_to_regex(CnfFormula(1, ((1, -1),)))
    assert _member(alpha, beta, w)


@pytest.mark.parametrize("seed", range(12))
def test_reduction_small_random(seed):
    phi = random_cnf(random.Random(seed), max_vars=2, max_clauses=2)
    alpha, beta, w = cnf_to_regex(phi)
    assert _member(alpha, beta, w) == satisfiable(phi)


def test_dimacs():
    phi = parse_dimacs("c comment\np cnf 3 2\n1 -3 0\n2 3\n-1 0\n")
    assert phi == CnfFormula(3, ((1, -3), (2, 3, -1)))
    with pytest.raises(ValidationError):
        parse_dimacs("1 2 0\n")
    with pytest.raises(ValidationError):
        parse_dimacs("p cnf 1 1\n2 0\n")


def test_weight_literal_forms():
    (k,) = [parse("[3/4]a").weight]
    assert RATIONAL.coerce(k) == Fraction(3, 4)
    assert parse("[-2.5e1]a").weight == "-2.5e1"
