"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

from __future__ import annotations

import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from mswa import construct
from mswa.core import Multiset, WeightedMultisetAutomaton, check_commutativity, enumerate_language, mu_of_multiset
from mswa.corpus import random_cnf, random_mc_regex
from mswa.inside import (
    build_generating_set, char_equation, graded_add, graded_compose, graded_decode, graded_encode,
    has_two_node_disjoint_cycles, make_thomassen_graph, simple_cycles, support_graph, verify_kappa_laws,
)
from mswa.regex import (
    Empty, Epsilon, Product, Scale, Star, Sym, Union, cnf_to_regex, regex_weight_oracle, satisfiable,
    size,
)
from mswa.semiring import BOOLEAN, RATIONAL, REAL, Matrix
from mswa.train import ParameterSet, TrainingConfig, grad_nll, nll, sample, train

from oracles import charpoly, nx_cycle_count, nx_has_disjoint_cycles

SIGMA = ("a", "b", "c")
CORPUS_SIZE = 500
MAX_VARS_TIMES_CLAUSES = 6


def _corpus():
    r = random.Random(2024)
    out = []
    for i in range(CORPUS_SIZE):
        kind = "rational" if i % 2 == 0 else "real"
        out.append((kind, random_mc_regex(r, max_size=8, alphabet=SIGMA, kind=kind)))
    return out


CORPUS = _corpus()


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail, elapsed, limit):
        within = elapsed < limit
        verdict = "PASS" if ok and within else "FAIL"
        with capsys.disabled():
            print(f"\n[{verdict}] criterion {number}: {detail} ({elapsed:.2f}s, limit {limit}s)")
        assert ok, detail
        assert within, f"criterion {number} took {elapsed:.2f}s, limit {limit}s"

    return emit


def test_criterion_01_construction_matches_oracle(report):
    start = time.perf_counter()
    checked = mismatches = 0
    worst = 0.0
    for kind, alpha in CORPUS:
        sr = RATIONAL if kind == "rational" else REAL
        m = construct.compile(alpha, SIGMA, sr)
        for w, x in enumerate_language(m, 5):
            y = regex_weight_oracle(alpha, w, sr)
            checked += 1
            if sr is RATIONAL:
                mismatches += x != y
            else:
                worst = max(worst, abs(x - y))
                mismatches += abs(x - y) > 1e-9
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and len(CORPUS) >= 500
    report(1, ok, f"{len(CORPUS)} expressions, {checked} weights, {mismatches} mismatches, "
                  f"max real deviation {worst:.1e}", elapsed, 60)


def test_criterion_02_commutativity_and_kappa_laws(report):
    start = time.perf_counter()
    bad = 0
    for _, alpha in CORPUS:
        m = construct.compile(alpha, SIGMA, RATIONAL)
        if check_commutativity(m).max_violation != 0 or not verify_kappa_laws(m).ok:
            bad += 1
    elapsed = time.perf_counter() - start
    report(2, bad == 0, f"{len(CORPUS)} compiled automata, {bad} with a nonzero deviation", elapsed, 10)


def _expected_states(alpha):
    if isinstance(alpha, Sym):
        return 2
    if isinstance(alpha, (Epsilon, Empty)):
        return 1
    if isinstance(alpha, Union):
        return _expected_states(alpha.left) + _expected_states(alpha.right)
    if isinstance(alpha, Product):
        return _expected_states(alpha.left) * _expected_states(alpha.right)
    if isinstance(alpha, (Star, Scale)):
        return _expected_states(alpha.child)
    raise TypeError(alpha)


def test_criterion_03_state_bound(report):
    compiled = [(alpha, construct.compile(alpha, SIGMA, RATIONAL)) for _, alpha in CORPUS]
    start = time.perf_counter()
    bad = sum(1 for alpha, m in compiled
              if not (m.d == _expected_states(alpha) == construct.state_count(alpha) <= 2 ** size(alpha)))
    elapsed = time.perf_counter() - start
    largest = max(m.d for _, m in compiled)
    report(3, bad == 0, f"{len(compiled)} automata, {bad} off the formula or above 2^|alpha|, "
                        f"largest d = {largest}", elapsed, 1)


def test_criterion_04_sat_reduction(report):
    r = random.Random(7)
    start = time.perf_counter()
    disagreements = sat_count = 0
    largest = 0
    formulas = []
    while len(formulas) < 200:
        phi = random_cnf(r, max_vars=3, max_clauses=3)
        # three variables and three clauses together put ~10^10 states behind the target
        if phi.num_vars * len(phi.clauses) <= MAX_VARS_TIMES_CLAUSES:
            formulas.append(phi)
    for phi in formulas:
        alpha, beta, w = cnf_to_regex(phi)
        lazy = construct.compile_lazy(Product(alpha, beta), None, BOOLEAN)
        largest = max(largest, lazy.d)
        member = bool(lazy.weight(w))
        sat = satisfiable(phi)
        sat_count += sat
        disagreements += member != sat
    elapsed = time.perf_counter() - start
    report(4, disagreements == 0, f"200 formulas ({sat_count} satisfiable), {disagreements} disagreements, "
                                  f"largest automaton {largest} states", elapsed, 120)


def test_criterion_05_ring_cayley_hamilton(report):
    r = random.Random(5)
    start = time.perf_counter()
    bad = 0
    for _ in range(200):
        d = r.randint(1, 6)
        rows = [[r.randint(-6, 6) for _ in range(d)] for _ in range(d)]
        mat = Matrix.from_rows(RATIONAL, rows)
        poly = char_equation(mat).collapse()
        acc = Matrix.zeros(RATIONAL, d)
        for k, c in enumerate(poly):
            acc = acc + (mat ** (d - k)).scale(c)
        if not acc.is_zero() or list(poly) != charpoly(rows):
            bad += 1
    elapsed = time.perf_counter() - start
    report(5, bad == 0, f"200 integer matrices (d <= 6), {bad} failures against the determinant oracle",
           elapsed, 30)


def test_criterion_06_semiring_cayley_hamilton(report):
    r = random.Random(6)
    start = time.perf_counter()
    bad = 0
    for _ in range(100):
        d = r.randint(1, 5)
        rows = [[r.choice((0, 0, 1, 2, 3, 5)) for _ in range(d)] for _ in range(d)]
        mat = Matrix.from_rows(RATIONAL, rows)
        eq = char_equation(mat)
        left, right = eq.evaluate(mat)
        negative = any(c < 0 for c in eq.left + eq.right)
        if left != right or negative:
            bad += 1
    elapsed = time.perf_counter() - start
    report(6, bad == 0, f"100 natural-number matrices (d <= 5), {bad} with left != right", elapsed, 30)


def _random_digraphs(seed, count, max_nodes):
    r = random.Random(seed)
    out = []
    for _ in range(count):
        d = r.randint(1, max_nodes)
        p = r.uniform(0.05, 0.6)
        rows = [[r.randint(1, 9) if r.random() < p else 0 for _ in range(d)] for _ in range(d)]
        out.append(rows)
    return out


def test_criterion_07_compressibility_verdicts(report):
    graphs = _random_digraphs(8, 200, 8)
    start = time.perf_counter()
    bad = compressible = 0
    for rows in graphs:
        mat = Matrix.from_rows(RATIONAL, rows)
        by_coeffs = char_equation(mat).left_has_only_leading_term()
        g = support_graph(mat)
        by_cycles = not has_two_node_disjoint_cycles(g)
        compressible += by_coeffs
        bad += not (by_coeffs == by_cycles == (not nx_has_disjoint_cycles(g)))
    elapsed = time.perf_counter() - start
    report(7, bad == 0, f"200 weighted digraphs (d <= 8), {compressible} compressible, {bad} disagreements",
           elapsed, 30)


def test_criterion_08_cycle_bound(report):
    start = time.perf_counter()
    family = [len(simple_cycles(make_thomassen_graph(k))) for k in range(1, 11)]
    family_ok = family == [2 ** (k - 1) for k in range(1, 11)]
    graphs = [support_graph(Matrix.from_rows(RATIONAL, rows)) for rows in _random_digraphs(9, 300, 10)]
    graphs += [support_graph(m.mu[a]) for m in
               (construct.compile(alpha, SIGMA, RATIONAL) for _, alpha in CORPUS[:100]) if m.d <= 10
               for a in SIGMA]
    checked = over = 0
    for g in graphs:
        if has_two_node_disjoint_cycles(g):
            continue
        checked += 1
        n = len(simple_cycles(g))
        over += n > 2 ** (len(g) - 1) or n != nx_cycle_count(g)
    elapsed = time.perf_counter() - start
    ok = family_ok and over == 0 and checked > 0
    report(8, ok, f"family counts {family}; {checked} graphs without disjoint cycles, {over} above the bound",
           elapsed, 60)


def _exact_weights(alpha):
    """Same tree with decimal literals read as exact fractions."""
    if isinstance(alpha, Scale):
        return Scale(str(Fraction(alpha.weight)), _exact_weights(alpha.child))
    kids = alpha.children()
    return type(alpha)(*(_exact_weights(c) for c in kids)) if kids else alpha


def test_criterion_09_graded_generating_sets(report):
    r = random.Random(9)
    start = time.perf_counter()
    bad = automata = pairs = 0
    for _, alpha in CORPUS:
        m = construct.compile(_exact_weights(alpha), SIGMA, RATIONAL)
        if m.d > 16:
            continue
        automata += 1
        gs = build_generating_set(m)
        ok = len(gs.generators) == m.d
        for _ in range(3):
            u = Multiset(r.choices(SIGMA, k=r.randint(0, 4)))
            v = Multiset(r.choices(SIGMA, k=r.randint(0, 4)))
            mu_u, mu_v = mu_of_multiset(m, u), mu_of_multiset(m, v)
            x, y = graded_encode(m, u), graded_encode(m, v)
            ok &= graded_decode(graded_compose(x, y)) == mu_u @ mu_v
            ok &= graded_decode(graded_add(x, y)) == mu_u + mu_v
            ok &= x.grade == u.alphabet
            pairs += 1
        bad += not ok
    elapsed = time.perf_counter() - start
    report(9, bad == 0 and automata > 0, f"{automata} automata (d <= 16), {pairs} word pairs, {bad} failures",
           elapsed, 120)


GENERATOR = WeightedMultisetAutomaton(
    REAL, 2, ("a", "b"), Matrix.row_vector(REAL, [0.7, 0.3]),
    {"a": Matrix.diag(REAL, [0.6, 0.2]), "b": Matrix.diag(REAL, [0.3, 0.7])},
    Matrix.col_vector(REAL, [0.5, 1.0]), {"a": (True, True), "b": (True, True)},
)


def _central_differences(params, data, n, h=1e-5):
    out = np.zeros_like(params.values)
    for i in range(len(out)):
        up, down = params.values.copy(), params.values.copy()
        up[i] += h
        down[i] -= h
        out[i] = (nll(params.copy(up).to_automaton(), data, n)
                  - nll(params.copy(down).to_automaton(), data, n)) / (2 * h)
    return out


def test_criterion_10_training(report):
    start = time.perf_counter()
    # (a) gradients of 50 random models against central differences
    rng = np.random.default_rng(10)
    worst = 0.0
    for k in range(50):
        d = 2 + k % 2
        params = ParameterSet.free(d, ("a", "b"), rng)
        params = params.copy(np.abs(params.values) + 0.05)
        n = 2 + k % 2
        data = [Multiset(rng.choice(["a", "b"], size=int(rng.integers(0, n + 1))).tolist()) for _ in range(4)]
        g = grad_nll(params, data, n)
        fd = _central_differences(params, data, n)
        rel = np.abs(g - fd) / np.maximum(np.maximum(np.abs(g), np.abs(fd)), 1e-3)
        worst = max(worst, float(rel.max()))
    ok_a = worst <= 1e-4

    # (b) Bernoulli skeleton
    from mswa.regex import parse
    data = [Multiset("a")] * 75 + [Multiset("b")] * 25
    res = train(TrainingConfig(size_bound=1, learning_rate=0.5, epochs=200, seed=0), data,
                skeleton=parse("[1]a | [1]b"))
    p, q = res.params.values
    ratio = p / (p + q)
    ok_b = abs(ratio - 0.75) <= 0.02 and all(row["commut_violation"] == 0 for row in res.curve)

    # (c) free 3-state model against a 2-state generator
    sample_data = sample(GENERATOR, 3, np.random.default_rng(0), size=300)
    target = nll(GENERATOR, sample_data, 3)
    cfg = TrainingConfig(size_bound=3, learning_rate=0.05, epochs=1120, penalty_start=0.1,
                         penalty_growth=1.01, mode="free", seed=0)
    free = train(cfg, sample_data, states=3)
    learned = free.curve[-1]["nll"]
    gap = (learned - target) / target
    violation = free.commutativity.max_violation
    ok_c = gap <= 0.05 and violation < 1e-3

    elapsed = time.perf_counter() - start
    detail = (f"(a) max relative gradient error {worst:.1e}; (b) p/(p+q) = {ratio:.4f}; "
              f"(c) NLL {learned:.3f} vs generator {target:.3f} ({gap:+.2%}), "
              f"commutativity violation {violation:.1e}")
    report(10, ok_a and ok_b and ok_c, detail, elapsed, 300)
