"""Independent reference computations used only by the tests."""

from __future__ import annotations

import itertools
from fractions import Fraction

import networkx as nx


def _padd(p, q):
    n = max(len(p), len(q))
    p = [Fraction(0)] * (n - len(p)) + list(p)
    q = [Fraction(0)] * (n - len(q)) + list(q)
    return [a + b for a, b in zip(p, q)]


def _pmul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def _det(mat):
    """Laplace expansion along the first row; entries are polynomials (highest degree first)."""
    n = len(mat)
    if n == 1:
        return mat[0][0]
    total = [Fraction(0)]
    for j in range(n):
        if not any(mat[0][j]):
            continue
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        term = _pmul(mat[0][j], _det(minor))
        if j % 2:
            term = [-c for c in term]
        total = _padd(total, term)
    return total


def charpoly(rows):
    """Coefficients of det(xI - M), highest degree first, length d + 1."""
    d = len(rows)
    poly_mat = [
        [[Fraction(1), -Fraction(rows[i][j])] if i == j else [-Fraction(rows[i][j])] for j in range(d)]
        for i in range(d)
    ]
    p = _det(poly_mat)
    p = [Fraction(0)] * (d + 1 - len(p)) + p
    return p[-(d + 1):]


def nx_graph(adj):
    g = nx.DiGraph()
    g.add_nodes_from(adj)
    for v, succ in adj.items():
        for w in succ:
            g.add_edge(v, w)
    return g


def nx_cycle_count(adj):
    return sum(1 for _ in nx.simple_cycles(nx_graph(adj)))


def nx_has_disjoint_cycles(adj):
    cycles = [frozenset(c) for c in nx.simple_cycles(nx_graph(adj))]
    return any(not (a & b) for a, b in itertools.combinations(cycles, 2))


def dense_power(rows, n):
    d = len(rows)
    out = [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]
    for _ in range(n):
        out = [[sum(out[i][k] * rows[k][j] for k in range(d)) for j in range(d)] for i in range(d)]
    return out
