"""Two-sided (Rutherford) characteristic equation of a semiring matrix.

Every nonzero permutation term of ``det(x I - M)`` corresponds to a set of
node-disjoint simple cycles of M's support digraph (a linear subgraph).  A
set of ``c`` cycles covering ``k`` nodes contributes the product of its edge
weights to the coefficient of ``x^(d-k)``: on the left when ``c`` is even,
on the right when ``c`` is odd.  The empty set gives ``x^d`` on the left.
Over a ring, left minus right is the characteristic polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ShapeError, UnsupportedError
from ..semiring import Matrix
from .cycles import CYCLE_CAP, NODE_CAP, simple_cycles, support_graph


@dataclass(frozen=True)
class CharEquation:
    """Coefficients listed from ``x^d`` down to ``x^0`` on each side."""

    semiring: object
    d: int
    left: tuple
    right: tuple

    def collapse(self):
        """Monic characteristic polynomial (ring only), highest degree first."""
        sr = self.semiring
        if not sr.is_ring:
            raise UnsupportedError(f"semiring {sr.name!r} is not a ring")
        return tuple(sr.minus(l, r) for l, r in zip(self.left, self.right))

    def left_has_only_leading_term(self):
        is_zero = self.semiring.is_zero
        return all(is_zero(c) for c in self.left[1:])

    def evaluate(self, mat):
        """Substitute ``mat`` into both sides; returns (left, right) matrices."""
        sr = self.semiring
        powers = [Matrix.identity(sr, self.d)]
        for _ in range(self.d):
            powers.append(powers[-1] @ mat)
        zero = Matrix.zeros(sr, self.d)

        def side(coeffs):
            acc = zero
            for k, c in enumerate(coeffs):
                if not sr.is_zero(c):
                    acc = acc + powers[self.d - k].scale(c)
            return acc

        return side(self.left), side(self.right)

    def rewrite_rule(self):
        """Coefficients ``r_0..r_{d-1}`` with ``M^d = sum_j r_j M^j``.

        Over a ring this always exists.  Over other semirings it requires the
        left side to hold nothing but ``x^d``.
        """
        sr = self.semiring
        d = self.d
        if sr.is_ring:
            poly = self.collapse()
            # M^d + p_1 M^(d-1) + ... + p_d = 0
            return tuple(sr.neg(poly[d - j]) for j in range(d))
        if not self.left_has_only_leading_term():
            raise UnsupportedError(
                "characteristic equation has terms besides x^d on the left; "
                "no rewrite rule exists over this semiring"
            )
        return tuple(self.right[d - j] for j in range(d))


def _linear_subgraphs(cycles):
    """Yield (node count, cycle count, cycle index list) for disjoint cycle sets."""
    masks = []
    for c in cycles:
        mask = 0
        for v in c:
            mask |= 1 << v
        masks.append(mask)
    order = sorted(range(len(cycles)), key=lambda i: min(cycles[i]))
    masks = [masks[i] for i in order]
    sizes = [len(cycles[i]) for i in order]

    def rec(start, used, chosen, nodes):
        yield nodes, len(chosen), chosen
        for i in range(start, len(masks)):
            if not masks[i] & used:
                chosen.append(order[i])
                yield from rec(i + 1, used | masks[i], chosen, nodes + sizes[i])
                chosen.pop()

    yield from rec(0, 0, [], 0)


def char_equation(mat, node_cap=NODE_CAP, cycle_cap=CYCLE_CAP):
    if mat.rows != mat.cols:
        raise ShapeError(f"characteristic equation needs a square matrix, got {mat.rows}x{mat.cols}")
    sr = mat.semiring
    d = mat.rows
    cycles = simple_cycles(support_graph(mat), node_cap=node_cap, cycle_cap=cycle_cap)
    weights = []
    for c in cycles:
        w = sr.one
        for i, v in enumerate(c):
            w = sr.times(w, mat[v, c[(i + 1) % len(c)]])
        weights.append(w)
    left = [sr.zero] * (d + 1)
    right = [sr.zero] * (d + 1)
    for nodes, count, chosen in _linear_subgraphs(cycles):
        term = sr.one
        for i in chosen:
            term = sr.times(term, weights[i])
        side = left if count % 2 == 0 else right
        side[nodes] = sr.plus(side[nodes], term)
    return CharEquation(sr, d, tuple(left), tuple(right))
