"""Exact span membership over the rationals."""

from __future__ import annotations

from fractions import Fraction


class SpanSolver:
    """Decompose vectors over a fixed list of (possibly dependent) columns.

    Picks a maximal independent set of columns and matching pivot rows once;
    each :meth:`solve` is then a small back-substitution plus a full check.
    """

    def __init__(self, columns, length):
        self.columns = [list(map(Fraction, c)) for c in columns]
        self.n = len(self.columns)
        self.length = length
        if any(len(c) != length for c in self.columns):
            raise ValueError("column length mismatch")
        rows = [[self.columns[j][i] for j in range(self.n)] for i in range(self.length)]
        work = [list(r) for r in rows]
        origin = list(range(self.length))
        pivot_rows, pivot_cols = [], []
        r = 0
        for c in range(self.n):
            p = next((i for i in range(r, self.length) if work[i][c] != 0), None)
            if p is None:
                continue
            work[r], work[p] = work[p], work[r]
            origin[r], origin[p] = origin[p], origin[r]
            piv = work[r][c]
            for i in range(r + 1, self.length):
                f = work[i][c]
                if f:
                    f /= piv
                    wi, wr = work[i], work[r]
                    for j in range(c, self.n):
                        wi[j] -= f * wr[j]
            pivot_rows.append(origin[r])
            pivot_cols.append(c)
            r += 1
        self.pivot_rows = pivot_rows
        self.pivot_cols = pivot_cols
        self.inverse = _invert([[rows[i][j] for j in pivot_cols] for i in pivot_rows])

    def solve(self, target):
        """Coefficients ``c`` with ``sum_j c[j] columns[j] == target``, or None."""
        target = list(map(Fraction, target))
        coeffs = [Fraction(0)] * self.n
        picked = [target[i] for i in self.pivot_rows]
        for row, j in zip(self.inverse, self.pivot_cols):
            coeffs[j] = sum((a * b for a, b in zip(row, picked)), Fraction(0))
        for i in range(self.length):
            acc = Fraction(0)
            for j in self.pivot_cols:
                cj = coeffs[j]
                if cj:
                    acc += cj * self.columns[j][i]
            if acc != target[i]:
                return None
        return coeffs


def _invert(mat):
    n = len(mat)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(mat)]
    for c in range(n):
        p = next(i for i in range(c, n) if aug[i][c] != 0)
        aug[c], aug[p] = aug[p], aug[c]
        piv = aug[c][c]
        aug[c] = [x / piv for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c]:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    return [row[n:] for row in aug]
