"""Commutative semirings and the dense matrix algebra built on them.

Values are plain Python objects (``float``, ``Fraction``, ``bool``); a
:class:`Semiring` instance supplies the operations.  Matrices are immutable,
dense and row-major.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce

from .errors import MalformedWeightError, ShapeError, UnsupportedError


class Semiring:
    """Operations of a commutative semiring over some Python value type."""

    name = ""
    is_ring = False
    is_exact = False
    equality_tolerance = 0.0
    zero = None
    one = None

    def plus(self, x, y):
        raise NotImplementedError

    def times(self, x, y):
        raise NotImplementedError

    def neg(self, x):
        raise UnsupportedError(f"semiring {self.name!r} has no additive inverse")

    def minus(self, x, y):
        return self.plus(x, self.neg(y))

    def coerce(self, value):
        """Convert a literal string or a Python number into a semiring value."""
        raise NotImplementedError

    def eq(self, x, y):
        return x == y

    def is_zero(self, x):
        return self.eq(x, self.zero)

    def distance(self, x, y):
        """Nonnegative real deviation between two values (0 iff equal)."""
        return 0.0 if x == y else 1.0

    def sum(self, values):
        return reduce(self.plus, values, self.zero)

    def prod(self, values):
        return reduce(self.times, values, self.one)

    def from_bool(self, flag):
        return self.one if flag else self.zero

    def parse(self, text):
        return self.coerce(str(text))

    def to_json(self, x):
        return x

    def from_json(self, value):
        return self.coerce(value)

    def format(self, x):
        return str(x)

    def __repr__(self):
        return f"<semiring {self.name}>"


def _parse_number(text):
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        pass
    try:
        value = float(text)
    except ValueError:
        raise MalformedWeightError(f"malformed weight literal {text!r}") from None
    return value


def _format_float(x):
    if x == int(x) and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


class RealSemiring(Semiring):
    name = "real"
    is_ring = True
    equality_tolerance = 1e-9
    zero = 0.0
    one = 1.0

    def plus(self, x, y):
        return x + y

    def times(self, x, y):
        return x * y

    def neg(self, x):
        return -x

    def minus(self, x, y):
        return x - y

    def coerce(self, value):
        if isinstance(value, str):
            value = _parse_number(value)
        return float(value)

    def eq(self, x, y):
        tol = self.equality_tolerance
        return abs(x - y) <= tol * max(1.0, abs(x), abs(y))

    def is_zero(self, x):
        return x == 0.0

    def distance(self, x, y):
        return abs(x - y)

    def format(self, x):
        return _format_float(x)


class RationalSemiring(Semiring):
    name = "rational"
    is_ring = True
    is_exact = True
    zero = Fraction(0)
    one = Fraction(1)

    def plus(self, x, y):
        return x + y

    def times(self, x, y):
        return x * y

    def neg(self, x):
        return -x

    def minus(self, x, y):
        return x - y

    def coerce(self, value):
        if isinstance(value, str):
            try:
                return Fraction(value.strip())
            except (ValueError, ZeroDivisionError):
                raise MalformedWeightError(f"malformed rational literal {value!r}") from None
        if isinstance(value, float) and not math.isfinite(value):
            raise MalformedWeightError(f"non-finite rational {value!r}")
        return Fraction(value)

    def is_zero(self, x):
        return x == 0

    def distance(self, x, y):
        return float(abs(x - y))

    def to_json(self, x):
        return int(x) if x.denominator == 1 else str(x)

    def format(self, x):
        return str(x)


class BooleanSemiring(Semiring):
    name = "boolean"
    is_exact = True
    zero = False
    one = True

    def plus(self, x, y):
        return x or y

    def times(self, x, y):
        return x and y

    def coerce(self, value):
        if isinstance(value, str):
            text = value.strip().lower()
            if text in ("true", "false"):
                return text == "true"
            value = _parse_number(text)
        if value not in (0, 1):
            raise MalformedWeightError(f"boolean weight must be 0 or 1, got {value!r}")
        return bool(value)

    def is_zero(self, x):
        return not x

    def to_json(self, x):
        return int(x)

    def format(self, x):
        return "1" if x else "0"


class ViterbiSemiring(Semiring):
    """Max-times over [0, 1]."""

    name = "viterbi"
    equality_tolerance = 1e-9
    zero = 0.0
    one = 1.0

    def plus(self, x, y):
        return x if x >= y else y

    def times(self, x, y):
        return x * y

    def coerce(self, value):
        if isinstance(value, str):
            value = _parse_number(value)
        value = float(value)
        if not 0.0 <= value <= 1.0:
            raise MalformedWeightError(f"viterbi weight must lie in [0, 1], got {value!r}")
        return value

    def eq(self, x, y):
        return abs(x - y) <= self.equality_tolerance * max(1.0, abs(x), abs(y))

    def is_zero(self, x):
        return x == 0.0

    def distance(self, x, y):
        return abs(x - y)

    def format(self, x):
        return _format_float(x)


class LogSemiring(Semiring):
    """Log-space reals: plus is log-sum-exp, times is addition.

    Literals and stored values are log-weights, so ``zero`` is ``-inf``.
    """

    name = "log"
    equality_tolerance = 1e-9
    zero = -math.inf
    one = 0.0

    def plus(self, x, y):
        if x == -math.inf:
            return y
        if y == -math.inf:
            return x
        hi, lo = (x, y) if x >= y else (y, x)
        return hi + math.log1p(math.exp(lo - hi))

    def times(self, x, y):
        if x == -math.inf or y == -math.inf:
            return -math.inf
        return x + y

    def coerce(self, value):
        if isinstance(value, str):
            text = value.strip().lower()
            if text in ("-inf", "-infinity"):
                return -math.inf
            value = _parse_number(text)
        value = float(value)
        if math.isnan(value) or value == math.inf:
            raise MalformedWeightError(f"invalid log weight {value!r}")
        return value

    def eq(self, x, y):
        if x == y:
            return True
        if math.isinf(x) or math.isinf(y):
            return False
        return abs(x - y) <= self.equality_tolerance * max(1.0, abs(x), abs(y))

    def is_zero(self, x):
        return x == -math.inf

    def distance(self, x, y):
        if x == y:
            return 0.0
        if math.isinf(x) or math.isinf(y):
            return math.inf
        return abs(x - y)

    def to_json(self, x):
        return "-inf" if x == -math.inf else x

    def format(self, x):
        return "-inf" if x == -math.inf else _format_float(x)


REAL = RealSemiring()
RATIONAL = RationalSemiring()
BOOLEAN = BooleanSemiring()
VITERBI = ViterbiSemiring()
LOG = LogSemiring()

SEMIRINGS = {s.name: s for s in (REAL, RATIONAL, BOOLEAN, VITERBI, LOG)}


def get_semiring(name):
    if isinstance(name, Semiring):
        return name
    try:
        return SEMIRINGS[name]
    except KeyError:
        raise UnsupportedError(
            f"unknown semiring {name!r}; expected one of {sorted(SEMIRINGS)}"
        ) from None


class Matrix:
    """Immutable dense row-major matrix over a semiring."""

    __slots__ = ("semiring", "rows", "cols", "entries")

    def __init__(self, semiring, rows, cols, entries):
        entries = tuple(entries)
        if rows < 1 or cols < 1:
            raise ShapeError(f"matrix dimensions must be positive, got {rows}x{cols}")
        if len(entries) != rows * cols:
            raise ShapeError(f"{rows}x{cols} matrix needs {rows * cols} entries, got {len(entries)}")
        object.__setattr__(self, "semiring", semiring)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", entries)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    @classmethod
    def from_rows(cls, semiring, rows):
        rows = [list(r) for r in rows]
        if not rows or not rows[0]:
            raise ShapeError("matrix needs at least one row and one column")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ShapeError("ragged matrix rows")
        return cls(semiring, len(rows), width, (semiring.coerce(x) for r in rows for x in r))

    @classmethod
    def zeros(cls, semiring, rows, cols=None):
        cols = rows if cols is None else cols
        return cls(semiring, rows, cols, [semiring.zero] * (rows * cols))

    @classmethod
    def identity(cls, semiring, n):
        z, o = semiring.zero, semiring.one
        return cls(semiring, n, n, (o if i == j else z for i in range(n) for j in range(n)))

    @classmethod
    def diag(cls, semiring, values):
        values = list(values)
        n = len(values)
        z = semiring.zero
        return cls(semiring, n, n, (values[i] if i == j else z for i in range(n) for j in range(n)))

    @classmethod
    def row_vector(cls, semiring, values):
        values = list(values)
        return cls(semiring, 1, len(values), values)

    @classmethod
    def col_vector(cls, semiring, values):
        values = list(values)
        return cls(semiring, len(values), 1, values)

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i):
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j):
        return self.entries[j::self.cols]

    def to_rows(self):
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self):
        return Matrix(self.semiring, self.cols, self.rows,
                      (self[i, j] for j in range(self.cols) for i in range(self.rows)))

    def map(self, fn, semiring=None):
        return Matrix(semiring or self.semiring, self.rows, self.cols, map(fn, self.entries))

    def scale(self, k):
        times = self.semiring.times
        return self.map(lambda x: times(k, x))

    def is_zero(self):
        is_zero = self.semiring.is_zero
        return all(is_zero(x) for x in self.entries)

    def __add__(self, other):
        if self.shape != other.shape:
            raise ShapeError(f"cannot add {self.rows}x{self.cols} and {other.rows}x{other.cols}")
        plus = self.semiring.plus
        return Matrix(self.semiring, self.rows, self.cols, map(plus, self.entries, other.entries))

    def __sub__(self, other):
        if self.shape != other.shape:
            raise ShapeError(f"cannot subtract {other.rows}x{other.cols} from {self.rows}x{self.cols}")
        minus = self.semiring.minus
        return Matrix(self.semiring, self.rows, self.cols, map(minus, self.entries, other.entries))

    def __matmul__(self, other):
        return mat_mul(self, other)

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative matrix power")
        result = Matrix.identity(self.semiring, self.rows)
        base = self
        while n:
            if n & 1:
                result = result @ base
            n >>= 1
            if n:
                base = base @ base
        return result

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def equals(self, other):
        """Entrywise equality under the semiring's tolerance."""
        if self.shape != other.shape:
            return False
        eq = self.semiring.eq
        return all(eq(x, y) for x, y in zip(self.entries, other.entries))

    def max_deviation(self, other):
        if self.shape != other.shape:
            raise ShapeError("shape mismatch")
        dist = self.semiring.distance
        return max((dist(x, y) for x, y in zip(self.entries, other.entries)), default=0.0)

    def __repr__(self):
        fmt = self.semiring.format
        body = "; ".join(" ".join(fmt(x) for x in self.row(i)) for i in range(self.rows))
        return f"Matrix[{self.semiring.name}]({body})"


def _check_same_semiring(a, b):
    if a.semiring is not b.semiring:
        raise ShapeError(f"semiring mismatch: {a.semiring.name} vs {b.semiring.name}")


def mat_mul(a, b):
    """Semiring matrix product; zero entries of ``a`` are skipped."""
    _check_same_semiring(a, b)
    if a.cols != b.rows:
        raise ShapeError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    sr = a.semiring
    plus, times, is_zero = sr.plus, sr.times, sr.is_zero
    n, m = a.cols, b.cols
    b_rows = [b.entries[k * m:(k + 1) * m] for k in range(n)]
    out = []
    for i in range(a.rows):
        acc = [sr.zero] * m
        for k, aik in enumerate(a.entries[i * n:(i + 1) * n]):
            if is_zero(aik):
                continue
            bk = b_rows[k]
            for j in range(m):
                acc[j] = plus(acc[j], times(aik, bk[j]))
        out.extend(acc)
    return Matrix(sr, a.rows, m, out)


def kron(a, b):
    """Kronecker product: the (mp x nq) matrix of blocks a[i, j] * b."""
    _check_same_semiring(a, b)
    times = a.semiring.times
    out = []
    for i in range(a.rows):
        a_row = a.row(i)
        for k in range(b.rows):
            b_row = b.row(k)
            for aij in a_row:
                out.extend(times(aij, bkl) for bkl in b_row)
    return Matrix(a.semiring, a.rows * b.rows, a.cols * b.cols, out)


def block_diag(a, b):
    _check_same_semiring(a, b)
    z = a.semiring.zero
    out = []
    for i in range(a.rows):
        out.extend(a.row(i))
        out.extend([z] * b.cols)
    for i in range(b.rows):
        out.extend([z] * a.cols)
        out.extend(b.row(i))
    return Matrix(a.semiring, a.rows + b.rows, a.cols + b.cols, out)


def hconcat(a, b):
    _check_same_semiring(a, b)
    if a.rows != b.rows:
        raise ShapeError("hconcat needs equal row counts")
    out = []
    for i in range(a.rows):
        out.extend(a.row(i))
        out.extend(b.row(i))
    return Matrix(a.semiring, a.rows, a.cols + b.cols, out)


def vconcat(a, b):
    _check_same_semiring(a, b)
    if a.cols != b.cols:
        raise ShapeError("vconcat needs equal column counts")
    return Matrix(a.semiring, a.rows + b.rows, a.cols, a.entries + b.entries)
