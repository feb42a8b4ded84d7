"""Learning weights of multiset automata from multiset data.

A model assigns ``P(w) = lambda mu(w) rho / Z`` where ``Z`` sums the same
quantity over every multiset of size at most ``N``.  Training minimizes the
negative log-likelihood by full-batch (or mini-batch) gradient descent,
either over the weights of a fixed regular-expression skeleton or over all
entries of a fully connected automaton; in the latter case a growing
penalty on the squared commutators pushes the transition matrices toward
commuting.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
import torch

from . import construct
from .core import Multiset, WeightedMultisetAutomaton, check_commutativity, count_multisets, enumerate_language
from .errors import (
    DegenerateModelError, DivergenceError, NotADistributionError, ResourceError,
    UnsupportedError, ValidationError,
)
from .regex import Scale, Regex, require_mc, symbols
from .semiring import REAL, Matrix, Semiring

log = logging.getLogger(__name__)

MODES = ("regex_skeleton", "free")
PARTITION_CAP = 200_000


@dataclass
class TrainingConfig:
    size_bound: int = 4
    learning_rate: float = 0.05
    epochs: int = 200
    penalty_start: float = 0.0
    penalty_growth: float = 1.0
    seed: int = 0
    mode: str = "regex_skeleton"
    batch_size: int | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.size_bound < 0:
            raise ValidationError("size_bound must be nonnegative")
        if not self.learning_rate > 0:
            raise ValidationError("learning_rate must be positive")
        if self.penalty_start < 0 or self.penalty_growth < 0:
            raise ValidationError("penalty schedule must be nonnegative")

    def penalty_weight(self, epoch):
        return self.penalty_start * self.penalty_growth ** epoch


# -- semiring-generic quantities ---------------------------------------------

def partition(m, size_bound, cap=PARTITION_CAP):
    """``Z``: total weight of all multisets of size <= size_bound.

    Folds precomputed powers ``mu(a)^k`` over symbols in canonical order:
    ``T_a(b) = sum_{c<=b} mu(a)^c T_next(b - c)``.
    """
    if size_bound < 0:
        raise ValueError("size_bound must be nonnegative")
    if count_multisets(len(m.alphabet), size_bound) > cap:
        raise ResourceError(f"size bound {size_bound} exceeds the enumeration cap")
    sr = m.semiring
    eye = Matrix.identity(sr, m.d)
    tail = [eye] * (size_bound + 1)
    for a in reversed(m.alphabet):
        powers = [eye]
        for _ in range(size_bound):
            powers.append(powers[-1] @ m.mu[a])
        new_tail = []
        for b in range(size_bound + 1):
            acc = Matrix.zeros(sr, m.d)
            for c in range(b + 1):
                acc = acc + powers[c] @ tail[b - c]
            new_tail.append(acc)
        tail = new_tail
    return (m.lam @ tail[size_bound] @ m.rho).entries[0]


def nll(m, data, size_bound):
    """``sum_w log Z - log(lambda mu(w) rho)`` for a real-weighted automaton.

    A data multiset with nonpositive weight makes the loss infinite; that is
    logged and returned rather than raised.
    """
    z = float(partition(m, size_bound))
    if not z > 0:
        raise DegenerateModelError(f"partition function is {z}, not positive")
    total = 0.0
    log_z = math.log(z)
    for w, count in sorted(Counter(data).items(), key=lambda kv: _order_key(kv[0])):
        if len(w) > size_bound:
            raise ValidationError(f"data multiset {w} is larger than the size bound {size_bound}")
        x = float(m.weight(w))
        if not x > 0:
            log.warning("multiset %r has weight %r; loss is infinite", str(w), x)
            return math.inf
        total += count * (log_z - math.log(x))
    return total


def commutativity_penalty(m):
    """Sum over unordered symbol pairs of the squared Frobenius norm of the commutator."""
    total = 0.0
    syms = m.alphabet
    for i, a in enumerate(syms):
        for b in syms[i + 1:]:
            comm = m.mu[a] @ m.mu[b] - m.mu[b] @ m.mu[a]
            total += sum(float(x) ** 2 for x in comm.entries)
    return total


def sample(m, size_bound, rng, size=None):
    """Draw multisets with probability ``lambda mu(w) rho / Z`` (size <= size_bound)."""
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    table = enumerate_language(m, size_bound)
    weights = np.array([float(x) for _, x in table])
    if (weights < 0).any():
        bad = table[int(np.argmin(weights))][0]
        raise NotADistributionError(f"multiset {bad} has negative weight")
    z = weights.sum()
    if not z > 0:
        raise DegenerateModelError("all multisets have zero weight")
    probs = weights / z
    if size is None:
        return table[int(rng.choice(len(table), p=probs))][0]
    picks = rng.choice(len(table), size=size, p=probs)
    return [table[int(i)][0] for i in picks]


def _order_key(w):
    return (len(w), w.items())


# -- differentiable model ------------------------------------------------------

class _TensorReal(Semiring):
    """Reals as torch scalars, so the generic construction is differentiable."""

    name = "real"
    is_ring = True
    equality_tolerance = 1e-9

    def __init__(self):
        self.zero = torch.tensor(0.0, dtype=torch.float64)
        self.one = torch.tensor(1.0, dtype=torch.float64)

    def plus(self, x, y):
        return x + y

    def times(self, x, y):
        return x * y

    def neg(self, x):
        return -x

    def minus(self, x, y):
        return x - y

    def coerce(self, value):
        if isinstance(value, torch.Tensor):
            return value
        return torch.tensor(REAL.coerce(value), dtype=torch.float64)

    def is_zero(self, x):
        # parameter-dependent entries must never be skipped, even at value 0
        return not x.requires_grad and float(x) == 0.0

    def eq(self, x, y):
        return REAL.eq(_value(x), _value(y))

    def distance(self, x, y):
        return REAL.distance(_value(x), _value(y))

    def format(self, x):
        return REAL.format(_value(x))


_TENSOR_REAL = _TensorReal()


def _value(x):
    return float(x.detach()) if isinstance(x, torch.Tensor) else float(x)


def scale_weights(alpha):
    """Weights of the Scale nodes, in preorder."""
    out = []

    def walk(node):
        if isinstance(node, Scale):
            out.append(node.weight)
        for c in node.children():
            walk(c)

    walk(alpha)
    return out


def with_weights(alpha, weights):
    """Copy of ``alpha`` with its Scale weights replaced in preorder."""
    it = iter(weights)

    def rebuild(node):
        if isinstance(node, Scale):
            k = next(it)
            return Scale(k, rebuild(node.child))
        kids = node.children()
        if not kids:
            return node
        return type(node)(*(rebuild(c) for c in kids))

    out = rebuild(alpha)
    if next(it, None) is not None:
        raise ValueError("too many weights for the skeleton")
    return out


@dataclass
class ParameterSet:
    """Flat vector of trainable reals and where each one lives.

    In free mode the vector is ``lambda``, then each ``mu(a)`` row-major in
    alphabet order, then ``rho``.  In skeleton mode it holds the Scale
    weights of the expression in preorder; every other entry of the compiled
    automaton is a structural constant.
    """

    mode: str
    values: np.ndarray
    names: list
    alphabet: tuple
    d: int
    skeleton: Regex | None = None

    @classmethod
    def free(cls, d, alphabet, rng):
        alphabet = tuple(sorted(alphabet))
        if not isinstance(rng, np.random.Generator):
            rng = np.random.default_rng(rng)
        lam = rng.uniform(0.0, 1.0, d)
        mus = [rng.uniform(-0.1, 0.1, (d, d)) for _ in alphabet]
        rho = rng.uniform(0.0, 1.0, d)
        values = np.concatenate([lam] + [mu.ravel() for mu in mus] + [rho])
        return cls("free", values, cls._free_names(d, alphabet), alphabet, d)

    @classmethod
    def from_automaton(cls, m):
        if not m.semiring.is_ring:
            raise UnsupportedError("training needs real weights")
        d = m.d
        parts = [np.array([float(x) for x in m.lam.entries])]
        parts += [np.array([float(x) for x in m.mu[a].entries]) for a in m.alphabet]
        parts.append(np.array([float(x) for x in m.rho.entries]))
        return cls("free", np.concatenate(parts), cls._free_names(d, m.alphabet), m.alphabet, d)

    @classmethod
    def from_skeleton(cls, alpha, alphabet=None):
        require_mc(alpha)
        alphabet = tuple(sorted(alphabet if alphabet is not None else symbols(alpha)))
        weights = [REAL.coerce(k) if isinstance(k, str) else float(k) for k in scale_weights(alpha)]
        if not weights:
            raise ValidationError("skeleton has no [weight] to train")
        d = construct.state_count(alpha)
        names = [f"scale[{i}]" for i in range(len(weights))]
        return cls("regex_skeleton", np.array(weights, dtype=float), names, alphabet, d, alpha)

    @staticmethod
    def _free_names(d, alphabet):
        names = [f"lambda[{i}]" for i in range(d)]
        for a in alphabet:
            names += [f"mu[{a}][{i},{j}]" for i in range(d) for j in range(d)]
        names += [f"rho[{i}]" for i in range(d)]
        return names

    def copy(self, values=None):
        return ParameterSet(self.mode, np.array(self.values if values is None else values, dtype=float),
                            list(self.names), self.alphabet, self.d, self.skeleton)

    def tensors(self, theta):
        """(lambda, [mu(a) ...], rho) as float64 tensors built from ``theta``."""
        d = self.d
        if self.mode == "free":
            lam = theta[:d]
            mus = []
            off = d
            for _ in self.alphabet:
                mus.append(theta[off:off + d * d].reshape(d, d))
                off += d * d
            rho = theta[off:off + d]
            return lam, mus, rho
        m = construct.compile(with_weights(self.skeleton, list(theta.unbind())),
                              self.alphabet, _TENSOR_REAL)

        def dense(mat):
            return torch.stack(list(mat.entries)).reshape(mat.rows, mat.cols)

        return (dense(m.lam).reshape(-1), [dense(m.mu[a]) for a in self.alphabet],
                dense(m.rho).reshape(-1))

    def to_automaton(self):
        with torch.no_grad():
            lam, mus, rho = self.tensors(torch.tensor(self.values, dtype=torch.float64))
        d = self.d
        sr = REAL
        source = None
        if self.mode == "regex_skeleton":
            source = with_weights(self.skeleton, [repr(float(x)) for x in self.values])
        return WeightedMultisetAutomaton(
            sr, d, self.alphabet,
            Matrix.row_vector(sr, lam.tolist()),
            {a: Matrix(sr, d, d, mu.reshape(-1).tolist()) for a, mu in zip(self.alphabet, mus)},
            Matrix.col_vector(sr, rho.tolist()),
            self._kappa(),
            source=source,
        )

    def _kappa(self):
        if self.mode == "regex_skeleton":
            m = construct.compile(self.skeleton, self.alphabet, REAL)
            return dict(m.kappa)
        # a free automaton has no construction history; no state is marked
        return {a: (True,) * self.d for a in self.alphabet}


def _counts(data, alphabet):
    """Distinct data multisets (canonical order) as count tuples with multiplicities."""
    known = set(alphabet)
    grouped = Counter(data)
    rows = []
    for w in sorted(grouped, key=_order_key):
        if not w.alphabet <= known:
            raise ValidationError(f"data multiset {w} uses symbols outside {list(alphabet)}")
        rows.append((tuple(w[a] for a in alphabet), grouped[w]))
    return rows


def _torch_terms(lam, mus, rho, rows, size_bound):
    """(log Z, unnormalized weights of the data rows) as tensors."""
    d = lam.shape[0]
    eye = torch.eye(d, dtype=torch.float64)
    powers = []
    for mu in mus:
        pw = [eye]
        for _ in range(size_bound):
            pw.append(pw[-1] @ mu)
        powers.append(pw)
    tail = [eye] * (size_bound + 1)
    for pw in reversed(powers):
        tail = [sum(pw[c] @ tail[b - c] for c in range(b + 1)) for b in range(size_bound + 1)]
    z = lam @ tail[size_bound] @ rho
    weights = []
    for counts, _ in rows:
        if sum(counts) > size_bound:
            raise ValidationError(f"data multiset of size {sum(counts)} exceeds the size bound {size_bound}")
        v = lam
        for pw, c in zip(powers, counts):
            v = v @ pw[c]
        weights.append(v @ rho)
    return z, torch.stack(weights) if weights else torch.zeros(0, dtype=torch.float64)


def _torch_penalty(mus):
    total = torch.zeros((), dtype=torch.float64)
    for i in range(len(mus)):
        for j in range(i + 1, len(mus)):
            comm = mus[i] @ mus[j] - mus[j] @ mus[i]
            total = total + (comm * comm).sum()
    return total


def _objective(params, theta, rows, size_bound, penalty_weight):
    lam, mus, rho = params.tensors(theta)
    z, weights = _torch_terms(lam, mus, rho, rows, size_bound)
    zv = float(z.detach())
    if not zv > 0:
        raise DegenerateModelError(f"partition function is {zv}, not positive")
    if len(weights) and not bool((weights > 0).all()):
        raise DegenerateModelError("a data multiset has nonpositive weight; the loss is infinite")
    mult = torch.tensor([c for _, c in rows], dtype=torch.float64)
    loss = (mult * (torch.log(z) - torch.log(weights))).sum()
    pen = _torch_penalty(mus) if penalty_weight else torch.zeros((), dtype=torch.float64)
    return loss, pen


def nll_and_grad(params, data, size_bound, penalty_weight=0.0):
    """``(L + penalty_weight * penalty, gradient)`` at ``params.values``."""
    rows = _counts(data, params.alphabet)
    theta = torch.tensor(params.values, dtype=torch.float64, requires_grad=True)
    loss, pen = _objective(params, theta, rows, size_bound, penalty_weight)
    total = loss + penalty_weight * pen
    total.backward()
    return float(total.detach()), theta.grad.numpy().copy()


def grad_nll(params, data, size_bound):
    """Exact gradient of the negative log-likelihood (reverse mode)."""
    return nll_and_grad(params, data, size_bound)[1]


def penalty_grad(params):
    theta = torch.tensor(params.values, dtype=torch.float64, requires_grad=True)
    _, mus, _ = params.tensors(theta)
    pen = _torch_penalty(mus)
    if not pen.requires_grad:
        return np.zeros_like(params.values)
    pen.backward()
    return theta.grad.numpy().copy()


@dataclass
class TrainingResult:
    automaton: WeightedMultisetAutomaton
    params: ParameterSet
    curve: list = field(default_factory=list)
    commutativity: object = None

    def curve_csv(self):
        lines = ["epoch,nll,penalty,commut_violation"]
        for row in self.curve:
            lines.append(f"{row['epoch']},{row['nll']!r},{row['penalty']!r},{row['commut_violation']!r}")
        return "\n".join(lines) + "\n"


def _measure(params, rows, size_bound, epoch):
    with torch.no_grad():
        theta = torch.tensor(params.values, dtype=torch.float64)
        loss, pen = _objective(params, theta, rows, size_bound, 1.0)
        _, mus, _ = params.tensors(theta)
        worst = 0.0
        for i in range(len(mus)):
            for j in range(i + 1, len(mus)):
                gap = (mus[i] @ mus[j] - mus[j] @ mus[i]).abs().max()
                worst = max(worst, float(gap))
    return {"epoch": epoch, "nll": float(loss), "penalty": float(pen), "commut_violation": worst}


def _free_start(states, alphabet, rng, rows, size_bound, attempts=1000):
    """First seeded draw under which Z and every data weight are positive."""
    for _ in range(attempts):
        params = ParameterSet.free(states, alphabet, rng)
        with torch.no_grad():
            lam, mus, rho = params.tensors(torch.tensor(params.values, dtype=torch.float64))
            z, weights = _torch_terms(lam, mus, rho, rows, size_bound)
        if float(z) > 0 and bool((weights > 0).all()):
            return params
    raise DegenerateModelError(f"no initialization in {attempts} draws gives the data positive weight")


def train(config, data, skeleton=None, states=None, alphabet=None, init=None):
    """Fit weights by gradient descent; returns a :class:`TrainingResult`.

    ``skeleton`` (an expression) selects regex-skeleton mode, ``states``
    the number of states of a fully connected automaton in free mode.  The
    step minimizes ``(L + penalty_weight * penalty) / len(data)``.
    """
    data = [w if isinstance(w, Multiset) else Multiset(w) for w in data]
    if not data:
        raise ValidationError("training data is empty")
    largest = max(len(w) for w in data)
    if largest > config.size_bound:
        raise ValidationError(f"size bound {config.size_bound} is below the largest data multiset ({largest})")
    rng = np.random.default_rng(config.seed)
    if alphabet is None:
        alphabet = sorted(set().union(*(w.alphabet for w in data)))
    if init is not None:
        params = init.copy()
    elif config.mode == "regex_skeleton":
        if skeleton is None:
            raise ValidationError("regex_skeleton mode needs a skeleton expression")
        params = ParameterSet.from_skeleton(skeleton, set(alphabet) | symbols(skeleton))
    else:
        if not states:
            raise ValidationError("free mode needs a positive state count")
        params = _free_start(states, alphabet, rng, _counts(data, tuple(sorted(alphabet))), config.size_bound)
    rows_all = _counts(data, params.alphabet)
    scale = 1.0 / len(data)
    curve = [_measure(params, rows_all, config.size_bound, 0)]
    for epoch in range(1, config.epochs + 1):
        pw = config.penalty_weight(epoch - 1) if config.mode == "free" else 0.0
        if config.batch_size:
            order = rng.permutation(len(data))
            batches = [[data[i] for i in sorted(order[s:s + config.batch_size])]
                       for s in range(0, len(data), config.batch_size)]
        else:
            batches = [data]
        for batch in batches:
            try:
                total, grad = nll_and_grad(params, batch, config.size_bound, pw)
            except DegenerateModelError as exc:
                raise DivergenceError(f"epoch {epoch}: {exc}") from None
            step = config.learning_rate * grad * (1.0 / len(batch) if config.batch_size else scale)
            new_values = params.values - step
            if not (np.isfinite(total) and np.isfinite(new_values).all()):
                raise DivergenceError(
                    f"epoch {epoch}: non-finite loss {total!r} or parameters; "
                    f"max |grad| = {np.abs(grad).max()!r}"
                )
            params = params.copy(new_values)
        try:
            row = _measure(params, rows_all, config.size_bound, epoch)
        except DegenerateModelError as exc:
            raise DivergenceError(f"epoch {epoch}: {exc}") from None
        if not math.isfinite(row["nll"]):
            raise DivergenceError(f"epoch {epoch}: loss became {row['nll']!r}")
        curve.append(row)
    m = params.to_automaton()
    report = check_commutativity(m)
    return TrainingResult(m, params, curve, report)
