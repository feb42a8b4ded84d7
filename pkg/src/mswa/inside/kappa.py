"""Algebraic laws of the "not yet read" matrices of compiled automata."""

from __future__ import annotations

from dataclasses import dataclass

from ..semiring import Matrix


@dataclass
class KappaReport:
    idempotent: float
    kappa_commute: float
    annihilate: float
    mu_kappa_commute: float

    @property
    def ok(self):
        return max(self.idempotent, self.kappa_commute, self.annihilate, self.mu_kappa_commute) == 0.0

    def as_dict(self):
        return {
            "kappa(a)kappa(a)=kappa(a)": self.idempotent,
            "kappa(a)kappa(b)=kappa(b)kappa(a)": self.kappa_commute,
            "mu(a)kappa(a)=0": self.annihilate,
            "mu(a)kappa(b)=kappa(b)mu(a)": self.mu_kappa_commute,
        }


def verify_kappa_laws(m):
    """Largest deviation from each of the four laws over all symbols."""
    kap = {a: m.kappa_matrix(a) for a in m.alphabet}
    idem = comm = ann = mk = 0.0
    zero = Matrix.zeros(m.semiring, m.d)
    for a in m.alphabet:
        ka, mua = kap[a], m.mu[a]
        idem = max(idem, (ka @ ka).max_deviation(ka))
        ann = max(ann, (mua @ ka).max_deviation(zero))
        for b in m.alphabet:
            if a == b:
                continue
            kb = kap[b]
            comm = max(comm, (ka @ kb).max_deviation(kb @ ka))
            mk = max(mk, (mua @ kb).max_deviation(kb @ mua))
    return KappaReport(idem, comm, ann, mk)
