"""Majority decoding and the conflict statistics of a table against its decoding."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core import DPTable, dp_encode, to_fraction
from .errors import InvalidArgument


def majority_decode(F: DPTable) -> tuple[np.ndarray, DPTable]:
    """Per-coordinate majority over the sets containing it, then re-encode.

    Ties and coordinates covered by no set decode to 0.
    """
    dom = F.domain
    ones = F.full.sum(axis=0, dtype=np.int64)
    covers = dom.membership.sum(axis=0, dtype=np.int64)
    a = (2 * ones > covers).astype(np.uint8)
    return a, dp_encode(a, dom)


@dataclass(frozen=True)
class ConflictProfile:
    """Which sets disagree with the decoded codeword and by how much.

    ``order`` lists the set indices of ``B`` sorted by ascending conflict
    count (ties by index) and ``conflict_counts`` the matching counts.
    ``beta_i`` maps each covered coordinate to the fraction of its sets whose
    bit there disagrees with the decoded string.
    """

    decoded: np.ndarray
    B: tuple[int, ...]
    beta: Fraction
    order: tuple[int, ...]
    conflict_counts: tuple[int, ...]
    beta_i: dict[int, Fraction]
    c: Fraction
    rho: Fraction | None = None
    per_set_conflicts: np.ndarray = field(repr=False, default=None)

    def m_of(self, p) -> int | None:
        """Conflict count of the ceil(p|B|)-th element of B in ascending order.

        Returns None when B is empty.
        """
        if not self.B:
            return None
        p = to_fraction(p)
        if not 0 <= p <= 1:
            raise InvalidArgument("p must lie in [0, 1]")
        pos = max(1, math.ceil(p * len(self.B)))
        return self.conflict_counts[pos - 1]

    @property
    def m_c(self):
        return self.m_of(self.c)

    @property
    def m_half(self):
        return self.m_of(Fraction(1, 2))

    @property
    def m_one_minus_c(self):
        return self.m_of(1 - self.c)

    @property
    def case(self) -> str | None:
        """Which branch of the soundness argument applies ("1A", "1B" or "2")."""
        if not self.B or self.rho is None or self.rho <= 0:
            return None
        ratio = 2 / self.rho
        if self.m_one_minus_c > ratio * self.m_half:
            return "1A"
        if self.m_half > ratio * self.m_c:
            return "1B"
        return "2"

    def as_dict(self) -> dict:
        return {
            "beta": str(self.beta),
            "B": list(self.B),
            "conflict_counts": list(self.conflict_counts),
            "c": str(self.c),
            "m_c": self.m_c,
            "m_half": self.m_half,
            "m_one_minus_c": self.m_one_minus_c,
            "rho": None if self.rho is None else str(self.rho),
            "case": self.case,
            "beta_i": {str(i): str(v) for i, v in self.beta_i.items()},
        }


def conflict_profile(F: DPTable, c=Fraction(3, 40), rho=None) -> ConflictProfile:
    c = to_fraction(c)
    if not 0 < c < Fraction(1, 2):
        raise InvalidArgument(f"c must lie in (0, 1/2), got {c}")
    a, decoded = majority_decode(F)
    dom = F.domain
    conflicting = (F.full != decoded.full) & dom.membership
    per_set = conflicting.sum(axis=1)
    B = np.flatnonzero(per_set > 0)
    order = B[np.argsort(per_set[B], kind="stable")]
    covers = dom.membership.sum(axis=0)
    bad = conflicting.sum(axis=0)
    beta_i = {i + 1: Fraction(int(bad[i]), int(covers[i]))
              for i in range(dom.n) if covers[i]}
    return ConflictProfile(
        decoded=a,
        B=tuple(int(s) for s in B),
        beta=Fraction(len(B), len(dom)),
        order=tuple(int(s) for s in order),
        conflict_counts=tuple(int(per_set[s]) for s in order),
        beta_i=beta_i,
        c=c,
        rho=None if rho is None else to_fraction(rho),
        per_set_conflicts=per_set,
    )
