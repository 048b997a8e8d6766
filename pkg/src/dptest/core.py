"""Domains of subsets, direct product tables and their distances.

Coordinates are 1-based throughout the public API, matching the ground set
``[n] = {1, ..., n}``.  A local assignment for a set ``S`` is the tuple of
bits at the coordinates of ``S`` in ascending order.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidArgument, UnsupportedSize

MAX_CLOSEST_CODEWORD_N = 24


def canonical_subset(coords: Iterable[int], n: int) -> tuple[int, ...]:
    """Return ``coords`` as a strictly ascending tuple inside ``[1, n]``."""
    out = tuple(sorted(int(c) for c in coords))
    if len(set(out)) != len(out):
        raise InvalidArgument(f"subset {out} has repeated coordinates")
    if out and (out[0] < 1 or out[-1] > n):
        raise InvalidArgument(f"subset {out} is not contained in [1, {n}]")
    return out


def as_bits(a: Sequence[int], n: int | None = None) -> np.ndarray:
    bits = np.asarray(a, dtype=np.int64).ravel()
    if bits.size and not np.isin(bits, (0, 1)).all():
        raise InvalidArgument("assignment entries must be 0 or 1")
    if n is not None and bits.size != n:
        raise InvalidArgument(f"assignment has length {bits.size}, expected {n}")
    return bits.astype(np.uint8)


def to_fraction(x) -> Fraction:
    """Exact rational for ``x``; floats are read through their shortest repr."""
    if isinstance(x, float):
        if not np.isfinite(x):
            raise InvalidArgument(f"{x} is not a finite number")
        return Fraction(repr(x))
    if isinstance(x, np.floating):
        return to_fraction(float(x))
    return Fraction(x)


def _pack_rows(matrix: np.ndarray) -> np.ndarray:
    """Pack a 0/1 matrix row-wise into uint64 words, coordinate i at bit i-1."""
    rows, cols = matrix.shape
    words = max(1, -(-cols // 64))
    padded = np.zeros((rows, words * 64), dtype=np.uint8)
    padded[:, :cols] = matrix
    return np.packbits(padded, axis=1, bitorder="little").view("<u8")


@dataclass(frozen=True)
class Domain:
    """An indexed multiset of subsets of ``[n]``."""

    n: int
    sets: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 0:
            raise InvalidArgument("ground-set size must be non-negative")
        canon = tuple(canonical_subset(s, self.n) for s in self.sets)
        object.__setattr__(self, "sets", canon)

    def __len__(self):
        return len(self.sets)

    @cached_property
    def membership(self) -> np.ndarray:
        m = np.zeros((len(self.sets), self.n), dtype=bool)
        for idx, s in enumerate(self.sets):
            if s:
                m[idx, np.asarray(s) - 1] = True
        m.flags.writeable = False
        return m

    @cached_property
    def packed(self) -> np.ndarray:
        return _pack_rows(self.membership)

    @cached_property
    def sizes(self) -> np.ndarray:
        return self.membership.sum(axis=1)

    @cached_property
    def coord_index(self) -> dict[int, np.ndarray]:
        """Map each coordinate ``i`` to the indices of the sets containing it."""
        cols = self.membership.T
        return {i: np.flatnonzero(cols[i - 1]) for i in range(1, self.n + 1)}

    def containing(self, i: int) -> np.ndarray:
        if not 1 <= i <= self.n:
            raise InvalidArgument(f"coordinate {i} outside [1, {self.n}]")
        return self.coord_index[i]

    def covered(self) -> np.ndarray:
        """Boolean mask over coordinates that lie in at least one set."""
        return self.membership.any(axis=0)

    def digest(self) -> str:
        payload = json.dumps({"n": self.n, "sets": [list(s) for s in self.sets]},
                             separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()

    def subdomain(self, indices: Sequence[int]) -> "Domain":
        return Domain(self.n, tuple(self.sets[int(s)] for s in indices))


class DPTable:
    """A function assigning each set of a domain a local bit assignment.

    Stored as a dense ``len(domain) x n`` matrix whose entries outside a set
    are zero.
    """

    def __init__(self, domain: Domain, full: np.ndarray):
        full = np.asarray(full, dtype=np.uint8)
        if full.shape != (len(domain), domain.n):
            raise InvalidArgument(
                f"table shape {full.shape} does not match domain "
                f"({len(domain)}, {domain.n})")
        full = full & domain.membership
        full.flags.writeable = False
        self.domain = domain
        self.full = full

    @classmethod
    def from_values(cls, domain: Domain, values: Sequence[Sequence[int]]) -> "DPTable":
        if len(values) != len(domain):
            raise InvalidArgument(
                f"{len(values)} local assignments for {len(domain)} sets")
        full = np.zeros((len(domain), domain.n), dtype=np.uint8)
        for idx, (s, v) in enumerate(zip(domain.sets, values)):
            bits = as_bits(v)
            if bits.size != len(s):
                raise InvalidArgument(
                    f"set {idx} has {len(s)} coordinates but {bits.size} bits")
            if s:
                full[idx, np.asarray(s) - 1] = bits
        return cls(domain, full)

    def local(self, s: int) -> tuple[int, ...]:
        coords = self.domain.sets[s]
        return tuple(int(self.full[s, c - 1]) for c in coords)

    @property
    def values(self) -> list[tuple[int, ...]]:
        return [self.local(s) for s in range(len(self.domain))]

    @cached_property
    def packed(self) -> np.ndarray:
        return _pack_rows(self.full)

    def differs(self, other: "DPTable") -> np.ndarray:
        """Boolean mask of set indices where the two tables disagree."""
        _check_same_domain(self, other)
        return (self.full != other.full).any(axis=1)

    def __eq__(self, other):
        if not isinstance(other, DPTable):
            return NotImplemented
        return self.domain == other.domain and np.array_equal(self.full, other.full)

    def __hash__(self):
        return hash((self.domain, self.full.tobytes()))

    def __repr__(self):
        return f"DPTable(n={self.domain.n}, sets={len(self.domain)})"


def _check_same_domain(F: DPTable, G: DPTable) -> None:
    if F.domain is not G.domain and F.domain != G.domain:
        raise InvalidArgument("tables are defined over different domains")


def dp_encode(a: Sequence[int], dom: Domain) -> DPTable:
    """Direct product encoding: every set receives the restriction of ``a``."""
    bits = as_bits(a, dom.n)
    return DPTable(dom, dom.membership & bits[None, :].astype(bool))


def dp_distance(F: DPTable, G: DPTable) -> Fraction:
    """Fraction of sets on which the two tables differ (as whole local values)."""
    mask = F.differs(G)
    if mask.size == 0:
        raise InvalidArgument("distance over an empty domain is undefined")
    return Fraction(int(mask.sum()), mask.size)


def closest_codeword(F: DPTable) -> tuple[np.ndarray, Fraction]:
    """Exhaustive nearest direct product codeword.

    Ties go to the lexicographically smallest string ``(a_1, ..., a_n)``.
    """
    dom = F.domain
    n = dom.n
    if n > MAX_CLOSEST_CODEWORD_N:
        raise UnsupportedSize(
            f"exhaustive search needs n <= {MAX_CLOSEST_CODEWORD_N}, got {n}")
    if len(dom) == 0:
        raise InvalidArgument("empty domain")
    # coordinate 1 is the most significant bit so integer order is lex order
    weights = np.left_shift(np.int64(1), np.arange(n - 1, -1, -1, dtype=np.int64))
    masks = dom.membership.astype(np.int64) @ weights
    patterns = F.full.astype(np.int64) @ weights

    best_agree, best_a = -1, 0
    total = 1 << n
    chunk = 1 << 20
    for start in range(0, total, chunk):
        cand = np.arange(start, min(total, start + chunk), dtype=np.int64)
        agree = np.zeros(cand.size, dtype=np.int64)
        for m, p in zip(masks, patterns):
            agree += (cand & m) == p
        pos = int(np.argmax(agree))
        if agree[pos] > best_agree:
            best_agree, best_a = int(agree[pos]), int(cand[pos])
    a = np.array([(best_a >> (n - 1 - j)) & 1 for j in range(n)], dtype=np.uint8)
    return a, Fraction(len(dom) - best_agree, len(dom))
