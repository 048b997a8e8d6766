"""Checks for (lambda, rho)-coordinate expansion and the implied soundness constant.

A graph is a coordinate expander when

1. the graph and every local graph G_i have small nontrivial spectrum,
2. a random neighbour of S keeps any fixed i in S with probability >= rho,
3. for every T inside S with |T| >= 2/rho, a random neighbour sees at most
   rho|T|/2 points of T with probability <= lambda.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.sparse as sp

from .core import to_fraction
from .errors import InvalidArgument, InvalidGraph, UnsupportedSize
from .spectral import lambda_of
from .testgraph import TestGraph, local_subgraph, require_positive_degrees

EXHAUSTIVE_MAX_K = 16
SPECTRAL_SLACK = 1e-9
DEFAULT_C = Fraction(3, 40)


@dataclass(frozen=True)
class GlobalCheck:
    lambda_G: float
    worst_local: float
    local: dict[int, float]
    passed: bool


@dataclass(frozen=True)
class RetentionCheck:
    min_retention: Fraction
    witness: tuple[int, int] | None
    passed: bool


@dataclass(frozen=True)
class SamplingCheck:
    worst_tail: Fraction
    witness: tuple[int, tuple[int, ...]] | None
    strategy: str
    samples: int
    witness_only: bool
    passed: bool


def check_condition_global(graph: TestGraph, lam) -> GlobalCheck:
    """Spectral condition on G and on every local graph G_i.

    A disconnected local graph (including one with an isolated vertex) is
    recorded with value 1.  Values are compared to ``lam`` with a 1e-9 slack
    for floating point; a threshold of 1 therefore always passes.
    """
    lam = float(lam)
    require_positive_degrees(graph)
    if not graph.is_regular():
        raise InvalidGraph("coordinate expansion is certified for regular graphs only")
    lam_G = lambda_of(graph).lambda_G
    local = {}
    for i in range(1, graph.dom.n + 1):
        if graph.dom.containing(i).size == 0:
            continue
        sub = local_subgraph(graph, i)
        if np.any(sub.degree_array == 0) or not _connected(sub):
            local[i] = 1.0
        else:
            local[i] = lambda_of(sub).lambda_G
    worst = max(local.values(), default=0.0)
    passed = lam_G <= lam + SPECTRAL_SLACK and worst <= lam + SPECTRAL_SLACK
    return GlobalCheck(lam_G, worst, local, passed)


def _connected(graph: TestGraph) -> bool:
    from scipy.sparse.csgraph import connected_components
    count, _ = connected_components(graph.to_scipy(), directed=False)
    return count == 1


def _coordinate_hits(graph: TestGraph) -> np.ndarray:
    """Entry (s, i): total weight of neighbours of s that contain coordinate i+1."""
    W = graph.to_scipy().astype(np.int64)
    M = sp.csr_matrix(graph.dom.membership.astype(np.int64))
    return (W @ M).toarray()


def check_condition_retention(graph: TestGraph, rho) -> RetentionCheck:
    rho = to_fraction(rho)
    deg = require_positive_degrees(graph)
    hits = _coordinate_hits(graph)
    member = graph.dom.membership
    best, witness = None, None
    for s in range(graph.num_vertices):
        coords = np.flatnonzero(member[s])
        if coords.size == 0:
            continue
        j = int(coords[np.argmin(hits[s, coords])])
        value = Fraction(int(hits[s, j]), int(deg[s]))
        if best is None or value < best:
            best, witness = value, (s, j + 1)
    if best is None:
        return RetentionCheck(Fraction(1), None, True)
    return RetentionCheck(best, witness, best >= rho)


def _local_patterns(graph: TestGraph, s: int) -> tuple[np.ndarray, np.ndarray, int]:
    """Neighbour intersections with S as bitmasks over S's positions, merged."""
    coords = np.asarray(graph.dom.sets[s]) - 1
    nbrs, w = graph.row(s)
    inside = graph.dom.membership[np.ix_(nbrs, coords)].astype(np.int64)
    codes = inside @ (np.int64(1) << np.arange(coords.size, dtype=np.int64))
    uniq, inv = np.unique(codes, return_inverse=True)
    weights = np.bincount(inv, weights=w).astype(np.int64)
    return uniq, weights, coords.size


def _popcount(x: np.ndarray) -> np.ndarray:
    x = x.astype(np.uint64)
    count = np.zeros(x.shape, dtype=np.int64)
    while np.any(x):
        count += (x & np.uint64(1)).astype(np.int64)
        x >>= np.uint64(1)
    return count


def _tails(patterns: np.ndarray, weights: np.ndarray, subsets: np.ndarray,
           sizes: np.ndarray, rho: Fraction) -> np.ndarray:
    """Weight of neighbours with |S' cap T| <= rho |T| / 2, per candidate T."""
    limits = {int(z): math.floor(rho * int(z) / 2) for z in np.unique(sizes)}
    limit = np.array([limits[int(z)] for z in sizes], dtype=np.int64)
    out = np.empty(subsets.size, dtype=np.int64)
    step = max(1, (1 << 22) // max(1, patterns.size))
    for lo in range(0, subsets.size, step):
        block = slice(lo, lo + step)
        seen = _popcount(patterns[:, None] & subsets[None, block])
        out[block] = (weights[:, None] * (seen <= limit[None, block])).sum(axis=0)
    return out


def check_condition_sampling(graph: TestGraph, rho, lam, strategy: str = "exhaustive",
                             samples: int = 64, seed: int = 0) -> SamplingCheck:
    """Worst tail Pr[|S' cap T| <= rho|T|/2] over S and eligible T inside S.

    ``strategy="sampled"`` draws ``samples`` subsets per (S, size) and only
    produces a lower bound on the true worst tail.
    """
    rho, lam = to_fraction(rho), to_fraction(lam)
    deg = require_positive_degrees(graph)
    if strategy not in ("exhaustive", "sampled"):
        raise InvalidArgument(f"unknown strategy {strategy!r}")
    sizes = graph.dom.sizes
    if strategy == "exhaustive" and sizes.size and int(sizes.max()) > EXHAUSTIVE_MAX_K:
        raise UnsupportedSize(
            f"exhaustive check needs set sizes <= {EXHAUSTIVE_MAX_K}; use sampling")
    if strategy == "sampled" and samples < 1:
        raise InvalidArgument("samples must be at least 1")
    min_size = math.inf if rho == 0 else math.ceil(2 / rho)
    rng = np.random.default_rng(seed)
    worst, witness = Fraction(0), None
    subset_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    for s in range(graph.num_vertices):
        k = int(sizes[s])
        if k < min_size:
            continue
        patterns, weights, _ = _local_patterns(graph, s)
        if strategy == "exhaustive":
            if k not in subset_cache:
                everything = np.arange(1 << k, dtype=np.int64)
                pc = _popcount(everything)
                keep = pc >= min_size
                subset_cache[k] = (everything[keep], pc[keep])
            subsets, subset_sizes = subset_cache[k]
        else:
            picks = []
            for size in range(int(min_size), k + 1):
                for _ in range(samples):
                    pos = rng.choice(k, size=size, replace=False)
                    picks.append(int(np.sum(np.int64(1) << pos.astype(np.int64))))
            subsets = np.array(picks, dtype=np.int64)
            subset_sizes = _popcount(subsets)
        tails = _tails(patterns, weights, subsets, subset_sizes, rho)
        j = int(np.argmax(tails))
        value = Fraction(int(tails[j]), int(deg[s]))
        if value > worst or witness is None:
            coords = graph.dom.sets[s]
            T = tuple(coords[b] for b in range(k) if (int(subsets[j]) >> b) & 1)
            worst, witness = value, (s, T)
    return SamplingCheck(worst, witness, strategy,
                         samples if strategy == "sampled" else 0,
                         strategy == "sampled", worst <= lam)


@dataclass(frozen=True)
class Surd:
    """The real number ``a + b * sqrt(r)`` with rational a, b and r >= 0."""

    a: Fraction
    b: Fraction = Fraction(0)
    r: Fraction = Fraction(0)

    def sign(self) -> int:
        a = self.a
        b = self.b if self.r else Fraction(0)
        sa = (a > 0) - (a < 0)
        sb = (b > 0) - (b < 0)
        if sb == 0 or sa == sb:
            return sa if sa else sb
        if sa == 0:
            return sb
        # opposite signs: compare a^2 with b^2 r
        diff = a * a - b * b * self.r
        return sa * ((diff > 0) - (diff < 0))

    def scale(self, q: Fraction) -> "Surd":
        return Surd(self.a * q, self.b * q, self.r)

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.r)

    def __str__(self):
        if not self.b or not self.r:
            return str(self.a)
        return f"{self.a} + ({self.b})*sqrt({self.r})"


@dataclass(frozen=True)
class SoundnessConstants:
    e1: Surd
    e2: Surd
    e3: Surd
    c: Fraction
    terms: tuple[Surd, Surd, Surd] = field(repr=False)

    @property
    def K(self) -> float:
        return min(float(t) for t in self.terms)

    @property
    def positive(self) -> bool:
        """Exact test of K > 0, i.e. all three expressions positive."""
        return all(e.sign() > 0 for e in (self.e1, self.e2, self.e3))

    def as_dict(self) -> dict:
        return {"e1": float(self.e1), "e2": float(self.e2), "e3": float(self.e3),
                "e1_exact": str(self.e1), "e2_exact": str(self.e2),
                "e3_exact": str(self.e3), "c": str(self.c), "K": self.K,
                "K_positive": self.positive}


def soundness_constant(lam, rho, c=DEFAULT_C) -> SoundnessConstants:
    """Rejection-rate constants of the three proof cases.

    ``K = min(c*e1, e2/2, (1-2c)*e3)``; when positive, a table accepted with
    probability ``1 - eps`` lies within ``eps / K`` of its decoding.
    """
    lam, rho, c = to_fraction(lam), to_fraction(rho), to_fraction(c)
    if not 0 < c < Fraction(1, 2):
        raise InvalidArgument(f"c must lie in (0, 1/2), got {c}")
    for name, v in (("lambda", lam), ("rho", rho)):
        if not 0 <= v <= 1:
            raise InvalidArgument(f"{name} must lie in [0, 1], got {v}")
    e1 = Surd(Fraction(1, 2) - lam, -lam, 1 / (2 * c))
    e2 = Surd(c - lam, -lam, 2 - 2 * c)
    e3 = Surd(rho / 2 - 2 * lam - 2 * c, -lam, 2 * c / (1 - 2 * c))
    terms = (e1.scale(c), e2.scale(Fraction(1, 2)), e3.scale(1 - 2 * c))
    return SoundnessConstants(e1, e2, e3, c, terms)


@dataclass(frozen=True)
class Certificate:
    lambda_target: Fraction
    rho_target: Fraction
    cond1: GlobalCheck
    cond2: RetentionCheck
    cond3: SamplingCheck
    soundness: SoundnessConstants | None

    @property
    def overall(self) -> bool:
        return self.cond1.passed and self.cond2.passed and self.cond3.passed

    @property
    def measured_lambda(self) -> float:
        """Smallest lambda at which conditions 1 and 3 hold for this graph."""
        return max(self.cond1.lambda_G, self.cond1.worst_local,
                   float(self.cond3.worst_tail))

    def as_dict(self) -> dict:
        return {
            "lambda_target": str(self.lambda_target),
            "rho_target": str(self.rho_target),
            "cond1": {"lambda_G": self.cond1.lambda_G,
                      "worst_local": self.cond1.worst_local,
                      "pass": self.cond1.passed},
            "cond2": {"min_retention": str(self.cond2.min_retention),
                      "min_retention_float": float(self.cond2.min_retention),
                      "witness": self.cond2.witness,
                      "pass": self.cond2.passed},
            "cond3": {"worst_tail": str(self.cond3.worst_tail),
                      "worst_tail_float": float(self.cond3.worst_tail),
                      "witness": None if self.cond3.witness is None else
                      [self.cond3.witness[0], list(self.cond3.witness[1])],
                      "strategy": self.cond3.strategy,
                      "samples": self.cond3.samples,
                      "witness_only": self.cond3.witness_only,
                      "pass": self.cond3.passed},
            "overall": self.overall,
            "soundness": None if self.soundness is None else self.soundness.as_dict(),
        }


def certify_coordinate_expansion(graph: TestGraph, lam, rho, strategy: str = "exhaustive",
                                 samples: int = 64, seed: int = 0,
                                 c=DEFAULT_C) -> Certificate:
    lam, rho = to_fraction(lam), to_fraction(rho)
    cond1 = check_condition_global(graph, lam)
    cond2 = check_condition_retention(graph, rho)
    cond3 = check_condition_sampling(graph, rho, lam, strategy, samples, seed)
    try:
        consts = soundness_constant(lam, rho, c)
    except InvalidArgument:
        consts = None
    return Certificate(lam, rho, cond1, cond2, cond3, consts)
