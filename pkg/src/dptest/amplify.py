"""Vertex expansion, neighbourhood domains and distance amplification."""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

import numpy as np

from .core import Domain, as_bits, dp_distance, dp_encode
from .errors import InvalidArgument, RetryExhausted, UnsupportedSize
from .testgraph import TestGraph, build_from_edges

RETRY_CAP = 10_000
BRUTE_FORCE_SUBSETS = 1 << 22


@dataclass(frozen=True)
class SimpleGraph:
    """Undirected graph on vertices ``0 .. n-1`` without loops or parallel edges."""

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        seen = set()
        for u, v in self.edges:
            if u == v:
                raise InvalidArgument(f"self loop at {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InvalidArgument(f"edge ({u}, {v}) outside [0, {self.n})")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise InvalidArgument(f"parallel edge {key}")
            seen.add(key)
        object.__setattr__(self, "edges", tuple(sorted(seen)))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "SimpleGraph":
        return cls(n, tuple((int(u), int(v)) for u, v in edges))

    @property
    def neighbors(self) -> list[set[int]]:
        adj = [set() for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def degrees(self) -> list[int]:
        return [len(a) for a in self.neighbors]

    def regular_degree(self) -> int:
        degs = set(self.degrees())
        if len(degs) != 1:
            raise InvalidArgument(f"graph is not regular (degrees {sorted(degs)})")
        return degs.pop()


def cycle_graph(n: int) -> SimpleGraph:
    return SimpleGraph.from_edges(n, ((v, (v + 1) % n) for v in range(n)))


def random_regular_graph(n: int, d: int, seed: int) -> SimpleGraph:
    """Uniform d-regular simple graph by the pairing model with full rejection.

    Stubs are matched by a random perfect matching; the whole matching is
    redrawn whenever it yields a loop or a repeated edge.
    """
    if (n * d) % 2:
        raise InvalidArgument(f"n*d must be even, got n={n}, d={d}")
    if not 0 <= d < n:
        raise InvalidArgument(f"need 0 <= d < n, got n={n}, d={d}")
    rng = np.random.default_rng(seed)
    stubs = np.repeat(np.arange(n), d)
    for _ in range(RETRY_CAP):
        pairs = rng.permutation(stubs).reshape(-1, 2)
        if np.any(pairs[:, 0] == pairs[:, 1]):
            continue
        keys = np.sort(pairs, axis=1)
        if np.unique(keys, axis=0).shape[0] != keys.shape[0]:
            continue
        return SimpleGraph.from_edges(n, keys.tolist())
    raise RetryExhausted(f"no simple {d}-regular graph on {n} vertices in {RETRY_CAP} tries")


@dataclass(frozen=True)
class ExpansionEstimate:
    h: Fraction
    mode: str
    witness: frozenset[int]


def _neighbor_masks(graph: SimpleGraph) -> list[int]:
    return [sum(1 << u for u in nbrs) for nbrs in graph.neighbors]


def vertex_expansion(graph: SimpleGraph, mode: str = "brute-force", samples: int = 2000,
                     seed: int = 0) -> ExpansionEstimate:
    """Vertex isoperimetric constant: min |boundary(S)| / (|S| d) over 1 <= |S| <= n/d.

    The boundary excludes S itself.  Brute force is exact; the sampled mode
    returns the best of random subsets and hence only an upper bound.
    """
    d = graph.regular_degree()
    if d == 0:
        raise InvalidArgument("expansion of an edgeless graph is undefined")
    n = graph.n
    max_size = n // d
    masks = _neighbor_masks(graph)

    def boundary_size(members) -> int:
        inside = 0
        reach = 0
        for v in members:
            inside |= 1 << v
            reach |= masks[v]
        return bin(reach & ~inside).count("1")

    if mode == "brute-force":
        total = sum(comb(n, s) for s in range(1, max_size + 1))
        if total > BRUTE_FORCE_SUBSETS:
            raise UnsupportedSize(f"{total} subsets exceed the brute-force cap")
        candidates_by_size = {s: itertools.combinations(range(n), s)
                              for s in range(1, max_size + 1)}
    elif mode == "sampled":
        rng = np.random.default_rng(seed)
        candidates_by_size = {}
        for _ in range(samples):
            size = int(rng.integers(1, max_size + 1))
            members = tuple(int(v) for v in rng.choice(n, size=size, replace=False))
            candidates_by_size.setdefault(size, []).append(members)
    else:
        raise InvalidArgument(f"unknown mode {mode!r}")

    best, witness = None, None
    for size in sorted(candidates_by_size):
        low, low_set = None, None
        for members in candidates_by_size[size]:
            count = boundary_size(members)
            if low is None or count < low:
                low, low_set = count, members
        if low is None:
            continue
        value = Fraction(low, size * d)
        if best is None or value < best:
            best, witness = value, frozenset(low_set)
    return ExpansionEstimate(best, mode, witness)


def boundary_domain(graph: SimpleGraph) -> Domain:
    """One set per vertex v: its neighbourhood, shifted to coordinates 1..n."""
    graph.regular_degree()
    return Domain(graph.n, tuple(tuple(u + 1 for u in sorted(nbrs))
                                 for nbrs in graph.neighbors))


def simple_graph_test_graph(graph: SimpleGraph, dom: Domain | None = None) -> TestGraph:
    """View a simple graph as a test graph over ``dom`` (default: its boundary domain)."""
    dom = boundary_domain(graph) if dom is None else dom
    if len(dom) != graph.n:
        raise InvalidArgument("domain must have one set per vertex")
    return build_from_edges(dom, graph.edges)


@dataclass(frozen=True)
class AmplificationResult:
    delta: Fraction
    encoded_distance: Fraction
    ratio: Fraction
    k: int
    in_regime: bool

    def as_dict(self) -> dict:
        return {"delta": str(self.delta), "encoded_distance": str(self.encoded_distance),
                "ratio": str(self.ratio), "ratio_float": float(self.ratio),
                "k": self.k, "in_regime": self.in_regime}


def amplification_ratio(dom: Domain, x: Sequence[int], y: Sequence[int]
                        ) -> AmplificationResult:
    """Encoded distance of two strings relative to ``k * delta``."""
    xb, yb = as_bits(x, dom.n), as_bits(y, dom.n)
    delta = Fraction(int((xb != yb).sum()), dom.n)
    if delta == 0:
        raise InvalidArgument("x and y must differ")
    sizes = set(int(z) for z in dom.sizes)
    if len(sizes) != 1:
        raise InvalidArgument("amplification is defined for uniform set sizes")
    k = sizes.pop()
    in_regime = delta < Fraction(1, k)
    if not in_regime:
        warnings.warn(f"delta = {delta} is not below 1/k = 1/{k}", stacklevel=2)
    encoded = dp_distance(dp_encode(xb, dom), dp_encode(yb, dom))
    return AmplificationResult(delta, encoded, encoded / (k * delta), k, in_regime)
