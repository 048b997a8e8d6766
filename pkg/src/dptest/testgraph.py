"""Weighted test graphs over domain indices and the named constructions.

A test graph is a symmetric multigraph with positive integer weights, kept in
compressed sparse row form.  The test distribution picks a vertex uniformly
and then a neighbour with probability proportional to the edge weight; a self
loop contributes its weight once to the degree.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from math import comb
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .core import Domain
from .errors import EmptyLocalView, InvalidArgument, InvalidGraph, UnsupportedSize

MAX_VERTICES = 200_000
MAX_ADJACENCY_ENTRIES = 100_000_000


@dataclass(frozen=True, eq=False)
class TestGraph:
    dom: Domain
    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray
    # index of each vertex in the graph this one was induced from, if any
    parent: np.ndarray | None = field(default=None)

    __test__ = False  # keep pytest from collecting this class

    def __post_init__(self):
        for arr in (self.indptr, self.indices, self.weights):
            arr.flags.writeable = False

    @property
    def num_vertices(self) -> int:
        return len(self.indptr) - 1

    @property
    def nnz(self) -> int:
        return len(self.indices)

    def row(self, s: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.indptr[s], self.indptr[s + 1]
        return self.indices[lo:hi], self.weights[lo:hi]

    def sources(self) -> np.ndarray:
        """Row index of every stored adjacency entry."""
        return np.repeat(np.arange(self.num_vertices), np.diff(self.indptr))

    @cached_property
    def degree_array(self) -> np.ndarray:
        """Total incident weight per vertex."""
        deg = _row_sums(self.indptr, self.weights)
        deg.flags.writeable = False
        return deg

    def is_regular(self) -> bool:
        deg = self.degree_array
        return deg.size == 0 or bool((deg == deg[0]).all())

    def to_scipy(self) -> sp.csr_matrix:
        n = self.num_vertices
        return sp.csr_matrix((self.weights.astype(np.float64), self.indices, self.indptr),
                             shape=(n, n))

    def edge_list(self) -> list[tuple[int, int, int]]:
        """Each undirected edge once as ``(s, s', w)`` with ``s <= s'``."""
        src = self.sources()
        keep = src <= self.indices
        return [(int(a), int(b), int(w)) for a, b, w in
                zip(src[keep], self.indices[keep], self.weights[keep])]

    def weight(self, s: int, t: int) -> int:
        nbrs, w = self.row(s)
        pos = np.searchsorted(nbrs, t)
        if pos < nbrs.size and nbrs[pos] == t:
            return int(w[pos])
        return 0


def _row_sums(indptr: np.ndarray, weights: np.ndarray) -> np.ndarray:
    csum = np.concatenate(([0], np.cumsum(weights, dtype=np.int64)))
    return csum[indptr[1:]] - csum[indptr[:-1]]


def _from_coo(dom: Domain, rows: np.ndarray, cols: np.ndarray,
              weights: np.ndarray | None = None) -> TestGraph:
    """Assemble a graph from directed entries that are already symmetric."""
    n = len(dom)
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    if weights is None:
        weights = np.ones(rows.size, dtype=np.int64)
    order = np.lexsort((cols, rows))
    rows, cols, weights = rows[order], cols[order], np.asarray(weights, np.int64)[order]
    # merge duplicate (row, col) entries
    if rows.size:
        new = np.ones(rows.size, dtype=bool)
        new[1:] = (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])
        starts = np.flatnonzero(new)
        weights = np.add.reduceat(weights, starts)
        rows, cols = rows[starts], cols[starts]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
    return TestGraph(dom, indptr, cols.astype(np.int32), weights)


def _check_vertex_cap(count: int) -> None:
    if count > MAX_VERTICES:
        raise UnsupportedSize(
            f"{count} vertices exceeds the construction cap of {MAX_VERTICES}")


def _check_entry_cap(count: int) -> None:
    if count > MAX_ADJACENCY_ENTRIES:
        raise UnsupportedSize(
            f"{count} adjacency entries exceeds the cap of {MAX_ADJACENCY_ENTRIES}")


def k_subsets_domain(n: int, k: int) -> Domain:
    return Domain(n, tuple(tuple(c) for c in itertools.combinations(range(1, n + 1), k)))


def build_johnson(n: int, k: int, t: int) -> tuple[Domain, TestGraph]:
    """The Johnson-family graph J(n, k, t): k-subsets adjacent iff they share t points."""
    if not 0 <= t < k <= n:
        raise InvalidArgument(f"need 0 <= t < k <= n, got n={n}, k={k}, t={t}")
    N = comb(n, k)
    _check_vertex_cap(N)
    degree = comb(k, t) * comb(n - k, k - t)
    _check_entry_cap(N * degree)
    dom = k_subsets_domain(n, k)
    if degree == 0:
        return dom, _from_coo(dom, np.empty(0, np.int64), np.empty(0, np.int64))

    if n > 62:
        return dom, _johnson_by_lookup(dom, t)
    member = dom.membership
    inside = np.nonzero(member)[1].reshape(N, k)
    outside = np.nonzero(~member)[1].reshape(N, n - k)
    bit = np.left_shift(np.int64(1), np.arange(n, dtype=np.int64))
    masks = member.astype(np.int64) @ bit

    add = np.array(list(itertools.combinations(range(n - k), k - t)),
                   dtype=np.int64).reshape(-1, k - t)
    if t:
        keep = np.array(list(itertools.combinations(range(k), t)), dtype=np.int64)
        keep_masks = bit[inside[:, keep]].sum(axis=2)
    else:
        keep_masks = np.zeros((N, 1), np.int64)
    add_masks = bit[outside[:, add]].sum(axis=2)
    nbr_masks = (keep_masks[:, :, None] | add_masks[:, None, :]).reshape(N, -1)
    del keep_masks, add_masks

    order = np.argsort(masks)
    cols = order[np.searchsorted(masks[order], nbr_masks)].astype(np.int32)
    del nbr_masks
    cols.sort(axis=1)
    return dom, _from_uniform_rows(dom, cols)


def _johnson_by_lookup(dom: Domain, t: int) -> TestGraph:
    index = {s: idx for idx, s in enumerate(dom.sets)}
    rows, cols = [], []
    for idx, s in enumerate(dom.sets):
        for other, j in index.items():
            if len(set(s).intersection(other)) == t:
                rows.append(idx)
                cols.append(j)
    return _from_coo(dom, np.array(rows, np.int64), np.array(cols, np.int64))


def _from_uniform_rows(dom: Domain, cols: np.ndarray) -> TestGraph:
    """Unit-weight graph whose row ``s`` is the sorted, duplicate-free ``cols[s]``."""
    N, deg = cols.shape
    indptr = np.arange(0, (N + 1) * deg, deg, dtype=np.int64)
    return TestGraph(dom, indptr, cols.ravel(), np.ones(N * deg, dtype=np.int64))


def _intersection_graph(dom: Domain) -> TestGraph:
    """Unit edge between every pair of sets that intersect, self loops included."""
    m = sp.csr_matrix(dom.membership.astype(np.int64))
    inter = (m @ m.T).tocoo()
    keep = inter.data > 0
    return _from_coo(dom, inter.row[keep], inter.col[keep])


def sliding_window_domain(n: int, k: int, sparse: bool = False) -> Domain:
    if not 1 <= k <= n:
        raise InvalidArgument(f"need 1 <= k <= n, got n={n}, k={k}")
    if sparse:
        if k % 2 or (2 * n) % k:
            raise InvalidArgument(
                f"sparse windows need k even and k | 2n, got n={n}, k={k}")
        starts = [i * k // 2 for i in range(2 * n // k)]
    else:
        starts = list(range(n))
    return Domain(n, tuple(tuple((s + j) % n + 1 for j in range(k)) for s in starts))


def build_sliding_window(n: int, k: int, sparse: bool = False) -> tuple[Domain, TestGraph]:
    """Cyclic windows of length k; windows are adjacent iff they intersect."""
    dom = sliding_window_domain(n, k, sparse)
    _check_vertex_cap(len(dom))
    return dom, _intersection_graph(dom)


def build_clique_slice(n: int) -> tuple[Domain, TestGraph]:
    """Half slice of the cube with the complete graph plus self loops."""
    if n % 2 or n < 2:
        raise InvalidArgument(f"clique slice needs a positive even n, got {n}")
    N = comb(n, n // 2)
    _check_vertex_cap(N)
    _check_entry_cap(N * N)
    dom = k_subsets_domain(n, n // 2)
    rows = np.repeat(np.arange(N, dtype=np.int64), N)
    cols = np.tile(np.arange(N, dtype=np.int64), N)
    return dom, _from_coo(dom, rows, cols)


def build_from_edges(dom: Domain, edges: Iterable[Sequence[int]]) -> TestGraph:
    """Graph from ``(s, s')`` or ``(s, s', w)`` entries, each an undirected edge.

    Repeated entries add their weights and every entry is mirrored, so the
    result is symmetric whatever the input looks like.
    """
    rows, cols, ws = [], [], []
    N = len(dom)
    for e in edges:
        if len(e) not in (2, 3):
            raise InvalidArgument(f"edge {e!r} must be (s, s') or (s, s', w)")
        s, t = int(e[0]), int(e[1])
        w = int(e[2]) if len(e) == 3 else 1
        if not (0 <= s < N and 0 <= t < N):
            raise InvalidArgument(f"edge ({s}, {t}) has an index outside [0, {N})")
        if w < 1:
            raise InvalidArgument(f"edge ({s}, {t}) has non-positive weight {w}")
        rows.append(s); cols.append(t); ws.append(w)
        if s != t:
            rows.append(t); cols.append(s); ws.append(w)
    return _from_coo(dom, np.array(rows, np.int64), np.array(cols, np.int64),
                     np.array(ws, np.int64))


def require_positive_degrees(graph: TestGraph) -> np.ndarray:
    deg = graph.degree_array
    if deg.size == 0:
        raise InvalidGraph("graph has no vertices")
    zero = np.flatnonzero(deg == 0)
    if zero.size:
        raise InvalidGraph(f"vertex {int(zero[0])} has degree zero")
    return deg


def sample_edge(graph: TestGraph, rng: np.random.Generator) -> tuple[int, int]:
    """Draw ``(s, s')``: s uniform, then s' with probability w(s, s') / deg(s)."""
    require_positive_degrees(graph)
    s = int(rng.integers(graph.num_vertices))
    nbrs, w = graph.row(s)
    cum = np.cumsum(w)
    pick = int(np.searchsorted(cum, rng.integers(cum[-1]), side="right"))
    return s, int(nbrs[pick])


def sample_edges(graph: TestGraph, rng: np.random.Generator, count: int
                 ) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised form of :func:`sample_edge` for ``count`` independent draws."""
    deg = require_positive_degrees(graph)
    src = rng.integers(graph.num_vertices, size=count)
    cum = np.cumsum(graph.weights, dtype=np.int64)
    before = np.concatenate(([0], cum))[graph.indptr[src]]
    offset = (rng.random(count) * deg[src]).astype(np.int64)
    offset = np.minimum(offset, deg[src] - 1)
    pick = np.searchsorted(cum, before + offset, side="right")
    return src, graph.indices[pick].astype(np.int64)


def local_subgraph(graph: TestGraph, i: int) -> TestGraph:
    """Subgraph induced by the sets containing coordinate ``i``.

    The result's ``parent`` array maps its vertices back to ``graph``.
    """
    members = graph.dom.containing(i)
    if members.size == 0:
        raise EmptyLocalView(f"no set contains coordinate {i}")
    position = np.full(graph.num_vertices, -1, dtype=np.int64)
    position[members] = np.arange(members.size)
    rows, cols, ws = [], [], []
    for new, old in enumerate(members):
        nbrs, w = graph.row(int(old))
        mapped = position[nbrs]
        keep = mapped >= 0
        rows.append(np.full(int(keep.sum()), new, dtype=np.int64))
        cols.append(mapped[keep])
        ws.append(w[keep])
    sub = _from_coo(graph.dom.subdomain(members), np.concatenate(rows),
                    np.concatenate(cols), np.concatenate(ws))
    return TestGraph(sub.dom, sub.indptr, sub.indices, sub.weights, parent=members)


def build_family(family: str, n: int, k: int | None = None, t: int | None = None
                 ) -> tuple[Domain, TestGraph]:
    """Dispatch on the family names used by the command line."""
    if family == "johnson":
        if k is None or t is None:
            raise InvalidArgument("johnson needs k and t")
        return build_johnson(n, k, t)
    if family == "sliding":
        if k is None:
            raise InvalidArgument("sliding needs k")
        return build_sliding_window(n, k)
    if family == "sliding-sparse":
        if k is None:
            raise InvalidArgument("sliding-sparse needs k")
        return build_sliding_window(n, k, sparse=True)
    if family == "clique-slice":
        return build_clique_slice(n)
    if family == "j-2-1":
        return build_johnson(n, 2, 1)
    raise InvalidArgument(f"unknown family {family!r}")
