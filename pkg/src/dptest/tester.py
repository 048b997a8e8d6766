"""The two-query agreement test, evaluated exactly or by sampling."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import DPTable
from .errors import InvalidArgument, UnsupportedSize
from .testgraph import TestGraph, require_positive_degrees, sample_edges

MAX_EXACT_PICKS = 100_000_000
_CHUNK = 1 << 22


@dataclass(frozen=True)
class TestReport:
    mode: str
    rejection: Fraction | float
    trials: int | None = None
    seed: int | None = None
    std_error: float | None = None

    __test__ = False

    def as_dict(self) -> dict:
        out = {"mode": self.mode}
        if self.mode == "exact":
            out["rejection"] = str(self.rejection)
            out["rejection_float"] = float(self.rejection)
        else:
            out.update(rejection=self.rejection, trials=self.trials,
                       seed=self.seed, std_error=self.std_error)
        return out


def check_edge(F: DPTable, s: int, t: int) -> bool:
    """True (accept) iff the two local values agree on every shared coordinate."""
    N = len(F.domain)
    if not (0 <= s < N and 0 <= t < N):
        raise InvalidArgument(f"indices ({s}, {t}) outside [0, {N})")
    shared = F.domain.packed[s] & F.domain.packed[t]
    return not np.any(shared & (F.packed[s] ^ F.packed[t]))


def _rejects(F: DPTable, src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    m, v = F.domain.packed, F.packed
    return np.any(m[src] & m[dst] & (v[src] ^ v[dst]), axis=1)


def _check_table_graph(F: DPTable, graph: TestGraph) -> None:
    if graph.dom is not F.domain and graph.dom != F.domain:
        raise InvalidArgument("table and graph use different domains")


def rejection_probability_exact(F: DPTable, graph: TestGraph) -> TestReport:
    """Exact rejection probability under the vertex-then-neighbour distribution."""
    _check_table_graph(F, graph)
    deg = require_positive_degrees(graph)
    if graph.nnz > MAX_EXACT_PICKS:
        raise UnsupportedSize(
            f"{graph.nnz} adjacency entries exceeds the exact cap of "
            f"{MAX_EXACT_PICKS}; use the Monte Carlo mode")
    N = graph.num_vertices
    rejected = np.zeros(N, dtype=np.int64)
    for lo in range(0, graph.nnz, _CHUNK):
        hi = min(graph.nnz, lo + _CHUNK)
        dst = graph.indices[lo:hi].astype(np.int64)
        src = np.searchsorted(graph.indptr, np.arange(lo, hi), side="right") - 1
        bad = _rejects(F, src, dst)
        np.add.at(rejected, src[bad], graph.weights[lo:hi][bad])
    if graph.is_regular():
        rejection = Fraction(int(rejected.sum()), N * int(deg[0]))
    else:
        rejection = sum((Fraction(int(r), int(d)) for r, d in zip(rejected, deg)
                         if r), Fraction(0)) / N
    return TestReport("exact", rejection)


def run_test_monte_carlo(F: DPTable, graph: TestGraph, trials: int, seed: int
                         ) -> TestReport:
    if trials < 1:
        raise InvalidArgument("trials must be at least 1")
    _check_table_graph(F, graph)
    rng = np.random.default_rng(seed)
    rejected = 0
    for lo in range(0, trials, _CHUNK):
        count = min(_CHUNK, trials - lo)
        src, dst = sample_edges(graph, rng, count)
        rejected += int(_rejects(F, src, dst).sum())
    p = rejected / trials
    return TestReport("monte-carlo", p, trials=trials, seed=seed,
                      std_error=math.sqrt(p * (1 - p) / trials))
