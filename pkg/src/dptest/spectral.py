"""Spectra of normalised adjacency matrices and expander-mixing bounds."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import FormulaNotApplicable, InvalidArgument, NumericFailure
from .testgraph import TestGraph

DENSE_LIMIT = 2000
ITERATION_CAP = 100_000
TOLERANCE = 1e-9


@dataclass(frozen=True)
class SpectralReport:
    lambda2: float
    lambda_min: float
    lambda_G: float
    method: str
    residual: float
    regular: bool = True

    def as_dict(self) -> dict:
        return {"lambda2": self.lambda2, "lambda_min": self.lambda_min,
                "lambda_G": self.lambda_G, "method": self.method,
                "residual": self.residual, "regular": self.regular}


def normalized_adjacency(graph: TestGraph) -> tuple[sp.csr_matrix, np.ndarray, bool]:
    """Return the normalised adjacency, its top eigenvector and a regularity flag.

    Regular graphs are divided by the common degree; otherwise the symmetric
    normalisation ``D^-1/2 W D^-1/2`` is used.
    """
    W = graph.to_scipy()
    deg = graph.degree_array.astype(np.float64)
    if np.any(deg == 0):
        raise InvalidArgument("normalised adjacency needs every degree positive")
    regular = graph.is_regular()
    if regular:
        A = W / deg[0]
        top = np.full(deg.size, 1.0 / math.sqrt(deg.size))
    else:
        warnings.warn("graph is not regular; using symmetric normalisation",
                      stacklevel=3)
        scale = sp.diags(1.0 / np.sqrt(deg))
        A = (scale @ W @ scale).tocsr()
        top = np.sqrt(deg) / np.linalg.norm(np.sqrt(deg))
    return A, top, regular


def lambda_of(graph: TestGraph, method: str | None = None) -> SpectralReport:
    """Second largest, smallest and absolute nontrivial eigenvalue.

    ``method`` is ``"dense"`` or ``"iterative"``; by default dense is used up
    to ``DENSE_LIMIT`` vertices.  A one-vertex graph has no nontrivial
    eigenvalue and reports zeros.
    """
    N = graph.num_vertices
    A, top, regular = normalized_adjacency(graph)
    if N == 1:
        return SpectralReport(0.0, 0.0, 0.0, "dense", 0.0, regular)
    if method is None:
        method = "dense" if N <= DENSE_LIMIT else "iterative"
    if method == "dense":
        lam2, lam_min, residual = _dense_extremes(A.toarray())
    elif method == "iterative":
        lam2, lam_min, residual = _iterative_extremes(A, top)
    else:
        raise InvalidArgument(f"unknown eigensolver method {method!r}")
    return SpectralReport(lam2, lam_min, max(abs(lam2), abs(lam_min)), method,
                          residual, regular)


def _dense_extremes(A: np.ndarray) -> tuple[float, float, float]:
    vals, vecs = np.linalg.eigh(A)
    picks = [-2, 0]
    residual = max(float(np.linalg.norm(A @ vecs[:, j] - vals[j] * vecs[:, j]))
                   for j in picks)
    return float(vals[-2]), float(vals[0]), residual


def _iterative_extremes(A: sp.csr_matrix, top: np.ndarray) -> tuple[float, float, float]:
    N = A.shape[0]
    ident = sp.identity(N, format="csr")
    # both shifted operators have spectrum in [0, 1]; their top nontrivial
    # eigenvalue gives lambda2 and lambda_min respectively
    upper, r1 = _deflated_top_eigenvalue((A + ident) * 0.5, top)
    lower, r2 = _deflated_top_eigenvalue((ident - A) * 0.5, top)
    return 2.0 * upper - 1.0, 1.0 - 2.0 * lower, 2.0 * max(r1, r2)


def _deflated_top_eigenvalue(B: sp.csr_matrix, top: np.ndarray, block: int = 8,
                             tol: float = TOLERANCE, max_iter: int = ITERATION_CAP,
                             seed: int = 0) -> tuple[float, float]:
    """Block power iteration on the complement of ``top``.

    Every iterate is projected off ``top`` and re-orthonormalised, followed by
    a Rayleigh-Ritz step.  Converges when the residual of the leading Ritz
    pair drops below ``tol``.
    """
    N = B.shape[0]
    block = max(1, min(block, N - 1))
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((N, block))
    residual = math.inf
    for _ in range(max_iter):
        X -= np.outer(top, top @ X)
        X, _ = np.linalg.qr(X)
        BX = B @ X
        H = X.T @ BX
        theta, Q = np.linalg.eigh((H + H.T) * 0.5)
        X = X @ Q[:, ::-1]
        BX = BX @ Q[:, ::-1]
        theta = theta[::-1]
        residual = float(np.linalg.norm(BX[:, 0] - theta[0] * X[:, 0]))
        if residual <= tol:
            return float(theta[0]), residual
        X = BX
    raise NumericFailure(f"power iteration did not converge in {max_iter} steps",
                         residual=residual)


def johnson_lambda2_closed_form(n: int, k: int, t: int) -> Fraction:
    """Closed-form nontrivial eigenvalue of J(n, k, t): ``t/k - (k-t)/(n-k)``.

    Valid when ``(k-t)(n-1) >= k(n-k)`` and the graph has edges.  It is the
    eigenvalue of the first nontrivial eigenspace and, under that condition,
    the one of largest absolute value, so its magnitude equals ``lambda_G``.
    It is usually negative, in which case it equals ``lambda_min``.
    """
    if not 0 <= t < k < n:
        raise FormulaNotApplicable(f"need 0 <= t < k < n, got ({n}, {k}, {t})")
    if n - k < k - t:
        raise FormulaNotApplicable(f"J({n},{k},{t}) has no edges")
    if (k - t) * (n - 1) < k * (n - k):
        raise FormulaNotApplicable(
            f"(k-t)(n-1) = {(k - t) * (n - 1)} < k(n-k) = {k * (n - k)}")
    return Fraction(t, k) - Fraction(k - t, n - k)


def _lambda_G(graph: TestGraph, report: SpectralReport | None) -> float:
    if not graph.is_regular():
        raise InvalidArgument("mixing bound is only stated for regular graphs")
    return (report or lambda_of(graph)).lambda_G


def mixing_bound(graph: TestGraph, size_S: int, size_T: int, c_ratio=1,
                 report: SpectralReport | None = None) -> float:
    """Upper bound ``|T|/|V| + lambda_G * sqrt(c |T| / |S|)`` on Pr[v in T | u in S].

    With ``c_ratio == 1`` this is the uniform form; larger values cover a
    start distribution whose point masses differ by at most that factor.
    """
    N = graph.num_vertices
    if size_S < 1 or size_T < 0:
        raise InvalidArgument("need |S| >= 1 and |T| >= 0")
    if 2 * size_S > N:
        raise InvalidArgument(f"|S| = {size_S} exceeds |V|/2 = {N / 2}")
    if c_ratio < 1:
        raise InvalidArgument("c_ratio must be at least 1")
    lam = _lambda_G(graph, report)
    return size_T / N + lam * math.sqrt(float(c_ratio) * size_T / size_S)


def conditional_edge_probability(graph: TestGraph, S: Sequence[int], T: Sequence[int],
                                 mu: Mapping[int, object] | Sequence | None = None
                                 ) -> Fraction:
    """Exact Pr[v in T] for u drawn from ``mu`` on S and v a weighted neighbour of u."""
    S = [int(u) for u in S]
    if not S:
        raise InvalidArgument("S must be nonempty")
    if mu is None:
        masses = [Fraction(1)] * len(S)
    elif isinstance(mu, Mapping):
        masses = [Fraction(mu[u]) for u in S]
    else:
        masses = [Fraction(m) for m in mu]
        if len(masses) != len(S):
            raise InvalidArgument("mu must give one mass per element of S")
    if any(m <= 0 for m in masses):
        raise InvalidArgument("mu must be positive on S")
    in_T = np.zeros(graph.num_vertices, dtype=bool)
    in_T[np.asarray(list(T), dtype=np.int64)] = True
    deg = graph.degree_array
    total = Fraction(0)
    for u, m in zip(S, masses):
        nbrs, w = graph.row(u)
        total += m * Fraction(int(w[in_T[nbrs]].sum()), int(deg[u]))
    return total / sum(masses)
