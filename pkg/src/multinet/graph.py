"""Weighted sparse graphs and their unbiased random walks.

An adjacency matrix stores ``a[u, v]`` as the weight of the edge u -> v;
out-degrees are row sums. Transition matrices are column-stochastic: entry
``(v, u)`` is the probability of stepping u -> v, so a stationary vector pi
satisfies ``M @ pi = pi`` literally. All types are immutable after
construction and every operation returns fresh objects.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components as _cc

from .errors import (
    DanglingVertex,
    DimensionMismatch,
    NoConvergence,
    NonPositiveScale,
    NotDetailedBalanced,
)

# structural identities hold to this tolerance; iterative results default to 1e-10
STRUCTURAL_TOL = 1e-12
ITERATIVE_TOL = 1e-10


def _canonical(mat, shape=None):
    """Coerce to canonical compressed-column form with sorted indices."""
    out = sparse.csc_array(mat, shape=shape, dtype=np.float64)
    out.sum_duplicates()
    out.sort_indices()
    out.eliminate_zeros()
    return out


@dataclass(frozen=True)
class LayerGraph:
    """One layer: sparse non-negative adjacency plus a directedness flag.

    A zero entry means the edge is absent; stored weights are strictly
    positive and finite. Undirected graphs hold the full symmetric matrix.
    """

    n: int
    matrix: sparse.csc_array
    directed: bool

    def __post_init__(self):
        mat = _canonical(self.matrix, shape=(self.n, self.n))
        object.__setattr__(self, "matrix", mat)
        data = mat.data
        if data.size and (not np.all(np.isfinite(data)) or data.min() <= 0.0):
            raise ValueError("edge weights must be strictly positive and finite")
        if not self.directed and (mat != mat.T).nnz != 0:
            raise ValueError("undirected graph requires an exactly symmetric matrix")

    @classmethod
    def from_edges(cls, n, edges, directed=True):
        """Build from an iterable of (u, v, weight) triples.

        For undirected graphs each edge is mirrored; a triple given in both
        orientations with equal weight is accepted once.
        """
        rows, cols, vals = [], [], []
        seen = {}
        for u, v, w in edges:
            key = (u, v) if directed or u <= v else (v, u)
            if key in seen:
                raise ValueError(f"edge {key} specified twice")
            seen[key] = w
            rows.append(u)
            cols.append(v)
            vals.append(w)
            if not directed and u != v:
                rows.append(v)
                cols.append(u)
                vals.append(w)
        mat = sparse.coo_array((vals, (rows, cols)), shape=(n, n))
        return cls(n, mat, directed)

    @classmethod
    def from_dense(cls, array, directed=True):
        array = np.asarray(array, dtype=np.float64)
        return cls(array.shape[0], sparse.csc_array(array), directed)

    def out_degrees(self):
        return np.asarray(self.matrix.sum(axis=1)).ravel()

    def in_degrees(self):
        if not self.directed:
            return self.out_degrees()
        return np.asarray(self.matrix.sum(axis=0)).ravel()

    @property
    def volume(self):
        return float(self.matrix.sum())

    def edges(self):
        """Yield (u, v, weight) in row-major order, deterministically."""
        coo = self.matrix.tocoo()
        order = np.lexsort((coo.col, coo.row))
        for k in order:
            yield int(coo.row[k]), int(coo.col[k]), float(coo.data[k])

    def toarray(self):
        return self.matrix.toarray()

    def scaled(self, factor):
        """Same topology with every weight multiplied by `factor` > 0."""
        if factor <= 0:
            raise NonPositiveScale(f"scale factor must be positive, got {factor}")
        return LayerGraph(self.n, self.matrix * factor, self.directed)


@dataclass(frozen=True)
class DegreeVector:
    """Out- and in-degree vectors of a graph (equal for undirected input)."""

    out: np.ndarray
    in_: np.ndarray


def degrees(g: LayerGraph) -> DegreeVector:
    return DegreeVector(out=g.out_degrees(), in_=g.in_degrees())


@dataclass(frozen=True)
class TransitionMatrix:
    """Column-stochastic random-walk operator; entry (v, u) = P(u -> v)."""

    n: int
    matrix: sparse.csc_array

    def __post_init__(self):
        mat = _canonical(self.matrix, shape=(self.n, self.n))
        object.__setattr__(self, "matrix", mat)
        col_sums = np.asarray(mat.sum(axis=0)).ravel()
        if np.max(np.abs(col_sums - 1.0), initial=0.0) > STRUCTURAL_TOL:
            raise ValueError("every column of a transition matrix must sum to 1")
        if mat.data.size and (mat.data.min() < 0.0 or mat.data.max() > 1.0 + STRUCTURAL_TOL):
            raise ValueError("transition probabilities must lie in [0, 1]")

    def toarray(self):
        return self.matrix.toarray()


@dataclass(frozen=True)
class StationaryDistribution:
    """Probability vector fixed by a transition matrix."""

    pi: np.ndarray

    def __post_init__(self):
        pi = np.asarray(self.pi, dtype=np.float64)
        object.__setattr__(self, "pi", pi)
        if pi.min(initial=0.0) < 0.0:
            raise ValueError("stationary entries must be non-negative")
        if abs(pi.sum() - 1.0) > STRUCTURAL_TOL:
            raise ValueError("stationary distribution must sum to 1")


def urw_transition(g: LayerGraph) -> TransitionMatrix:
    """Unbiased random walk of a graph: step weights proportional to edges.

    Returns M with ``M[v, u] = a[u, v] / out_degree(u)``. Every vertex must
    have positive out-degree; otherwise the walk is undefined at it.
    """
    d = g.out_degrees()
    dead = np.flatnonzero(d <= 0.0)
    if dead.size:
        raise DanglingVertex(int(dead[0]))
    scaled = sparse.diags_array(1.0 / d) @ g.matrix
    return TransitionMatrix(g.n, scaled.T)


def reconstruct_adjacency(m: TransitionMatrix, gamma) -> LayerGraph:
    """One member of the adjacency family realizing a given walk.

    gamma assigns each vertex a positive out-degree; the result's unbiased
    random walk reproduces `m` exactly (the per-vertex scaling cancels).
    """
    gamma = np.asarray(gamma, dtype=np.float64)
    if gamma.shape != (m.n,):
        raise DimensionMismatch(f"gamma must have length {m.n}")
    if gamma.min(initial=np.inf) <= 0.0 or not np.all(np.isfinite(gamma)):
        raise NonPositiveScale("gamma entries must be strictly positive")
    adjacency = (m.matrix @ sparse.diags_array(gamma)).T
    return LayerGraph(m.n, adjacency, directed=True)


def stationary(
    m: TransitionMatrix,
    tol: float = ITERATIVE_TOL,
    max_iter: int = 100_000,
    damping: float = 0.0,
    auto_retry: bool = True,
) -> StationaryDistribution:
    """Fixed point of the walk by damped power iteration.

    Iterates the half-lazy operator (x + Mx)/2, which shares every fixed
    point with M but is aperiodic, so bipartite structures converge without
    damping. `damping` blends toward the uniform distribution (changing the
    chain, PageRank-style); on non-convergence with damping 0 the solver
    retries once at 0.15 and keeps the result only if it still fixes the
    original operator. The returned pi satisfies ``|M pi - pi|_1 <= tol``.
    """
    x, converged = _power_iterate(m.matrix, tol, max_iter, damping)
    if not converged and auto_retry and damping == 0.0:
        x, converged = _power_iterate(m.matrix, tol, max_iter, 0.15)
    residual = float(np.abs(m.matrix @ x - x).sum())
    if residual > tol:
        raise NoConvergence(residual, max_iter)
    return StationaryDistribution(x)


def _power_iterate(mat, tol, max_iter, damping):
    n = mat.shape[0]
    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        y = mat @ x
        if damping:
            y = (1.0 - damping) * y + damping / n
        if np.abs(y - x).sum() <= tol:
            return x, True
        x = 0.5 * (x + y)
        x /= x.sum()
    return x, False


def is_detailed_balanced(m: TransitionMatrix, pi: StationaryDistribution,
                         tol: float = ITERATIVE_TOL) -> bool:
    """Whether probability flow u -> v balances v -> u under pi everywhere."""
    flow = m.matrix @ sparse.diags_array(pi.pi)
    imbalance = flow - flow.T
    if imbalance.nnz == 0:
        return True
    return float(np.abs(imbalance.data).max()) <= tol


def symmetrize_from_markov(m: TransitionMatrix, alpha: float,
                           tol: float = ITERATIVE_TOL) -> LayerGraph:
    """The symmetric adjacency alpha * M Pi of a detailed-balanced walk.

    Pi is recovered exactly from the balance ratios along a spanning tree,
    then the full balance condition is verified; non-balanced chains are
    rejected. Results for two alphas differ by exactly their ratio (the one
    global degree of freedom of an undirected walk).
    """
    if alpha <= 0:
        raise NonPositiveScale("alpha must be positive")
    pi = _balance_stationary(m)
    if not is_detailed_balanced(m, pi, tol):
        raise NotDetailedBalanced("chain is not detailed-balanced")
    s = (m.matrix @ sparse.diags_array(pi.pi)) * alpha
    symmetric = (s + s.T) * 0.5
    return LayerGraph(m.n, symmetric, directed=False)


def _balance_stationary(m: TransitionMatrix) -> StationaryDistribution:
    """Stationary vector from pairwise ratios, exact for balanced chains."""
    forward = m.matrix  # column u holds the out-transitions of u
    backward = m.matrix.tocsr()  # row u holds P(v -> u) over v
    n = m.n
    pi = np.zeros(n)
    for root in range(n):
        if pi[root] > 0:
            continue
        pi[root] = 1.0
        stack = [root]
        while stack:
            u = stack.pop()
            lo, hi = forward.indptr[u], forward.indptr[u + 1]
            for v, p_uv in zip(forward.indices[lo:hi], forward.data[lo:hi]):
                if pi[v] > 0 or v == u:
                    continue
                p_vu = backward[int(u), int(v)]  # probability of v -> u
                if p_vu <= 0.0:
                    raise NotDetailedBalanced(
                        f"transition {u}->{v} has no reverse"
                    )
                pi[v] = pi[u] * p_uv / p_vu
                stack.append(int(v))
    return StationaryDistribution(pi / pi.sum())


def components(matrix) -> list[np.ndarray]:
    """Weakly connected components of a sparse adjacency, largest first."""
    count, labels = _cc(sparse.csr_array(matrix), directed=True, connection="weak")
    comps = [np.flatnonzero(labels == c) for c in range(count)]
    comps.sort(key=len, reverse=True)
    return comps
