"""Stage 1: fold per-vertex bias and delay dynamics into the edge weights.

A layer with bias vector b and delay vector tau evolves like an unbiased
random walk on a transformed graph: first every edge is reweighed by the
bias (one-sided for directed graphs, two-sided for undirected ones), then
each delay tau_u >= 1 becomes a self-loop of weight (tau_u - 1) times the
reweighed out-degree. The resulting "interaction matrix" is what later
stages compose; for undirected input it is unique up to one global scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .errors import DanglingVertex, DelayBelowOne, DimensionMismatch, NegativeEntry
from .graph import LayerGraph


@dataclass(frozen=True)
class DynamicsParams:
    """Per-vertex dynamics of one layer.

    bias: strictly positive routing weights (diagonal of B).
    delay: relative mean waiting times (diagonal of T), each >= 1.
    """

    bias: np.ndarray
    delay: np.ndarray

    def __post_init__(self):
        bias = np.asarray(self.bias, dtype=np.float64)
        delay = np.asarray(self.delay, dtype=np.float64)
        object.__setattr__(self, "bias", bias)
        object.__setattr__(self, "delay", delay)
        if bias.shape != delay.shape:
            raise DimensionMismatch("bias and delay must have equal length")
        if bias.min(initial=np.inf) <= 0.0 or not np.all(np.isfinite(bias)):
            raise NegativeEntry("bias entries must be strictly positive and finite")
        if delay.min(initial=np.inf) < 1.0 or not np.all(np.isfinite(delay)):
            raise DelayBelowOne("delay entries must be finite and >= 1")

    @classmethod
    def identity(cls, n):
        return cls(np.ones(n), np.ones(n))


@dataclass(frozen=True)
class InteractionMatrix:
    """A transformed layer plus the reweighed degrees it was built from."""

    graph: LayerGraph
    reweighted_degrees: np.ndarray

    @property
    def n(self):
        return self.graph.n


def bias_transform(g: LayerGraph, b) -> LayerGraph:
    """Reweigh edges by the bias: b_u * a_uv directed, b_u * a_uv * b_v undirected."""
    b = np.asarray(b, dtype=np.float64)
    if b.shape != (g.n,):
        raise DimensionMismatch(f"bias must have length {g.n}")
    if b.min(initial=np.inf) <= 0.0 or not np.all(np.isfinite(b)):
        raise NegativeEntry("bias entries must be strictly positive and finite")
    coo = g.matrix.tocoo()
    if g.directed:
        data = coo.data * b[coo.row]
    else:
        # b[row] * b[col] is computed identically for (u, v) and (v, u),
        # so exact symmetry survives the reweighing
        data = coo.data * (b[coo.row] * b[coo.col])
    mat = sparse.coo_array((data, (coo.row, coo.col)), shape=(g.n, g.n))
    return LayerGraph(g.n, mat, g.directed)


def delay_transform(g_prime: LayerGraph, tau) -> InteractionMatrix:
    """Absorb delays as self-loops: W = A' + (T - I) D'.

    A vertex with delay tau_u gains a self-loop of weight (tau_u - 1) times
    its reweighed out-degree, added on top of any existing loop. tau = 1
    leaves the layer untouched; a scalar tau rescales the layer's clock.
    """
    tau = np.asarray(tau, dtype=np.float64)
    if tau.ndim == 0:
        tau = np.full(g_prime.n, float(tau))
    if tau.shape != (g_prime.n,):
        raise DimensionMismatch(f"delay must have length {g_prime.n}")
    if tau.min(initial=np.inf) < 1.0 or not np.all(np.isfinite(tau)):
        raise DelayBelowOne("delay entries must be finite and >= 1")
    d_prime = g_prime.out_degrees()
    loops = (tau - 1.0) * d_prime
    w = g_prime.matrix + sparse.diags_array(loops, format="csc")
    return InteractionMatrix(
        graph=LayerGraph(g_prime.n, w, g_prime.directed),
        reweighted_degrees=d_prime,
    )


def transform_layer(g: LayerGraph, p: DynamicsParams) -> InteractionMatrix:
    """Both transformations in sequence: reweigh by bias, then add delay loops."""
    return delay_transform(bias_transform(g, p.bias), p.delay)


def as_interaction(g: LayerGraph) -> InteractionMatrix:
    """Wrap an already-homogeneous layer (identity bias and delay)."""
    return InteractionMatrix(graph=g, reweighted_degrees=g.out_degrees())


def degree_proportional_delay(g: LayerGraph, kappa: float) -> np.ndarray:
    """Congestion-style delays tau_u = 1 + kappa * out_degree(u)."""
    if kappa < 0.0:
        raise DelayBelowOne("kappa must be non-negative to keep tau >= 1")
    return 1.0 + kappa * g.out_degrees()


def laplacian_of(w: InteractionMatrix):
    """Normalized Laplacian (D_w - W) D_w^{-1} of a transformed layer."""
    d = w.graph.out_degrees()
    dead = np.flatnonzero(d <= 0.0)
    if dead.size:
        raise DanglingVertex(int(dead[0]))
    mat = w.graph.matrix
    lap = (sparse.diags_array(d) - mat) @ sparse.diags_array(1.0 / d)
    return sparse.csc_array(lap)
