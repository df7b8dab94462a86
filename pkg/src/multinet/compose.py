"""Stage 2: assemble transformed layers into one ln x ln super-adjacency.

The super-adjacency keeps each transformed layer as a diagonal block and
couples instances of the same vertex across layers through diagonal
off-diagonal blocks. Flat indexing is layer-major: instance (vertex u,
layer i) sits at flat index ``i * n + u``.

Four regimes build the coupling:

* multiplex   -- no inter-layer structure, layers are summed entrywise;
* ego         -- every vertex brings an l x l inter-layer Markov matrix,
                 realized uniquely as edge weights (the walk on the result
                 projects back to each layer and to each ego matrix);
* stationary  -- only the stationary layer distribution of each vertex is
                 known; the undirected minimum-volume solution is built;
* distance    -- pairwise layer distances set one global coupling scale
                 (the temporal-stack case).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import sparse

from .errors import (
    AsymmetricDistance,
    Degenerate,
    DimensionMismatch,
    Infeasible,
    InfeasibleComposition,
    IsolatedInstance,
    NonPositiveCoupling,
    StationaryCompositionError,
    Underdetermined,
    ZeroDegree,
    ZeroDiagonal,
)
from .graph import (
    ITERATIVE_TOL,
    STRUCTURAL_TOL,
    LayerGraph,
    _canonical,
)


def flat_index(u, layer, n):
    """Flat super-index of instance (vertex u, layer i)."""
    return layer * n + u


def split_flat(flat, n):
    """Inverse of flat_index: returns (vertex, layer)."""
    return flat % n, flat // n


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class EgoMarkov:
    """Per-vertex inter-layer dynamics.

    m is l x l column-stochastic: ``m[j, i]`` is the probability that a
    walker currently acting at this vertex in layer i next acts in layer j.
    Diagonal entries must be strictly positive (the composition divides by
    the stay-probability of each layer).
    """

    vertex: int
    m: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.m, dtype=np.float64)
        object.__setattr__(self, "m", m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch("ego matrix must be square")
        if m.min() < 0.0 or m.max() > 1.0 + STRUCTURAL_TOL:
            raise ValueError("ego matrix entries must lie in [0, 1]")
        if np.max(np.abs(m.sum(axis=0) - 1.0)) > STRUCTURAL_TOL:
            raise ValueError("ego matrix columns must sum to 1")
        diag = np.diag(m)
        if diag.min() <= 0.0:
            raise ZeroDiagonal(self.vertex, int(np.argmin(diag)))

    @property
    def l(self):
        return self.m.shape[0]


@dataclass(frozen=True)
class EgoBlock:
    """Egocentric adjacency of one vertex across layers.

    x is l x l with column i holding the out-weights of the vertex's layer-i
    instance: ``x[j, i]`` is the weight of the transition edge i -> j, and
    ``x[i, i]`` equals the vertex's intra-layer out-degree in layer i.
    """

    vertex: int
    x: np.ndarray

    @property
    def degrees(self):
        return np.diag(self.x).copy()

    @property
    def inter_layer(self):
        """The off-diagonal part (pure inter-layer weights, zero diagonal)."""
        w = self.x.copy()
        np.fill_diagonal(w, 0.0)
        return w

    @property
    def max_asymmetry(self):
        return float(np.max(np.abs(self.x - self.x.T), initial=0.0))


@dataclass(frozen=True)
class SuperAdjacency:
    """The composed ln x ln block matrix, layer-major flat indexing."""

    n: int
    l: int
    matrix: sparse.csc_array

    def __post_init__(self):
        mat = _canonical(self.matrix, shape=(self.n * self.l, self.n * self.l))
        object.__setattr__(self, "matrix", mat)
        if mat.data.size and mat.data.min() < 0.0:
            raise ValueError("super-adjacency weights must be non-negative")
        coo = mat.tocoo()
        off = (coo.row // self.n) != (coo.col // self.n)
        if not np.all(coo.row[off] % self.n == coo.col[off] % self.n):
            raise ValueError(
                "off-diagonal blocks must be diagonal: inter-layer edges may "
                "only join instances of the same vertex"
            )

    def flat(self, u, layer):
        return flat_index(u, layer, self.n)

    def split(self, flat):
        return split_flat(flat, self.n)

    def block(self, i, j):
        """The n x n block coupling layer i to layer j (edges i -> j)."""
        rows = np.arange(self.n) + i * self.n
        cols = np.arange(self.n) + j * self.n
        return sparse.csc_array(self.matrix[rows, :][:, cols])

    def vertex_slice(self, u):
        """Dense l x l slice of vertex u: entry (i, j) = weight (u,i)->(u,j)."""
        idx = u + self.n * np.arange(self.l)
        return self.matrix[idx, :][:, idx].toarray()

    def out_degrees(self):
        return np.asarray(self.matrix.sum(axis=1)).ravel()

    @property
    def volume(self):
        return float(self.matrix.sum())

    @property
    def inter_layer_slots(self):
        """Settable scalars left once diagonal blocks are fixed: n(l^2 - l)."""
        return self.n * self.l * (self.l - 1)

    def vertex_major_matrix(self):
        """Pure permutation view grouping each vertex's instances together."""
        size = self.n * self.l
        new = np.arange(size)
        old = (new % self.l) * self.n + new // self.l
        return sparse.csc_array(self.matrix[old, :][:, old])

    def as_graph(self):
        return LayerGraph(self.n * self.l, self.matrix, directed=True)


# tagged union of composition modes


@dataclass(frozen=True)
class MultiplexSpec:
    mode = "multiplex"


@dataclass(frozen=True)
class EgoSpec:
    egos: list
    require_undirected: bool = False
    force_symmetrize: bool = False
    mode = "ego"


@dataclass(frozen=True)
class StationarySpec:
    pis: np.ndarray  # (n, l), strictly positive rows summing to 1
    mode = "stationary"


@dataclass(frozen=True)
class DistanceSpec:
    distances: np.ndarray  # (l, l) symmetric, zero diagonal
    coupling: float
    kernel: str = "reciprocal"
    adjacent_only: bool = False
    mode = "distance"


CompositionSpec = Union[MultiplexSpec, EgoSpec, StationarySpec, DistanceSpec]


# ---------------------------------------------------------------------------
# helpers


def degree_table(layers) -> np.ndarray:
    """Per-vertex transformed out-degrees, shape (n, l)."""
    return np.column_stack([lay.graph.out_degrees() for lay in layers])


def _check_layers(layers):
    if not layers:
        raise DimensionMismatch("at least one layer is required")
    n = layers[0].n
    for k, lay in enumerate(layers):
        if lay.n != n:
            raise DimensionMismatch(
                f"layer {k} has {lay.n} vertices, expected {n}"
            )
    return n, len(layers)


def _ordered_egos(egos, n, l):
    if len(egos) != n:
        raise DimensionMismatch(f"expected one ego matrix per vertex ({n})")
    by_vertex = {}
    for ego in egos:
        if ego.l != l:
            raise DimensionMismatch(
                f"ego of vertex {ego.vertex} is {ego.l}x{ego.l}, expected {l}x{l}"
            )
        if ego.vertex in by_vertex:
            raise DimensionMismatch(f"duplicate ego for vertex {ego.vertex}")
        by_vertex[ego.vertex] = ego
    if set(by_vertex) != set(range(n)):
        raise DimensionMismatch("ego vertices must cover 0..n-1 exactly")
    return [by_vertex[u] for u in range(n)]


def _assemble(layers, blocks):
    """Fill diagonal blocks from the layers and off-diagonals from the
    per-vertex ego blocks; returns the SuperAdjacency."""
    n, l = _check_layers(layers)
    grid = [[None] * l for _ in range(l)]
    for i in range(l):
        grid[i][i] = layers[i].graph.matrix
    for i in range(l):
        for j in range(l):
            if i == j:
                continue
            # weight of (u,i)->(u,j) is entry (j,i) of vertex u's ego block
            vec = np.array([blocks[u][j, i] for u in range(n)])
            if np.any(vec != 0.0):
                grid[i][j] = sparse.diags_array(vec, format="csc")
    full = sparse.block_array(grid, format="csc")
    return SuperAdjacency(n=n, l=l, matrix=full)


# ---------------------------------------------------------------------------
# multiplex composition


def compose_multiplex(layers) -> LayerGraph:
    """Entrywise sum of the transformed layers (no inter-layer structure)."""
    n, _ = _check_layers(layers)
    total = layers[0].graph.matrix
    for lay in layers[1:]:
        total = total + lay.graph.matrix
    directed = any(lay.graph.directed for lay in layers)
    return LayerGraph(n, total, directed=directed)


# ---------------------------------------------------------------------------
# ego composition


def ego_block(u, m_u: EgoMarkov, degrees) -> EgoBlock:
    """Realize a vertex's inter-layer Markov matrix as edge weights.

    Scales column i of the ego matrix by degrees[i] / m[i, i], the unique
    choice that keeps the diagonal equal to the intra-layer out-degrees
    while the walk on the result reproduces m_u.
    """
    deg = np.asarray(degrees, dtype=np.float64)
    l = m_u.l
    if deg.shape != (l,):
        raise DimensionMismatch(f"expected {l} degrees for vertex {u}")
    stay = np.diag(m_u.m)
    if stay.min() <= 0.0:
        raise ZeroDiagonal(u, int(np.argmin(stay)))
    for i in np.flatnonzero(deg == 0.0):
        inbound = m_u.m[i, :].copy()
        inbound[i] = 0.0
        if inbound.max(initial=0.0) > 0.0:
            raise ZeroDegree(u, int(i))
    gamma = np.where(deg > 0.0, deg / stay, 0.0)
    x = m_u.m * gamma[np.newaxis, :]
    np.fill_diagonal(x, deg)
    return EgoBlock(vertex=u, x=x)


def compose_ego(layers, egos, require_undirected=False,
                force_symmetrize=False) -> SuperAdjacency:
    """Unique super-adjacency consistent with layers and ego dynamics.

    The result's random walk projects onto each layer's walk and onto each
    vertex's ego matrix (see the two verify_* checks). By default asymmetric
    ego blocks are accepted (directed regime); with require_undirected the
    inputs are screened first and rejected when any block is asymmetric,
    unless force_symmetrize averages them.
    """
    n, l = _check_layers(layers)
    ordered = _ordered_egos(egos, n, l)
    deg = degree_table(layers)
    blocks = [ego_block(u, ordered[u], deg[u]).x for u in range(n)]
    if require_undirected:
        report = check_undirected_feasibility(egos, deg)
        if not report.feasible:
            if not force_symmetrize:
                raise InfeasibleComposition(report)
            blocks = [(x + x.T) * 0.5 for x in blocks]
    return _assemble(layers, blocks)


# ---------------------------------------------------------------------------
# consistency verification


def _guarded_walk(block):
    """Column-stochastic walk of an adjacency, zero columns where degree is 0."""
    mass = np.asarray(block.sum(axis=1)).ravel()
    safe = np.where(mass > 0.0, mass, 1.0)
    return (sparse.diags_array(1.0 / safe) @ block).T


@dataclass(frozen=True)
class LayerConsistencyReport:
    """Deviation between each layer's walk and the joint walk's projection."""

    tol: float
    max_deviation_per_layer: np.ndarray
    worst: tuple  # (layer, row, col) of the largest deviation

    @property
    def passed(self):
        return bool(np.max(self.max_deviation_per_layer, initial=0.0) <= self.tol)


@dataclass(frozen=True)
class EgoConsistencyReport:
    """Deviation between given ego matrices and the joint walk's marginals."""

    tol: float
    max_deviation_per_vertex: np.ndarray
    worst_vertex: int

    @property
    def passed(self):
        return bool(np.max(self.max_deviation_per_vertex, initial=0.0) <= self.tol)


@dataclass(frozen=True)
class FeasibilityReport:
    """Symmetry diagnosis of the ego blocks an undirected composition needs.

    Undirected inputs overdetermine the blocks: each vertex faces
    l(l+1)/2 - 1 constraints on l(l-1)/2 unknowns, l - 1 more constraints
    than variables, so existence depends on the inputs.
    """

    tol: float
    asymmetry_per_vertex: np.ndarray
    constraint_count: int
    unknown_count: int
    excess_constraints: int

    @property
    def max_asymmetry(self):
        return float(np.max(self.asymmetry_per_vertex, initial=0.0))

    @property
    def feasible(self):
        return self.max_asymmetry <= self.tol


def verify_layer_consistency(s: SuperAdjacency, layers,
                             tol: float = ITERATIVE_TOL) -> LayerConsistencyReport:
    """Check that each layer's walk is the joint walk's projection onto it.

    The projection of the joint walk onto a layer is the stochastic
    normalization of that layer's diagonal principal block, which must match
    the layer's own walk.
    """
    n, l = _check_layers(layers)
    if (s.n, s.l) != (n, l):
        raise DimensionMismatch("super-adjacency shape does not match layers")
    devs = np.zeros(l)
    worst = (0, 0, 0)
    worst_dev = -1.0
    for i in range(l):
        projected = _guarded_walk(s.block(i, i))
        # vertices absent from the layer have no walk on either side; their
        # columns stay zero and compare clean, keeping this a pure diagnostic
        reference = _guarded_walk(layers[i].graph.matrix)
        diff = sparse.coo_array(projected - reference)
        if diff.nnz:
            k = int(np.argmax(np.abs(diff.data)))
            devs[i] = float(np.abs(diff.data[k]))
            if devs[i] > worst_dev:
                worst_dev = devs[i]
                worst = (i, int(diff.row[k]), int(diff.col[k]))
    return LayerConsistencyReport(tol=tol, max_deviation_per_layer=devs, worst=worst)


def verify_ego_consistency(s: SuperAdjacency, egos,
                           tol: float = ITERATIVE_TOL) -> EgoConsistencyReport:
    """Check that the joint walk's layer marginal at each vertex matches its ego.

    From the joint walk, q_i is the probability of staying in layer i from
    instance (v, i) (self-loops included); the marginal combines it with the
    normalized inter-layer slice: Q + M_slice (I - Q).
    """
    ordered = _ordered_egos(egos, s.n, s.l)
    outdeg = s.out_degrees()
    for flat in np.flatnonzero(outdeg == 0.0):
        u, i = split_flat(int(flat), s.n)
        raise IsolatedInstance(u, i)
    devs = np.zeros(s.n)
    for u in range(s.n):
        slice_u = s.vertex_slice(u)  # (i, j) = weight (u,i)->(u,j)
        inter = slice_u.copy()
        np.fill_diagonal(inter, 0.0)
        inter_out = inter.sum(axis=1)
        total_out = outdeg[u + s.n * np.arange(s.l)]
        q = (total_out - inter_out) / total_out
        safe = np.where(inter_out > 0.0, inter_out, 1.0)
        m_slice = (inter / safe[:, np.newaxis]).T  # column i = distribution from i
        marginal = np.diag(q) + m_slice * (1.0 - q)[np.newaxis, :]
        devs[u] = float(np.max(np.abs(marginal - ordered[u].m)))
    worst_vertex = int(np.argmax(devs)) if s.n else 0
    return EgoConsistencyReport(
        tol=tol, max_deviation_per_vertex=devs, worst_vertex=worst_vertex
    )


def check_undirected_feasibility(egos, degrees,
                                 tol: float = ITERATIVE_TOL) -> FeasibilityReport:
    """Measure how far each vertex's ego block is from symmetric.

    An undirected composition exists exactly when every block built from the
    inputs is symmetric; the report carries the per-vertex worst asymmetry
    and the constraint-vs-unknown counting behind the overdetermination.
    """
    deg = np.asarray(degrees, dtype=np.float64)
    n = deg.shape[0]
    if len(egos) != n:
        raise DimensionMismatch("one ego matrix per degree row expected")
    l = egos[0].l
    ordered = _ordered_egos(list(egos), n, l)
    asym = np.zeros(n)
    for u in range(n):
        asym[u] = ego_block(u, ordered[u], deg[u]).max_asymmetry
    return FeasibilityReport(
        tol=tol,
        asymmetry_per_vertex=asym,
        constraint_count=l * (l + 1) // 2 - 1,
        unknown_count=l * (l - 1) // 2,
        excess_constraints=l - 1,
    )


# ---------------------------------------------------------------------------
# stationary (partial-information) composition


def ego_block_from_stationary(u, pi_u, degrees,
                              fit_tol: float = 1e-12,
                              max_fit_iter: int = 200_000) -> EgoBlock:
    """Symmetric ego block whose walk has the given layer distribution.

    Row sums of the block must be proportional to pi_u (the stationary
    distribution of a walk on a symmetric matrix is degree-proportional).
    l = 2 is fully determined and solved in closed form with its feasibility
    interval; l >= 3 is underdetermined and resolved by the minimum-volume
    solution: the smallest total row-sum scale admitting a symmetric
    non-negative realization, which is then fitted by iterative proportional
    scaling.
    """
    pi = np.asarray(pi_u, dtype=np.float64)
    deg = np.asarray(degrees, dtype=np.float64)
    l = pi.shape[0]
    if deg.shape != (l,):
        raise DimensionMismatch("pi and degrees must have equal length")
    if pi.min() <= 0.0 or abs(pi.sum() - 1.0) > STRUCTURAL_TOL:
        raise ValueError("pi must be strictly positive and sum to 1")
    if deg.min() <= 0.0:
        raise ZeroDegree(u, int(np.argmin(deg)))

    if l == 1:
        return EgoBlock(vertex=u, x=np.array([[deg[0]]]))

    if l == 2:
        return _stationary_block_l2(u, pi, deg)

    r, s = _min_volume_residuals(u, pi, deg)
    off = _symmetric_rowsum_fit(r, fit_tol, max_fit_iter)
    x = off + np.diag(deg)
    return EgoBlock(vertex=u, x=x)


def _stationary_block_l2(u, pi, deg):
    d1, d2 = deg
    p1 = pi[0]
    endpoint = d1 / (d1 + d2)
    if p1 == 0.5:
        if d1 == d2:
            raise Underdetermined(
                f"vertex {u}: pi = 1/2 with equal degrees leaves the coupling "
                "free; supply it explicitly"
            )
        raise Degenerate(
            f"vertex {u}: pi = 1/2 with unequal degrees admits no finite coupling"
        )
    lo, hi = min(0.5, endpoint), max(0.5, endpoint)
    if not (lo <= p1 <= hi):
        raise Infeasible(
            f"vertex {u}: pi^1 = {p1} outside feasible interval [{lo}, {hi}]",
            interval=(lo, hi),
        )
    numerator = p1 * (d1 + d2) - d1
    # the numerator vanishes at the degree-proportional endpoint; snap the
    # rounding residue so decoupling is exact
    if abs(numerator) <= 8.0 * np.finfo(np.float64).eps * (d1 + d2):
        x = 0.0
    else:
        x = numerator / (1.0 - 2.0 * p1)
    if x < 0.0:
        raise Infeasible(
            f"vertex {u}: closed form gives negative coupling {x}",
            interval=(lo, hi),
        )
    return EgoBlock(vertex=u, x=np.array([[d1, x], [x, d2]]))


def _min_volume_residuals(u, pi, deg):
    """Smallest row-sum scale s with r = s pi - d >= 0 realizable symmetrically.

    Realizability of non-negative symmetric off-diagonals with row sums r
    needs 2 max(r) <= sum(r); per layer that is a linear bound on s, a lower
    bound where pi_i < 1/2 and an upper bound where pi_i > 1/2.
    """
    total_d = deg.sum()
    s_star = np.max(deg / pi)
    s_cap = np.inf
    for i in range(len(pi)):
        if pi[i] < 0.5:
            s_star = max(s_star, (total_d - 2.0 * deg[i]) / (1.0 - 2.0 * pi[i]))
        elif pi[i] > 0.5:
            s_cap = min(s_cap, (2.0 * deg[i] - total_d) / (2.0 * pi[i] - 1.0))
        elif 2.0 * deg[i] < total_d:
            raise Infeasible(
                f"vertex {u}: pi_{i} = 1/2 requires layer {i} to carry at "
                "least half the degree mass",
                interval=None,
            )
    if s_star > s_cap * (1.0 + 1e-14):
        raise Infeasible(
            f"vertex {u}: no scale satisfies all residual bounds "
            f"(need s in [{s_star}, {s_cap}])",
            interval=(s_star, s_cap),
        )
    r = s_star * pi - deg
    snap = 8.0 * np.finfo(np.float64).eps * max(s_star, deg.max())
    r[np.abs(r) <= snap] = 0.0
    if r.min() < 0.0:
        raise Infeasible(f"vertex {u}: negative residual {r.min()}", interval=None)
    return r, s_star


def _symmetric_rowsum_fit(r, tol, max_iter):
    """Symmetric zero-diagonal non-negative matrix with row sums r.

    Generic case: diagonal scaling x_ij = u_i u_j fitted on the complete
    off-diagonal support. The boundary 2 max(r) = sum(r) forces a star and
    is built directly, and instances too close to it for the scaling to
    converge fall back to an exact pairing construction.
    """
    l = r.shape[0]
    x = np.zeros((l, l))
    active = np.flatnonzero(r > 0.0)
    if active.size == 0:
        return x
    if active.size == 1:
        raise Infeasible(f"row sums {r} violate 2 max <= sum", interval=None)
    ra = r[active]
    scale = ra.sum()
    slack = scale - 2.0 * ra.max()
    if slack < -1e-9 * scale:
        raise Infeasible(f"row sums {r} violate 2 max <= sum", interval=None)
    if slack <= 1e-12 * scale:
        hub = int(np.argmax(ra))
        block = np.zeros((active.size, active.size))
        for j in range(active.size):
            if j != hub:
                block[hub, j] = block[j, hub] = ra[j]
        x[np.ix_(active, active)] = block
        return x
    if active.size == 3:
        # three unknowns, three row sums: the fit is unique in closed form
        a, b, c = ra
        block = np.zeros((3, 3))
        block[0, 1] = block[1, 0] = (a + b - c) / 2.0
        block[0, 2] = block[2, 0] = (a + c - b) / 2.0
        block[1, 2] = block[2, 1] = (b + c - a) / 2.0
        if block.min() < 0.0:
            raise Infeasible(f"row sums {r} violate 2 max <= sum", interval=None)
        x[np.ix_(active, active)] = block
        return x
    u = ra / np.sqrt(scale)
    for _ in range(max_iter):
        u = 0.5 * (u + ra / (u.sum() - u))
        if np.max(np.abs(u * (u.sum() - u) - ra)) <= tol * scale:
            block = np.outer(u, u)
            np.fill_diagonal(block, 0.0)
            x[np.ix_(active, active)] = block
            return x
    x[np.ix_(active, active)] = _pairing_fit(ra)
    return x


def _pairing_fit(ra):
    """Exact symmetric realization of row sums by greedy largest-pair edges.

    Each step joins the two largest residuals with the heaviest weight that
    keeps the remainder realizable (2 max <= sum), so every step either
    zeroes a residual or reaches the star boundary; O(l) steps total.
    """
    k = ra.size
    block = np.zeros((k, k))
    res = ra.copy()
    for _ in range(4 * k):
        order = np.argsort(res)[::-1]
        a, b = order[0], order[1]
        third = res[order[2]] if k > 2 else 0.0
        w = min(res[b], res.sum() / 2.0 - third)
        if w <= 0.0:
            break
        block[a, b] += w
        block[b, a] += w
        res[a] -= w
        res[b] -= w
    return block


def compose_stationary(layers, pis) -> SuperAdjacency:
    """Super-adjacency from per-vertex stationary layer distributions.

    Requires undirected layers. Every vertex's slice, taken as an isolated
    ego system, has the requested stationary distribution. A row of NaN in
    pis leaves that vertex uncoupled (no inter-layer edges), the natural
    choice for vertices absent from some layer.
    """
    n, l = _check_layers(layers)
    for k, lay in enumerate(layers):
        if lay.graph.directed:
            raise ValueError(f"layer {k} is directed; stationary composition "
                             "requires undirected layers")
    pis = np.asarray(pis, dtype=np.float64)
    if pis.shape != (n, l):
        raise DimensionMismatch(f"pis must have shape ({n}, {l})")
    deg = degree_table(layers)
    blocks = []
    failures = []
    for u in range(n):
        if np.any(np.isnan(pis[u])):
            blocks.append(np.diag(deg[u]))
            continue
        try:
            blocks.append(ego_block_from_stationary(u, pis[u], deg[u]).x)
        except (Infeasible, Degenerate, Underdetermined, ZeroDegree) as exc:
            failures.append((u, exc))
            blocks.append(None)
    if failures:
        raise StationaryCompositionError(failures)
    return _assemble(layers, blocks)


# ---------------------------------------------------------------------------
# distance-coupled composition


_DISTANCE_KERNELS = ("reciprocal", "uniform")


def compose_distance(layers, dist, c, kernel="reciprocal",
                     adjacent_only=False) -> SuperAdjacency:
    """Couple layers by pairwise distances with one global strength c.

    Every vertex present in both layers of a coupled pair receives the same
    inter-layer weight, c * kernel(distance): reciprocal weights decay with
    distance, uniform ignores it. adjacent_only restricts coupling to
    consecutive layers (temporal stacks).
    """
    n, l = _check_layers(layers)
    dist = np.asarray(dist, dtype=np.float64)
    if dist.shape != (l, l):
        raise DimensionMismatch(f"distance matrix must be {l}x{l}")
    if np.any(dist != dist.T):
        raise AsymmetricDistance("distance matrix must be symmetric")
    if c <= 0.0:
        raise NonPositiveCoupling(f"coupling must be positive, got {c}")
    if kernel not in _DISTANCE_KERNELS:
        raise ValueError(f"kernel must be one of {_DISTANCE_KERNELS}")
    deg = degree_table(layers)
    present = deg > 0.0  # (n, l)
    grid = [[None] * l for _ in range(l)]
    for i in range(l):
        grid[i][i] = layers[i].graph.matrix
    for i in range(l):
        for j in range(i + 1, l):
            if adjacent_only and j != i + 1:
                continue
            d_ij = dist[i, j]
            if d_ij <= 0.0:
                raise ValueError(
                    f"coupled layers ({i}, {j}) need a positive distance"
                )
            w = c / d_ij if kernel == "reciprocal" else c
            vec = np.where(present[:, i] & present[:, j], w, 0.0)
            if np.any(vec != 0.0):
                block = sparse.diags_array(vec, format="csc")
                grid[i][j] = block
                grid[j][i] = block
    full = sparse.block_array(grid, format="csc")
    return SuperAdjacency(n=n, l=l, matrix=full)


# ---------------------------------------------------------------------------
# dispatch


def compose(layers, spec: CompositionSpec):
    """Run the composition selected by a CompositionSpec."""
    if isinstance(spec, MultiplexSpec):
        return compose_multiplex(layers)
    if isinstance(spec, EgoSpec):
        return compose_ego(layers, spec.egos,
                           require_undirected=spec.require_undirected,
                           force_symmetrize=spec.force_symmetrize)
    if isinstance(spec, StationarySpec):
        return compose_stationary(layers, spec.pis)
    if isinstance(spec, DistanceSpec):
        return compose_distance(layers, spec.distances, spec.coupling,
                                kernel=spec.kernel,
                                adjacent_only=spec.adjacent_only)
    raise TypeError(f"unknown composition spec {type(spec).__name__}")
