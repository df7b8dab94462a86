"""File formats, dataset ingestion, and run configuration.

Layered edge-list format (line oriented, ``#`` comments allowed)::

    layer phone undirected
    layer email directed
    vertex alice            # optional isolated-vertex declaration
    edge phone alice bob 2.0
    edge email alice carol 1.0

Vertex labels are shared across layers; ids follow first appearance.
Companion JSON files carry per-vertex ego matrices or stationary layer
distributions keyed by vertex label, and per-layer bias/delay vectors keyed
by layer name then vertex label. Super-adjacencies serialize to
Matrix-Market coordinate files (header comment records n, l, and the
layer-major index convention) or to a JSON block layout; both round-trip
weights bit-identically.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .compose import EgoMarkov, SuperAdjacency, split_flat
from .errors import (
    DuplicateEdge,
    MissingCategory,
    ParseError,
    UnknownLayer,
)
from .graph import LayerGraph, components
from .transform import DynamicsParams

ENV_SEED = "MULTINET_SEED"


@dataclass(frozen=True)
class RunConfig:
    """Solver and reporting knobs shared by the CLI and demos."""

    structural_tol: float = 1e-12
    iterative_tol: float = 1e-10
    eigen_tol: float = 1e-8
    max_iter: int = 100_000
    damping: float = 0.0
    conductance_one_sided: bool = False
    output_dir: str = "."
    seed: int = 42

    def __post_init__(self):
        for name in ("structural_tol", "iterative_tol", "eigen_tol"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.max_iter <= 0:
            raise ValueError("max_iter must be positive")

    def resolved_seed(self):
        """Config seed, overridden by the MULTINET_SEED environment variable."""
        env = os.environ.get(ENV_SEED)
        return int(env) if env else self.seed


@dataclass(frozen=True)
class LayeredDataset:
    """Named layers over one shared vertex-label space."""

    layer_names: list
    layers: list  # LayerGraph per name, same order
    labels: list  # id -> label
    dynamics: dict = field(default_factory=dict)  # layer name -> DynamicsParams
    composition: object = None  # optional CompositionSpec payload

    @property
    def n(self):
        return len(self.labels)

    @property
    def label_ids(self):
        return {lab: i for i, lab in enumerate(self.labels)}

    def layer(self, name):
        return self.layers[self.layer_names.index(name)]


# ---------------------------------------------------------------------------
# layered edge-list format


def read_layers(path) -> LayeredDataset:
    """Parse the layered edge-list format."""
    layer_decl = {}       # name -> directed flag
    layer_order = []
    labels = []
    ids = {}
    edges = {}
    seen = set()

    def vertex_id(label):
        if label not in ids:
            ids[label] = len(labels)
            labels.append(label)
        return ids[label]

    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            kind = tokens[0]
            if kind == "layer":
                if len(tokens) != 3 or tokens[2] not in ("directed", "undirected"):
                    raise ParseError(lineno, "expected: layer <name> directed|undirected", path)
                name = tokens[1]
                if name in layer_decl:
                    raise ParseError(lineno, f"layer {name!r} declared twice", path)
                layer_decl[name] = tokens[2] == "directed"
                layer_order.append(name)
                edges[name] = []
            elif kind == "vertex":
                if len(tokens) != 2:
                    raise ParseError(lineno, "expected: vertex <label>", path)
                vertex_id(tokens[1])
            elif kind == "edge":
                if len(tokens) != 5:
                    raise ParseError(lineno, "expected: edge <layer> <u> <v> <weight>", path)
                name = tokens[1]
                if name not in layer_decl:
                    raise UnknownLayer(f"{path}:{lineno}: edge in undeclared layer {name!r}")
                try:
                    weight = float(tokens[4])
                except ValueError:
                    raise ParseError(lineno, f"bad weight {tokens[4]!r}", path) from None
                if not np.isfinite(weight) or weight <= 0.0:
                    raise ParseError(lineno, "edge weight must be a positive finite number", path)
                u = vertex_id(tokens[2])
                v = vertex_id(tokens[3])
                key = (name, u, v) if layer_decl[name] or u <= v else (name, v, u)
                if key in seen:
                    raise DuplicateEdge(f"{path}:{lineno}: edge {tokens[2]}-{tokens[3]} "
                                        f"in layer {name!r} given twice")
                seen.add(key)
                edges[name].append((u, v, weight))
            else:
                raise ParseError(lineno, f"unknown directive {kind!r}", path)

    n = len(labels)
    layers = [
        LayerGraph.from_edges(n, edges[name], directed=layer_decl[name])
        for name in layer_order
    ]
    return LayeredDataset(layer_names=layer_order, layers=layers, labels=labels)


def write_layers(ds: LayeredDataset, path):
    """Inverse of read_layers; undirected edges are written once."""
    with open(path, "w", encoding="utf-8") as handle:
        for name, graph in zip(ds.layer_names, ds.layers):
            flag = "directed" if graph.directed else "undirected"
            handle.write(f"layer {name} {flag}\n")
        for label in ds.labels:
            handle.write(f"vertex {label}\n")
        for name, graph in zip(ds.layer_names, ds.layers):
            for u, v, w in graph.edges():
                if not graph.directed and u > v:
                    continue
                handle.write(f"edge {name} {ds.labels[u]} {ds.labels[v]} {w!r}\n")


# ---------------------------------------------------------------------------
# companion JSON payloads


def read_ego_file(path, ds: LayeredDataset) -> list:
    """Ego matrices keyed by vertex label, layer order as in the dataset."""
    with open(path, "r", encoding="utf-8") as handle:
        payload = json.load(handle)
    ids = ds.label_ids
    egos = []
    for label, matrix in payload.items():
        if label not in ids:
            raise ParseError(0, f"unknown vertex label {label!r}", path)
        egos.append(EgoMarkov(vertex=ids[label], m=np.asarray(matrix, dtype=np.float64)))
    if len(egos) != ds.n:
        missing = set(ds.labels) - set(payload)
        raise ParseError(0, f"missing ego matrices for {sorted(missing)}", path)
    return egos


def write_ego_file(egos, ds: LayeredDataset, path):
    payload = {ds.labels[e.vertex]: e.m.tolist() for e in egos}
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=1)


def read_pi_file(path, ds: LayeredDataset) -> np.ndarray:
    """Per-vertex stationary layer distributions, NaN rows where unlisted.

    Vertices absent from the file are composed without inter-layer coupling.
    """
    with open(path, "r", encoding="utf-8") as handle:
        payload = json.load(handle)
    ids = ds.label_ids
    l = len(ds.layer_names)
    pis = np.full((ds.n, l), np.nan)
    for label, vec in payload.items():
        if label not in ids:
            raise ParseError(0, f"unknown vertex label {label!r}", path)
        arr = np.asarray(vec, dtype=np.float64)
        if arr.shape != (l,):
            raise ParseError(0, f"pi of {label!r} must have length {l}", path)
        pis[ids[label]] = arr
    return pis


def write_pi_file(pis, ds: LayeredDataset, path):
    payload = {}
    for u in range(ds.n):
        row = np.asarray(pis[u], dtype=np.float64)
        if not np.any(np.isnan(row)):
            payload[ds.labels[u]] = row.tolist()
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=1)


def read_dynamics(bias_path, delay_path, ds: LayeredDataset) -> dict:
    """Per-layer DynamicsParams from bias/delay JSON files.

    Each file maps layer name -> {vertex label -> value}; missing layers or
    vertices default to 1.0 (identity). Either path may be None.
    """
    def load(path):
        if path is None:
            return {}
        with open(path, "r", encoding="utf-8") as handle:
            payload = json.load(handle)
        for name in payload:
            if name not in ds.layer_names:
                raise ParseError(0, f"unknown layer {name!r}", path)
            for label in payload[name]:
                if label not in ds.label_ids:
                    raise ParseError(0, f"unknown vertex label {label!r}", path)
        return payload

    bias_payload = load(bias_path)
    delay_payload = load(delay_path)
    ids = ds.label_ids
    dynamics = {}
    for name in ds.layer_names:
        bias = np.ones(ds.n)
        delay = np.ones(ds.n)
        for label, value in bias_payload.get(name, {}).items():
            bias[ids[label]] = float(value)
        for label, value in delay_payload.get(name, {}).items():
            delay[ids[label]] = float(value)
        dynamics[name] = DynamicsParams(bias=bias, delay=delay)
    return dynamics


# ---------------------------------------------------------------------------
# DIMACS road networks


DEFAULT_HIGHWAY_CLASSES = ("A1", "A2", "A3")


def read_dimacs_gr(gr_path, category_path,
                   highway_classes=DEFAULT_HIGHWAY_CLASSES,
                   class_weights=None,
                   layer_names=("local", "highway")) -> LayeredDataset:
    """Split a DIMACS ``.gr`` road graph into local/highway layers.

    The companion category file holds ``<u> <v> <class>`` lines; edges in
    `highway_classes` form the highway layer, everything else the local
    layer. Affinity weights come from `class_weights` (default 2.0 for
    highway classes, 1.0 otherwise), not from the travel-time column.
    Reverse duplicate arcs merge into one undirected edge; everything
    outside the largest connected component of the union graph is dropped.
    """
    categories = _read_categories(category_path)
    arcs = {}
    declared = None
    with open(gr_path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("c"):
                continue
            tokens = line.split()
            if tokens[0] == "p":
                if len(tokens) != 4 or tokens[1] != "sp":
                    raise ParseError(lineno, "expected: p sp <n> <m>", gr_path)
                declared = (int(tokens[2]), int(tokens[3]))
            elif tokens[0] == "a":
                if len(tokens) != 4:
                    raise ParseError(lineno, "expected: a <u> <v> <w>", gr_path)
                try:
                    u, v = int(tokens[1]), int(tokens[2])
                    w = float(tokens[3])
                except ValueError:
                    raise ParseError(lineno, "bad arc line", gr_path) from None
                key = (min(u, v), max(u, v))
                if key in arcs and arcs[key] != w:
                    raise ParseError(lineno, f"conflicting duplicate arc {u}-{v}", gr_path)
                arcs[key] = w
            else:
                raise ParseError(lineno, f"unknown line type {tokens[0]!r}", gr_path)
    if declared is None:
        raise ParseError(0, "missing 'p sp' header", gr_path)

    weights = dict(class_weights or {})
    highway = set(highway_classes)
    layered = {name: [] for name in layer_names}
    vertices = sorted({u for e in arcs for u in e})
    for (u, v) in sorted(arcs):
        if (u, v) not in categories:
            raise MissingCategory(f"no road class for edge {u}-{v}")
        road_class = categories[(u, v)]
        name = layer_names[1] if road_class in highway else layer_names[0]
        default = 2.0 if road_class in highway else 1.0
        layered[name].append((u, v, float(weights.get(road_class, default))))

    # restrict everything to the largest component of the union graph
    idx = {label: k for k, label in enumerate(vertices)}
    rows = [idx[u] for (u, v) in arcs] + [idx[v] for (u, v) in arcs]
    cols = [idx[v] for (u, v) in arcs] + [idx[u] for (u, v) in arcs]
    union = sparse.coo_array(
        (np.ones(len(rows)), (rows, cols)), shape=(len(vertices), len(vertices))
    )
    keep = set(components(union)[0]) if vertices else set()
    kept_vertices = [label for label in vertices if idx[label] in keep]
    final_ids = {label: k for k, label in enumerate(kept_vertices)}
    n = len(kept_vertices)
    layers = []
    for name in layer_names:
        triples = [
            (final_ids[u], final_ids[v], w)
            for (u, v, w) in layered[name]
            if u in final_ids and v in final_ids
        ]
        layers.append(LayerGraph.from_edges(n, triples, directed=False))
    return LayeredDataset(
        layer_names=list(layer_names),
        layers=layers,
        labels=[str(label) for label in kept_vertices],
    )


def _read_categories(path):
    categories = {}
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line or line.startswith("c"):
                continue
            tokens = line.split()
            if len(tokens) != 3:
                raise ParseError(lineno, "expected: <u> <v> <class>", path)
            try:
                u, v = int(tokens[0]), int(tokens[1])
            except ValueError:
                raise ParseError(lineno, "bad vertex id", path) from None
            categories[(min(u, v), max(u, v))] = tokens[2]
    return categories


# ---------------------------------------------------------------------------
# super-adjacency serialization


def write_super(s: SuperAdjacency, path, format="mm"):
    """Serialize a super-adjacency; read_super restores it bit-identically."""
    if format == "mm":
        _write_super_mm(s, path)
    elif format == "json":
        _write_super_json(s, path)
    else:
        raise ValueError(f"unknown format {format!r} (expected 'mm' or 'json')")


def read_super(path, format=None) -> SuperAdjacency:
    if format is None:
        format = "json" if str(path).endswith(".json") else "mm"
    if format == "mm":
        return _read_super_mm(path)
    if format == "json":
        return _read_super_json(path)
    raise ValueError(f"unknown format {format!r} (expected 'mm' or 'json')")


def _write_super_mm(s, path):
    coo = s.matrix.tocoo()
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("%%MatrixMarket matrix coordinate real general\n")
        handle.write(
            f"% multinet super-adjacency n={s.n} l={s.l} "
            "indexing=layer-major flat=layer*n+vertex (1-based below)\n"
        )
        handle.write(f"{s.n * s.l} {s.n * s.l} {coo.nnz}\n")
        for k in order:
            handle.write(
                f"{coo.row[k] + 1} {coo.col[k] + 1} {repr(float(coo.data[k]))}\n"
            )


def _read_super_mm(path):
    n = l = None
    rows, cols, vals = [], [], []
    size = None
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("%"):
                for token in line.lstrip("% ").split():
                    if token.startswith("n="):
                        n = int(token[2:])
                    elif token.startswith("l="):
                        l = int(token[2:])
                continue
            tokens = line.split()
            if size is None:
                if len(tokens) != 3:
                    raise ParseError(lineno, "expected size header", path)
                size = int(tokens[0])
                continue
            if len(tokens) != 3:
                raise ParseError(lineno, "expected: <i> <j> <weight>", path)
            rows.append(int(tokens[0]) - 1)
            cols.append(int(tokens[1]) - 1)
            vals.append(float(tokens[2]))
    if n is None or l is None:
        raise ParseError(0, "header comment must record n= and l=", path)
    if size != n * l:
        raise ParseError(0, f"matrix size {size} does not equal n*l = {n * l}", path)
    mat = sparse.coo_array((vals, (rows, cols)), shape=(size, size))
    return SuperAdjacency(n=n, l=l, matrix=mat)


def _write_super_json(s, path):
    diagonal = []
    for i in range(s.l):
        block = s.block(i, i).tocoo()
        order = np.lexsort((block.col, block.row))
        diagonal.append(
            [[int(block.row[k]), int(block.col[k]), float(block.data[k])]
             for k in order]
        )
    off = {}
    for i in range(s.l):
        for j in range(s.l):
            if i == j:
                continue
            block = s.block(i, j).tocoo()
            if block.nnz == 0:
                continue
            order = np.argsort(block.row)
            off[f"{i},{j}"] = [[int(block.row[k]), float(block.data[k])]
                               for k in order]
    payload = {"n": s.n, "l": s.l, "diagonal_blocks": diagonal,
               "off_diagonal_blocks": off}
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle)


def _read_super_json(path):
    with open(path, "r", encoding="utf-8") as handle:
        payload = json.load(handle)
    n, l = int(payload["n"]), int(payload["l"])
    rows, cols, vals = [], [], []
    for i, triples in enumerate(payload["diagonal_blocks"]):
        for u, v, w in triples:
            rows.append(i * n + int(u))
            cols.append(i * n + int(v))
            vals.append(float(w))
    for key, pairs in payload.get("off_diagonal_blocks", {}).items():
        i, j = (int(part) for part in key.split(","))
        for u, w in pairs:
            rows.append(i * n + int(u))
            cols.append(j * n + int(u))
            vals.append(float(w))
    mat = sparse.coo_array((vals, (rows, cols)), shape=(n * l, n * l))
    return SuperAdjacency(n=n, l=l, matrix=mat)


# ---------------------------------------------------------------------------
# DOT export


def write_dot(graph, path, side=None, labels=None, layer_names=None):
    """Graphviz export; bisection sides color the nodes when given."""
    if isinstance(graph, SuperAdjacency):
        mat = graph.matrix
        n = graph.n

        def node_name(flat):
            u, i = split_flat(flat, n)
            vertex = labels[u] if labels else str(u)
            layer = layer_names[i] if layer_names else str(i)
            return f"{vertex}@{layer}"
    else:
        mat = graph.matrix

        def node_name(flat):
            return labels[flat] if labels else str(flat)

    directed = (mat != mat.T).nnz != 0
    keyword, arrow = ("digraph", "->") if directed else ("graph", "--")
    coo = mat.tocoo()
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(f"{keyword} multinet {{\n")
        for flat in range(mat.shape[0]):
            color = ""
            if side is not None:
                color = ' [color="firebrick"]' if side[flat] else ' [color="steelblue"]'
            handle.write(f'  "{node_name(flat)}"{color};\n')
        order = np.lexsort((coo.col, coo.row))
        for k in order:
            u, v, w = int(coo.row[k]), int(coo.col[k]), float(coo.data[k])
            if not directed and u > v:
                continue
            handle.write(f'  "{node_name(u)}" {arrow} "{node_name(v)}" [label="{w:g}"];\n')
        handle.write("}\n")
