"""Undirected simple graphs with compressed adjacency, random generators,
and shortest-path shell decompositions around a control set.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import EdgeListFormatError, GraphConnectivityError

UNREACHABLE = -1

_CONNECT_RETRIES = 100


def _normalize_seed(seed):
    return int(seed) & 0xFFFFFFFFFFFFFFFF


class Graph:
    """Immutable undirected simple graph over nodes 0..n-1.

    Adjacency is CSR-style: the neighbors of node i are
    ``indices[indptr[i]:indptr[i+1]]``, sorted ascending, and every edge
    appears in both rows. No self-loops, no parallel edges.
    """

    __slots__ = ("n", "indptr", "indices")

    def __init__(self, n, indptr, indices):
        self.n = int(n)
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.indices = np.ascontiguousarray(indices, dtype=np.int32)
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)

    @classmethod
    def from_edge_array(cls, n, edges):
        """Build from an (M, 2) array of distinct undirected edges.

        Rejects self-loops and duplicates rather than silently fixing them;
        use load_edge_list for dirty input.
        """
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if edges.size:
            if edges.min() < 0 or edges.max() >= n:
                raise ValueError("edge endpoint out of range")
            if np.any(edges[:, 0] == edges[:, 1]):
                raise ValueError("self-loop in edge array")
        lo = np.minimum(edges[:, 0], edges[:, 1])
        hi = np.maximum(edges[:, 0], edges[:, 1])
        key = lo * n + hi
        if np.unique(key).size != key.size:
            raise ValueError("duplicate edge in edge array")
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        return cls(n, indptr, dst.astype(np.int32))

    @property
    def num_edges(self):
        return self.indices.shape[0] // 2

    @property
    def k_avg(self):
        return self.indices.shape[0] / self.n

    def degrees(self):
        return np.diff(self.indptr)

    def neighbors(self, i):
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def edge_array(self):
        """All edges once, as an (M, 2) array with i < j, sorted."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.indptr))
        dst = self.indices.astype(np.int64)
        keep = src < dst
        return np.column_stack([src[keep], dst[keep]])

    def __eq__(self, other):
        return (isinstance(other, Graph) and self.n == other.n
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.num_edges}, k_avg={self.k_avg:.3f})"


def _sample_distinct_pairs(rng, n, m):
    """Exactly m distinct unordered pairs, uniform without replacement."""
    chosen = set()
    out = np.empty((m, 2), dtype=np.int64)
    count = 0
    while count < m:
        batch = max(16, int((m - count) * 1.2))
        a = rng.integers(0, n, size=batch)
        b = rng.integers(0, n, size=batch)
        for x, y in zip(a.tolist(), b.tolist()):
            if x == y:
                continue
            if x > y:
                x, y = y, x
            key = x * n + y
            if key in chosen:
                continue
            chosen.add(key)
            out[count, 0] = x
            out[count, 1] = y
            count += 1
            if count == m:
                break
    return out


def generate_er(n, k_target, seed):
    """Connected Erdos-Renyi graph with a fixed edge count.

    Draws exactly round(n*k_target/2) edges uniformly among distinct pairs,
    so the mean degree is exact up to rounding of the edge count. Resamples
    with a derived sub-seed (up to 100 times) until the graph is connected.

    Parameters
    ----------
    n : int
        Node count, >= 3.
    k_target : float
        Desired mean degree, 0 < k_target < n-1.
    seed : int
        64-bit seed; the same seed always yields the same graph.
    """
    if n < 3:
        raise ValueError("n must be >= 3")
    if not 0 < k_target < n - 1:
        raise ValueError("k_target must satisfy 0 < k_target < n-1")
    m = int(round(n * k_target / 2.0))
    if m > n * (n - 1) // 2:
        raise ValueError("edge count exceeds simple-graph capacity")
    base = _normalize_seed(seed)
    for attempt in range(_CONNECT_RETRIES):
        rng = np.random.default_rng((base, attempt))
        g = Graph.from_edge_array(n, _sample_distinct_pairs(rng, n, m))
        if is_connected(g):
            return g
    raise GraphConnectivityError(
        f"no connected graph in {_CONNECT_RETRIES} attempts "
        f"(n={n}, k_target={k_target}); k_target is likely too small")


def generate_ba(n, m, seed):
    """Preferential-attachment graph: complete seed graph on m+1 nodes, then
    each new node attaches m distinct edges with probability proportional to
    current degree. Connected by construction; mean degree ~= 2m.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if n <= m:
        raise ValueError("n must exceed m")
    rng = np.random.default_rng(_normalize_seed(seed))
    edges = [(i, j) for i in range(m + 1) for j in range(i + 1, m + 1)]
    # one slot per unit of degree; uniform draws on it realize degree-
    # proportional selection
    repeated = [i for i in range(m + 1) for _ in range(m)]
    for t in range(m + 1, n):
        chosen = set()
        while len(chosen) < m:
            for pos in rng.integers(0, len(repeated), size=m + 4).tolist():
                c = repeated[pos]
                if c not in chosen:
                    chosen.add(c)
                    if len(chosen) == m:
                        break
        for c in sorted(chosen):
            edges.append((c, t))
            repeated.append(c)
        repeated.extend([t] * m)
    return Graph.from_edge_array(n, np.array(edges, dtype=np.int64))


@dataclass
class EdgeListReport:
    """What load_edge_list kept and dropped."""
    lines_total: int = 0
    edges_kept: int = 0
    dropped_self_loops: int = 0
    dropped_duplicates: int = 0

    @property
    def dropped(self):
        return self.dropped_self_loops + self.dropped_duplicates


def load_edge_list(path):
    """Read a whitespace-separated "i j" edge list (0-based, '#' comments).

    Self-loops and duplicate edges are dropped and counted. Returns
    (Graph, EdgeListReport).
    """
    report = EdgeListReport()
    seen = set()
    edges = []
    max_id = -1
    try:
        with open(path) as fh:
            raw_lines = fh.readlines()
    except OSError as exc:
        raise EdgeListFormatError(f"cannot read {path}: {exc}") from exc
    for lineno, raw in enumerate(raw_lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        report.lines_total += 1
        tokens = line.split()
        if len(tokens) != 2:
            raise EdgeListFormatError(
                f"{path}:{lineno}: expected two node ids, got {len(tokens)} tokens")
        try:
            i, j = int(tokens[0]), int(tokens[1])
        except ValueError as exc:
            raise EdgeListFormatError(
                f"{path}:{lineno}: non-integer token in {line!r}") from exc
        if i < 0 or j < 0:
            raise EdgeListFormatError(f"{path}:{lineno}: negative node id")
        if i == j:
            report.dropped_self_loops += 1
            continue
        if i > j:
            i, j = j, i
        if (i, j) in seen:
            report.dropped_duplicates += 1
            continue
        seen.add((i, j))
        edges.append((i, j))
        max_id = max(max_id, j)
    if not edges:
        raise EdgeListFormatError(f"{path}: no edges (empty graph)")
    report.edges_kept = len(edges)
    g = Graph.from_edge_array(max_id + 1, np.array(edges, dtype=np.int64))
    return g, report


def save_edge_list(g, path):
    """Write each undirected edge once as "i j" with i < j.

    Note: trailing isolated nodes are not representable in this format; the
    loader infers the node count from the largest id.
    """
    with open(path, "w") as fh:
        for i, j in g.edge_array():
            fh.write(f"{i} {j}\n")


@dataclass
class ShellDecomposition:
    """Per-node shortest-path distance to a control set.

    layer_of[i] is the distance of node i to the nearest source
    (UNREACHABLE if disconnected); layer_members[l] lists the nodes at
    distance l, for l = 0..num_layers.
    """
    source_set: np.ndarray
    layer_of: np.ndarray
    num_layers: int
    layer_members: list = field(repr=False)

    def member_count(self, l):
        return len(self.layer_members[l])


def _gather_neighbors(g, nodes):
    counts = g.indptr[nodes + 1] - g.indptr[nodes]
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=g.indices.dtype)
    starts = np.repeat(g.indptr[nodes], counts)
    offsets = np.arange(total, dtype=np.int64) - np.repeat(
        np.cumsum(counts) - counts, counts)
    return g.indices[starts + offsets]


def bfs_shells(g, sources):
    """Multi-source breadth-first layering: layer l holds the nodes at
    shortest-path distance l from the nearest source."""
    src = np.unique(np.asarray(sorted(sources), dtype=np.int64))
    if src.size == 0:
        raise ValueError("sources must be nonempty")
    if src[0] < 0 or src[-1] >= g.n:
        raise ValueError(f"source id out of range 0..{g.n - 1}")
    layer_of = np.full(g.n, UNREACHABLE, dtype=np.int32)
    layer_of[src] = 0
    members = [src]
    frontier = src
    l = 0
    while frontier.size:
        nbrs = np.unique(_gather_neighbors(g, frontier).astype(np.int64))
        new = nbrs[layer_of[nbrs] == UNREACHABLE]
        if new.size == 0:
            break
        l += 1
        layer_of[new] = l
        members.append(new)
        frontier = new
    return ShellDecomposition(src, layer_of, l, members)


def is_connected(g):
    """True iff a BFS from node 0 reaches every node."""
    shells = bfs_shells(g, [0])
    return sum(len(m) for m in shells.layer_members) == g.n


@dataclass
class DegreeStats:
    min: int
    max: int
    mean: float
    variance: float
    histogram: np.ndarray

    def to_dict(self):
        return {"min": int(self.min), "max": int(self.max),
                "mean": float(self.mean), "variance": float(self.variance),
                "histogram": self.histogram.tolist()}


def degree_stats(g):
    deg = g.degrees()
    return DegreeStats(
        min=int(deg.min()),
        max=int(deg.max()),
        mean=float(deg.mean()),
        variance=float(deg.var()),
        histogram=np.bincount(deg),
    )


@dataclass(frozen=True)
class NetworkRecipe:
    """How to materialize a graph for one simulation run.

    kind "er" and "ba" generate a fresh graph per seed; "fixed" always
    returns the held graph (used for edge-list inputs).
    """
    kind: str
    n: int = 0
    k: float = 0.0
    m: int = 0
    graph: Graph = None

    def build(self, seed):
        if self.kind == "er":
            return generate_er(self.n, self.k, seed)
        if self.kind == "ba":
            return generate_ba(self.n, self.m, seed)
        if self.kind == "fixed":
            return self.graph
        raise ValueError(f"unknown network kind {self.kind!r}")

    @property
    def nominal_k(self):
        """Mean degree the layer analytics should assume."""
        if self.kind == "er":
            return float(self.k)
        if self.kind == "ba":
            return 2.0 * self.m
        return self.graph.k_avg

    @property
    def nominal_n(self):
        return self.graph.n if self.kind == "fixed" else self.n
