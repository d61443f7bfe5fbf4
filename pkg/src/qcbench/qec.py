"""Surface-code decoding at desk scale.

Distance-d planar layout on a (2d-1) x (2d-1) grid, phenomenological
noise (i.i.d. data flips per round plus syndrome misreads), and the
three-stage classical decoder: union-find cluster growth, spanning
forest construction, and peeling. X-error decoding is implemented; the
Z graph is the transposed layout.

The decoding graph has one vertex per X-ancilla per round. Space edges
are data qubits (two ancilla neighbours, or one plus a virtual boundary
vertex at the top/bottom rows); time edges join consecutive rounds of
the same ancilla and model measurement misreads. The final round is
taken as perfectly measured so every defect pairs up.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import rng as _rng

DATA = "data"
X_ANCILLA = "x_ancilla"
Z_ANCILLA = "z_ancilla"

SPACE = "space"
TIME = "time"


def site_type(row: int, col: int) -> str:
    """Checkerboard typing of the (2d-1) x (2d-1) layout."""
    if (row + col) % 2 == 0:
        return DATA
    return X_ANCILLA if row % 2 == 1 else Z_ANCILLA


@dataclass(frozen=True)
class SurfaceCodeLayout:
    d: int

    def __post_init__(self):
        if self.d < 3 or self.d % 2 == 0:
            raise ValueError("distance must be an odd integer >= 3")

    @property
    def side(self) -> int:
        return 2 * self.d - 1

    def sites(self, kind: str):
        return [(r, c) for r in range(self.side) for c in range(self.side)
                if site_type(r, c) == kind]

    @property
    def n_data(self) -> int:
        return self.d ** 2 + (self.d - 1) ** 2


@dataclass(frozen=True)
class Edge:
    eid: int
    u: int              # vertex index (virtual vertices allowed)
    v: int
    kind: str           # "space" or "time"
    top_boundary: bool  # space edge on the top lattice boundary


@dataclass
class DecodingGraph:
    d: int
    rounds: int
    n_real: int               # ancilla-round vertices
    n_vertices: int           # including virtual boundary vertices
    edges: list
    adjacency: list           # vertex -> list of (eid, other)
    virtual_mask: np.ndarray  # True for virtual boundary vertices

    def space_edges(self):
        return [e for e in self.edges if e.kind == SPACE]

    def time_edges(self):
        return [e for e in self.edges if e.kind == TIME]


def build_graph(d: int, rounds: int) -> DecodingGraph:
    """X-type decoding graph for `rounds` measurement rounds.

    Ancilla rows i in [0, d-1) and columns j in [0, d) index the X
    ancillas at grid sites (2i+1, 2j). Each space edge is one data
    qubit; the top/bottom data rows attach to per-edge virtual boundary
    vertices so separate clusters never fuse through the boundary.
    """
    if d < 3 or d % 2 == 0:
        raise ValueError("distance must be an odd integer >= 3")
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    n_rows, n_cols = d - 1, d
    n_real = n_rows * n_cols * rounds

    def vid(i, j, t):
        return (t * n_rows + i) * n_cols + j

    edges = []
    virtual = []

    def new_virtual():
        virtual.append(True)
        return n_real + len(virtual) - 1

    def add_edge(u, v, kind, top=False):
        edges.append(Edge(len(edges), u, v, kind, top))

    for t in range(rounds):
        for j in range(n_cols):
            # top and bottom boundary data qubits (grid rows 0 and 2d-2)
            add_edge(vid(0, j, t), new_virtual(), SPACE, top=True)
            add_edge(vid(n_rows - 1, j, t), new_virtual(), SPACE)
        for i in range(n_rows - 1):
            for j in range(n_cols):
                # interior data qubits in even grid rows
                add_edge(vid(i, j, t), vid(i + 1, j, t), SPACE)
        for i in range(n_rows):
            for j in range(n_cols - 1):
                # data qubits in odd grid rows link ancilla columns
                add_edge(vid(i, j, t), vid(i, j + 1, t), SPACE)
    for t in range(rounds - 1):
        for i in range(n_rows):
            for j in range(n_cols):
                add_edge(vid(i, j, t), vid(i, j, t + 1), TIME)

    n_vertices = n_real + len(virtual)
    adjacency = [[] for _ in range(n_vertices)]
    for e in edges:
        adjacency[e.u].append((e.eid, e.v))
        adjacency[e.v].append((e.eid, e.u))
    mask = np.zeros(n_vertices, dtype=bool)
    mask[n_real:] = True
    return DecodingGraph(d, rounds, n_real, n_vertices, edges, adjacency, mask)


@dataclass
class SyndromeHistory:
    hot: np.ndarray          # bool per vertex (virtual always False)
    error_edges: np.ndarray  # bool per edge (the sampled truth, for scoring)


def syndrome_of(graph: DecodingGraph, edge_flags: np.ndarray) -> np.ndarray:
    """Vertex parities of an edge set; virtual vertices are unchecked."""
    hot = np.zeros(graph.n_vertices, dtype=bool)
    for e in graph.edges:
        if edge_flags[e.eid]:
            hot[e.u] ^= True
            hot[e.v] ^= True
    hot[graph.virtual_mask] = False
    return hot


def sample_errors(graph: DecodingGraph, p_data: float, p_meas: float,
                  seed: int, shot: int = 0) -> SyndromeHistory:
    """i.i.d. edge-flip noise: space edges with p_data, time with p_meas.

    Time edges encode round-to-round syndrome misreads; their absence
    after the last round is the perfect-final-measurement closure.
    """
    if not 0.0 <= p_data <= 1.0 or not 0.0 <= p_meas <= 1.0:
        raise ValueError("probabilities must be in [0, 1]")
    gen = _rng.substream(seed, _rng.fold(0x0EC1, shot))
    flags = np.zeros(len(graph.edges), dtype=bool)
    for e in graph.edges:
        p = p_data if e.kind == SPACE else p_meas
        if p > 0.0 and gen.random() < p:
            flags[e.eid] = True
    return SyndromeHistory(hot=syndrome_of(graph, flags), error_edges=flags)


class ClusterForest:
    """Union-find state for cluster growth.

    Tracks per-root hot parity, boundary contact, member vertices and
    the frontier edge list; `support` holds per-edge growth in half
    steps (0, 1, 2). `work` counts half-edge growths plus union/find
    calls, the abstract engine-cycle stand-in.
    """

    def __init__(self, graph: DecodingGraph, hot: np.ndarray):
        n = graph.n_vertices
        self.graph = graph
        self.hot_vertices = [int(v) for v in np.flatnonzero(hot)]
        self.parent = list(range(n))
        self.size = [1] * n
        self.parity = [bool(h) for h in hot]
        self.touches_boundary = [bool(b) for b in graph.virtual_mask]
        self.members = [[v] for v in range(n)]
        self.frontier = [[eid for eid, _ in graph.adjacency[v]]
                         for v in range(n)]
        self.support = np.zeros(len(graph.edges), dtype=np.int8)
        self.work = 0

    def find(self, v: int) -> int:
        self.work += 1
        root = v
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[v] != root:
            self.parent[v], v = root, self.parent[v]
        return root

    def union(self, a: int, b: int) -> int:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        self.work += 1
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.parity[ra] ^= self.parity[rb]
        self.touches_boundary[ra] |= self.touches_boundary[rb]
        self.members[ra].extend(self.members[rb])
        self.members[rb] = []
        self.frontier[ra].extend(self.frontier[rb])
        self.frontier[rb] = []
        return ra

    def is_odd(self, root: int) -> bool:
        return self.parity[root] and not self.touches_boundary[root]

    def cluster_roots(self):
        """Roots of clusters that grew (every grown cluster holds a hot
        vertex: only odd clusters grow and those start hot)."""
        return sorted({self.find(v) for v in self.hot_vertices})


def grow_clusters(graph: DecodingGraph, hot: np.ndarray) -> ClusterForest:
    """Grow half-edges around odd clusters until all are even or absorbed.

    All odd clusters advance together each sweep; fully grown edges fuse
    the clusters at their endpoints. Clusters touching a virtual boundary
    vertex count as even. Deterministic: frontier edges are processed in
    ascending edge id.
    """
    forest = ClusterForest(graph, hot)
    if not hot.any():
        return forest
    while True:
        odd = [r for r in {forest.find(v)
                           for v in np.flatnonzero(hot)}
               if forest.is_odd(r)]
        if not odd:
            break
        pending = []
        for root in sorted(odd):
            grown, rest = [], []
            for eid in sorted(set(forest.frontier[root])):
                if forest.support[eid] >= 2:
                    continue
                forest.support[eid] += 1
                forest.work += 1
                if forest.support[eid] == 2:
                    grown.append(eid)
                else:
                    rest.append(eid)
            forest.frontier[root] = rest
            pending.extend(grown)
        for eid in pending:
            e = graph.edges[eid]
            root = forest.union(e.u, e.v)
            # newly reachable edges join the fused cluster's frontier
            for v in (e.u, e.v):
                for eid2, _ in graph.adjacency[v]:
                    if forest.support[eid2] < 2:
                        forest.frontier[root].append(eid2)
    return forest


def spanning_forest(forest: ClusterForest) -> list:
    """Per-cluster spanning trees over fully grown edges.

    Each tree is a list of (eid, parent_vertex, child_vertex) in DFS
    discovery order; the root is a virtual boundary vertex when the
    cluster touches the boundary (so peeled hotness can drain into it).
    """
    graph = forest.graph
    grown = forest.support == 2
    visited = np.zeros(graph.n_vertices, dtype=bool)
    trees = []
    for root in forest.cluster_roots():
        if not forest.members[root]:
            continue
        cluster = forest.members[root]
        if len(cluster) == 1:
            continue
        start = cluster[0]
        for v in cluster:
            if graph.virtual_mask[v]:
                start = v
                break
        if visited[start]:
            continue
        tree = []
        stack = [start]
        visited[start] = True
        while stack:
            u = stack.pop()
            for eid, w in graph.adjacency[u]:
                if grown[eid] and not visited[w]:
                    visited[w] = True
                    tree.append((eid, u, w))
                    stack.append(w)
        if tree:
            trees.append(tree)
    return trees


def peel(trees: list, hot: np.ndarray) -> set:
    """Peeling decoder: reverse-traverse each tree, draining hotness.

    Popping edges in reverse discovery order guarantees the child
    endpoint is a leaf of the remaining tree: if it is hot the edge
    joins the correction and the parent's hotness toggles.
    """
    hot = hot.copy()
    correction = set()
    for tree in trees:
        for eid, parent, child in reversed(tree):
            if hot[child]:
                correction.add(eid)
                hot[child] = False
                hot[parent] ^= True
    return correction


def decode(graph: DecodingGraph, syndrome: np.ndarray):
    """Full pipeline: grow -> spanning forest -> peel.

    Returns (correction edge-id set, work units). The correction's
    syndrome equals the input hot set exactly.
    """
    if not syndrome.any():
        return set(), 0
    forest = grow_clusters(graph, syndrome)
    trees = spanning_forest(forest)
    correction = peel(trees, syndrome)
    work = forest.work + len(correction)
    return correction, work


def correction_flags(graph: DecodingGraph, correction: set) -> np.ndarray:
    flags = np.zeros(len(graph.edges), dtype=bool)
    for eid in correction:
        flags[eid] = True
    return flags


def logical_failure(graph: DecodingGraph, error_edges: np.ndarray,
                    correction: set) -> bool:
    """True if the residual error crosses between the two boundaries.

    The residual (error xor correction) has empty syndrome, so it is a
    union of cycles and boundary-to-boundary chains; its parity across
    the cut of top-boundary edges is 1 exactly for a logical chain.
    """
    parity = 0
    for e in graph.edges:
        if e.top_boundary and bool(error_edges[e.eid]) ^ (e.eid in correction):
            parity ^= 1
    return bool(parity)


@dataclass
class MonteCarloResult:
    d: int
    p: float
    shots: int
    failures: int
    p_log: float
    stderr: float
    work_units: list = field(default_factory=list)


def logical_failure_rate(d: int, p: float, shots: int, seed: int = 0,
                         rounds: int | None = None,
                         check_syndrome: bool = False) -> MonteCarloResult:
    """Monte Carlo p_Log(d, p) with p_data = p_meas = p over d rounds."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rounds = d if rounds is None else rounds
    graph = build_graph(d, rounds)
    failures = 0
    work_units = []
    for shot in range(shots):
        hist = sample_errors(graph, p, p, seed, shot=shot)
        correction, work = decode(graph, hist.hot)
        work_units.append(work)
        if check_syndrome:
            flags = correction_flags(graph, correction)
            if not np.array_equal(syndrome_of(graph, flags), hist.hot):
                raise AssertionError("correction does not reproduce syndrome")
        if logical_failure(graph, hist.error_edges, correction):
            failures += 1
    p_log = failures / shots
    stderr = math.sqrt(max(p_log * (1 - p_log), 1.0 / shots) / shots)
    return MonteCarloResult(d, p, shots, failures, p_log, stderr, work_units)


@dataclass
class TimeoutResult:
    d: int
    p: float
    w_max: float
    shots: int
    p_toe: float
    p_log: float
    inequality_holds: bool


def timeout_stats(d: int, p: float, w_max: float, shots: int,
                  seed: int = 0) -> TimeoutResult:
    """Timeout failure probability and the p_ToE/2 <= p_Log check.

    p_ToE is the fraction of shots whose decode exceeds the work budget
    W_max; the factor 2 reflects the decoder-block convention under
    which half the timed-out rounds at most convert into logical faults.
    """
    mc = logical_failure_rate(d, p, shots, seed=seed)
    over = sum(1 for w in mc.work_units if w > w_max)
    p_toe = over / shots
    return TimeoutResult(d, p, w_max, shots, p_toe, mc.p_log,
                         p_toe / 2.0 <= mc.p_log)


def sqv(n_logical: int, p_l: float) -> float:
    """Quantum volume proxy: qubits x expected error-free gate count."""
    if n_logical < 0:
        raise ValueError("n_logical must be >= 0")
    if not 0.0 < p_l <= 1.0:
        raise ValueError("p_l must be in (0, 1]")
    return float(n_logical * math.floor(1.0 / p_l))
