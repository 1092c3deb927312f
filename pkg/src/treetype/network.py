"""Edge networks, effective resistance, and combinatorial modulus.

Resistance is computed from the graph Laplacian with both boundary sets
contracted to single nodes; the modulus of an annulus is the reciprocal of
the effective resistance between its boundary components inside the annulus
edge set (the discrete extremal-length duality).

Solvers: direct sparse factorization up to a size threshold, then algebraic
multigrid when available, then conjugate gradients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph
from scipy.sparse.linalg import spsolve, cg

try:
    import pyamg
    _HAVE_PYAMG = True
except Exception:                 # pragma: no cover
    _HAVE_PYAMG = False

_DIRECT_LIMIT = 120_000


class NetworkError(ValueError):
    pass


@dataclass
class EdgeNetwork:
    """Graph with positive edge conductances (default 1: simple random walk)."""
    vertex_count: int
    edges: np.ndarray            # (m, 2) int64
    conductance: np.ndarray      # (m,) float64

    def __post_init__(self):
        self.edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if self.conductance is None:
            self.conductance = np.ones(len(self.edges))
        self.conductance = np.asarray(self.conductance, dtype=np.float64)
        if len(self.conductance) != len(self.edges):
            raise NetworkError("conductance length mismatch")
        if len(self.conductance) and not (np.isfinite(self.conductance).all()
                                          and (self.conductance > 0).all()):
            raise NetworkError("conductances must be strictly positive and finite")

    @classmethod
    def from_rotation_graph(cls, g, conductance=None):
        return cls(g.vertex_count, np.asarray(g.edges(), dtype=np.int64).reshape(-1, 2),
                   conductance)

    @classmethod
    def from_extended(cls, ext, conductance=None):
        return cls(ext.vertex_count, ext.edge_array(), conductance)

    @property
    def edge_count(self):
        return len(self.edges)

    def adjacency(self):
        m = sparse.coo_matrix(
            (np.ones(len(self.edges), dtype=np.int8),
             (self.edges[:, 0], self.edges[:, 1])),
            shape=(self.vertex_count, self.vertex_count))
        m = (m + m.T).tocsr()
        return m

    def laplacian(self):
        i, j = self.edges[:, 0], self.edges[:, 1]
        w = self.conductance
        n = self.vertex_count
        a = sparse.coo_matrix((w, (i, j)), shape=(n, n))
        a = a + a.T
        d = np.asarray(a.sum(axis=1)).ravel()
        return (sparse.diags(d) - a).tocsr()


@dataclass
class MassDistribution:
    """Nonnegative mass per edge of a network."""
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if len(self.values) and self.values.min() < 0:
            raise NetworkError("mass distribution must be nonnegative")

    def energy(self) -> float:
        return float(np.sum(self.values ** 2))


@dataclass
class Annulus:
    """Edge subset separating an inner from an outer vertex set."""
    edge_indices: np.ndarray
    inner: frozenset
    outer: frozenset

    def __post_init__(self):
        self.edge_indices = np.asarray(self.edge_indices, dtype=np.int64)
        self.inner = frozenset(int(v) for v in self.inner)
        self.outer = frozenset(int(v) for v in self.outer)
        if not self.inner or not self.outer:
            raise NetworkError("annulus boundaries must be nonempty")
        if self.inner & self.outer:
            raise NetworkError("annulus boundaries must be disjoint")


def _solve_grounded(L, b, rtol=1e-11):
    """Solve L x = b with L an SPD grounded Laplacian."""
    n = L.shape[0]
    if n <= _DIRECT_LIMIT:
        x = spsolve(L.tocsc(), b)
        return x
    if _HAVE_PYAMG:
        ml = pyamg.smoothed_aggregation_solver(L.tocsr(), max_coarse=500)
        x = ml.solve(b, tol=rtol, accel="cg", maxiter=400)
        if np.linalg.norm(L @ x - b) <= 1e-8 * np.linalg.norm(b):
            return x
    d = L.diagonal()
    m = sparse.diags(1.0 / d)
    x, info = cg(L, b, rtol=rtol, atol=0.0, maxiter=20000, M=m)
    if info != 0:
        x = spsolve(L.tocsc(), b)
    return x


def effective_resistance(net: EdgeNetwork, a_set, b_set) -> float:
    """Extremal length of the chain family joining the two vertex sets:
    voltage difference for unit current with both sets contracted."""
    if isinstance(a_set, (int, np.integer)):
        a_set = [int(a_set)]
    if isinstance(b_set, (int, np.integer)):
        b_set = [int(b_set)]
    a_set, b_set = set(a_set), set(b_set)
    if not a_set or not b_set:
        raise NetworkError("boundary sets must be nonempty")
    if a_set & b_set:
        raise NetworkError("boundary sets must be disjoint")
    n = net.vertex_count
    remap = np.full(n, -1, dtype=np.int64)
    others = np.ones(n, dtype=bool)
    for v in a_set | b_set:
        others[v] = False
    idx = np.cumsum(others) - 1
    remap[others] = idx[others]
    free = int(others.sum())
    ia, ib = free, free + 1
    for v in a_set:
        remap[v] = ia
    for v in b_set:
        remap[v] = ib
    e = remap[net.edges]
    keep = e[:, 0] != e[:, 1]
    e = e[keep]
    w = net.conductance[keep]
    m = free + 2
    ncomp, labels = csgraph.connected_components(
        sparse.coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(m, m)),
        directed=False)
    if labels[ia] != labels[ib]:
        raise NetworkError("graph is disconnected between the boundary sets")
    if ncomp > 1:
        # drop floating components: they make the grounded system singular
        comp = labels == labels[ia]
        emask = comp[e[:, 0]]
        e = e[emask]
        w = w[emask]
        sub = np.cumsum(comp) - 1
        ia, ib = int(sub[ia]), int(sub[ib])
        e = sub[e]
        m = int(comp.sum())
    lap = sparse.coo_matrix((w, (e[:, 0], e[:, 1])), shape=(m, m))
    lap = lap + lap.T
    deg = np.asarray(lap.sum(axis=1)).ravel()
    lap = sparse.diags(deg) - lap
    # ground b: delete its row and column
    keep_idx = np.arange(m) != ib
    lg = lap.tocsr()[keep_idx][:, keep_idx]
    rhs = np.zeros(m - 1)
    rhs[ia if ia < ib else ia - 1] = 1.0
    x = _solve_grounded(lg, rhs)
    return float(x[ia if ia < ib else ia - 1])


def modulus_of_annulus(net: EdgeNetwork, annulus: Annulus,
                       validate: bool = False) -> float:
    """Combinatorial modulus of the chains joining the annulus boundaries,
    computed inside the annulus edge set: 1 / effective resistance."""
    if validate and not annulus_separates(net, annulus):
        raise NetworkError("invalid annulus: deletion does not separate "
                           "inner from outer")
    idx = annulus.edge_indices
    sub_edges = net.edges[idx]
    touched = set(map(int, sub_edges.ravel()))
    inner = annulus.inner & touched
    outer = annulus.outer & touched
    if not inner or not outer:
        raise NetworkError("annulus edges do not touch both boundaries")
    # relabel to the touched vertex set
    verts = sorted(touched)
    pos = {v: i for i, v in enumerate(verts)}
    e = np.array([[pos[int(u)], pos[int(v)]] for u, v in sub_edges],
                 dtype=np.int64)
    sub = EdgeNetwork(len(verts), e, net.conductance[idx])
    r = effective_resistance(sub, [pos[v] for v in inner],
                             [pos[v] for v in outer])
    return 1.0 / r


def annulus_separates(net: EdgeNetwork, annulus: Annulus) -> bool:
    mask = np.ones(net.edge_count, dtype=bool)
    mask[annulus.edge_indices] = False
    e = net.edges[mask]
    m = sparse.coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])),
                          shape=(net.vertex_count, net.vertex_count))
    ncomp, labels = csgraph.connected_components(m, directed=False)
    inner_labels = {labels[v] for v in annulus.inner}
    outer_labels = {labels[v] for v in annulus.outer}
    return not (inner_labels & outer_labels)


def shell_annuli(edges: np.ndarray, dist: np.ndarray, radii) -> list:
    """Width-1 annuli: the edges between the distance-n and distance-(n+1)
    shells of a BFS distance field, for each requested radius n."""
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    du = dist[edges[:, 0]]
    dv = dist[edges[:, 1]]
    lo = np.minimum(du, dv)
    hi = np.maximum(du, dv)
    out = []
    for n in radii:
        idx = np.where((lo == n) & (hi == n + 1))[0]
        if len(idx) == 0:
            raise NetworkError(f"empty shell at radius {n}")
        ends = edges[idx]
        inner = {int(v) for v in ends.ravel() if dist[v] == n}
        outer = {int(v) for v in ends.ravel() if dist[v] == n + 1}
        out.append(Annulus(idx, inner, outer))
    return out


def bfs_distance_field(net: EdgeNetwork, sources) -> np.ndarray:
    adj = net.adjacency()
    n = net.vertex_count
    if isinstance(sources, (int, np.integer)):
        sources = [int(sources)]
    dist = np.full(n, -1, dtype=np.int64)
    frontier = np.zeros(n, dtype=bool)
    frontier[list(sources)] = True
    dist[frontier] = 0
    reached = frontier.copy()
    d = 0
    while frontier.any():
        nxt = (adj @ frontier.astype(np.int8)).astype(bool)
        nxt &= ~reached
        d += 1
        dist[nxt] = d
        reached |= nxt
        frontier = nxt
    return dist
