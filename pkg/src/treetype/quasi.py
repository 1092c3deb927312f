"""Quasi-isometries between extended graphs, with empirical verification.

The central map glues two pieces: tree vertices go to their kernel parent,
and a lattice vertex over a branch cluster goes to the lattice vertex at the
same depth straight above the parent, in the matching complementary
component.  Components and columns are matched through the kernel darts
shared by the tree boundary walk and the kernel boundary walk, so the map is
deterministic and lands in the right wedge.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csgraph

from .planar import RotationGraph, bfs_distances
from .speiser import ExtendedGraph, SpeiserError
from .trees import Kernel, TreeTruncation, induced_truncation, parent_map


class QuasiError(ValueError):
    pass


@dataclass
class GraphMap:
    source_adj: object          # scipy CSR
    target_adj: object
    mapping: np.ndarray
    source_root: int
    target_root: int
    source_rim: list
    target_rim: list
    name: str = ""
    aux: dict = field(default_factory=dict)


@dataclass
class QIWitness:
    k: float
    C: float
    epsilon: float
    sample_count: int
    violating_pair: tuple
    predicted: dict
    aux: dict = field(default_factory=dict)

    def satisfies(self, k=None, C=None):
        if k is not None and self.k > k:
            return False
        if C is not None and self.C > C:
            return False
        return True


def _adjacency_of(graph_like):
    if isinstance(graph_like, ExtendedGraph):
        return graph_like.adjacency()
    from .network import EdgeNetwork
    return EdgeNetwork.from_rotation_graph(graph_like).adjacency()


def _kernel_index(kern: Kernel):
    old = sorted(kern.vertices)
    return old, {v: i for i, v in enumerate(old)}


def build_phi1(t: TreeTruncation, kern: Kernel) -> GraphMap:
    """Tree-to-kernel retraction: every vertex goes to its parent."""
    old, index = _kernel_index(kern)
    pm = parent_map(t, kern)
    kt = induced_truncation(t, kern.vertices)
    mapping = np.array([index[pm[v]] for v in range(t.vertex_count)],
                      dtype=np.int64)
    return GraphMap(source_adj=_adjacency_of(t.graph),
                    target_adj=_adjacency_of(kt.graph),
                    mapping=mapping,
                    source_root=t.root, target_root=index[pm[t.root]],
                    source_rim=sorted(t.frontier),
                    target_rim=sorted(index[v] for v in t.frontier
                                      if v in kern.vertices),
                    name="phi1", aux={"kernel_truncation": kt})


def build_phi(t: TreeTruncation, kern: Kernel, ext_t: ExtendedGraph,
              ext_k: ExtendedGraph) -> GraphMap:
    """The glued quasi-isometry from the extended tree to the extended
    kernel: parents on the tree part, depth-preserving column collapse on
    the lattice part."""
    old, index = _kernel_index(kern)
    kt = ext_k.base
    if not isinstance(kt, TreeTruncation) or kt.vertex_count != len(old):
        raise QuasiError("ext_k must extend the induced kernel truncation")
    pm = parent_map(t, kern)
    tg = t.graph
    kg = kt.graph

    # kernel darts in the kernel walk: (tail, head) original ids -> (patch, pos)
    dart_pos = {}
    occurrence = {}
    for pi, p in enumerate(ext_k.patches):
        for pos, d in enumerate(p.arc.darts):
            u = old[kg.dart_owner[d]]
            v = old[kg.head(d)]
            dart_pos[(u, v)] = (pi, pos)
            occurrence.setdefault(u, (pi, pos))
            occurrence.setdefault(v, (pi, pos + 1))
    mapping = np.full(ext_t.vertex_count, -1, dtype=np.int64)
    for v in range(t.vertex_count):
        mapping[v] = index[pm[v]]

    def target_vertex(pi, walk_pos, row):
        p = ext_k.patches[pi]
        col = p.glued.start + walk_pos
        if row > p.grid.shape[0] - 1:
            raise QuasiError(
                f"kernel extension too shallow: need height >= {row}")
        return int(p.grid[row, col])

    for p in ext_t.patches:
        arc = p.arc
        L = len(arc.vertices)
        anchors = [None] * L        # per walk position: (patch, pos-of-parent)
        current = None
        first = None
        for i, d in enumerate(arc.darts):
            a = tg.dart_owner[d]
            b = tg.head(d)
            if a in kern.vertices and b in kern.vertices:
                pi, pos = dart_pos[(a, b)]
                if first is None:
                    first = (i, pi, pos)
                current = (pi, pos + 1)
            if current is not None:
                anchors[i + 1] = current
        if first is not None:
            i0, pi0, pos0 = first
            for i in range(0, i0 + 1):
                if anchors[i] is None:
                    anchors[i] = (pi0, pos0)
        else:
            # arc trapped inside one branch cluster (truncation artifact near
            # the rim): anchor everything at the cluster parent
            v = pm[arc.vertices[0]]
            anchors = [occurrence[v]] * L
        # fill any interior gaps by carrying the last anchor forward
        for i in range(1, L):
            if anchors[i] is None:
                anchors[i] = anchors[i - 1]
        grid = p.grid
        h1, cols = grid.shape
        lo, hi = p.glued.start, p.glued.stop
        for c in range(cols):
            if c < lo:
                walk, off = 0, lo - c
            elif c >= hi:
                walk, off = L - 1, c - (hi - 1)
            else:
                walk, off = c - lo, 0
            pi, pos = anchors[walk]
            for r in range(h1):
                u = int(grid[r, c])
                if u < t.vertex_count:
                    continue    # glued row-0 vertices: tree part
                k_u = r + off
                mapping[u] = target_vertex(pi, pos, max(k_u, 1))
    return GraphMap(source_adj=ext_t.adjacency(), target_adj=ext_k.adjacency(),
                    mapping=mapping, source_root=ext_t.root,
                    target_root=index[pm[t.root]],
                    source_rim=ext_t.boundary_vertices(),
                    target_rim=ext_k.boundary_vertices(),
                    name="phi", aux={"kernel_index": index})


def measure_tuc_constants(t: TreeTruncation, kern: Kernel) -> dict:
    """B (max valence), M (max kernel distance), A (max branch-cluster size)."""
    pm = parent_map(t, kern)
    from .planar import bfs_distances as bd
    dist = bd(t.graph, list(kern.vertices))
    clusters = {}
    for v in range(t.vertex_count):
        if v not in kern.vertices:
            clusters[pm[v]] = clusters.get(pm[v], 0) + 1
    return {
        "B": max(t.full_valence(v) for v in range(t.vertex_count)),
        "M": max(dist),
        "A": max(clusters.values()) if clusters else 0,
    }


K_GRID = (1.0, 1.25, 1.5, 2.0, 3.0)


def verify_qi(m: GraphMap, sample_radius: int, pair_cutoff: int = 200_000,
              pair_sample: int = 100_000, seed: int = 0,
              subset=None) -> QIWitness:
    """Check the two quasi-isometry inequalities on all pairs in the radius
    ball (or a seeded subsample beyond the pair cutoff) and measure the
    cover radius of the image.

    subset restricts the sampled pairs to the given source vertices (e.g.
    the tree part of an extension).
    """
    n_src = m.source_adj.shape[0]
    src_dist = _bfs(m.source_adj, [m.source_root])
    if m.source_rim:
        guard = min(int(src_dist[v]) for v in m.source_rim if src_dist[v] >= 0)
        if guard <= 2 * sample_radius:
            raise QuasiError(
                f"sample ball exceeds the truncation-exact region: rim at "
                f"distance {guard}, need > {2 * sample_radius}")
    sample = np.where((src_dist >= 0) & (src_dist <= sample_radius))[0]
    if subset is not None:
        chosen = np.zeros(n_src, dtype=bool)
        chosen[list(subset)] = True
        sample = sample[chosen[sample]]
    if len(sample) < 2:
        raise QuasiError("sample ball too small")
    total_pairs = len(sample) * (len(sample) - 1) // 2
    if total_pairs > pair_cutoff:
        rng = np.random.default_rng(seed)
        target_n = max(3, int(np.sqrt(2 * pair_sample)) + 1)
        sample = rng.choice(sample, size=target_n, replace=False)
        sample.sort()
        total_pairs = len(sample) * (len(sample) - 1) // 2
    # restrict the source to the ball that contains all geodesics between
    # sampled vertices
    src_ball = np.where((src_dist >= 0) & (src_dist <= 2 * sample_radius + 1))[0]
    d1 = _pairwise(m.source_adj, src_ball, sample)
    images = m.mapping[sample]
    tgt_dist = _bfs(m.target_adj, [m.target_root])
    img_radius = int(max(tgt_dist[v] for v in images))
    if m.target_rim:
        guard = min(int(tgt_dist[v]) for v in m.target_rim if tgt_dist[v] >= 0)
        if guard <= 2 * img_radius:
            raise QuasiError(
                f"target truncation too shallow: rim at distance {guard}, "
                f"images reach {img_radius}")
    tgt_ball = np.where((tgt_dist >= 0) & (tgt_dist <= 2 * img_radius + 1))[0]
    d2 = _pairwise(m.target_adj, tgt_ball, images)
    up = d2 - d1
    lowgrid = {}
    iu = np.unravel_index(np.argmax(np.abs(d2 - d1)), d1.shape)
    violating = (int(sample[iu[0]]), int(sample[iu[1]]))
    results = []
    for k in K_GRID:
        c_up = float(np.max(d2 - k * d1))
        c_low = float(np.max(d1 / k - d2))
        results.append((k, max(c_up, c_low, 0.0)))
        lowgrid[k] = max(c_up, c_low, 0.0)
    k_best, c_best = results[0]
    # cover radius over the target sample ball
    cover_ball = np.where((tgt_dist >= 0) & (tgt_dist <= img_radius))[0]
    dist_to_image = _bfs(m.target_adj, sorted(set(int(v) for v in images)))
    eps = float(dist_to_image[cover_ball].max())
    return QIWitness(k=k_best, C=c_best, epsilon=eps,
                     sample_count=total_pairs, violating_pair=violating,
                     predicted={},
                     aux={"k_grid": lowgrid,
                          "upper_slack": float(np.max(d2 - d1)),
                          "sample_size": len(sample)})


def _bfs(adj, sources):
    n = adj.shape[0]
    dist = np.full(n, -1, dtype=np.int64)
    frontier = np.zeros(n, dtype=bool)
    frontier[list(sources)] = True
    dist[frontier] = 0
    reached = frontier.copy()
    d = 0
    while frontier.any():
        nxt = (adj @ frontier.astype(np.int8)).astype(bool) & ~reached
        d += 1
        dist[nxt] = d
        reached |= nxt
        frontier = nxt
    return dist


def _pairwise(adj, ball, sample):
    """Distance matrix among sample vertices, computed in the induced ball."""
    ball = np.asarray(ball)
    pos = -np.ones(adj.shape[0], dtype=np.int64)
    pos[ball] = np.arange(len(ball))
    if (pos[sample] < 0).any():
        raise QuasiError("sample leaves the restriction ball")
    sub = adj[ball][:, ball]
    d = csgraph.dijkstra(sub, directed=False, unweighted=True,
                         indices=pos[sample])
    out = d[:, pos[sample]]
    if not np.isfinite(out).all():
        raise QuasiError("sampled vertices disconnected inside the ball")
    return out


def compose(m1: GraphMap, m2: GraphMap) -> GraphMap:
    if m1.target_adj.shape != m2.source_adj.shape:
        raise QuasiError("maps are not composable")
    return GraphMap(source_adj=m1.source_adj, target_adj=m2.target_adj,
                    mapping=m2.mapping[m1.mapping],
                    source_root=m1.source_root, target_root=m2.target_root,
                    source_rim=m1.source_rim, target_rim=m2.target_rim,
                    name=f"{m2.name} o {m1.name}")


def identity_map(graph_like, root, rim=None) -> GraphMap:
    adj = _adjacency_of(graph_like)
    n = adj.shape[0]
    return GraphMap(source_adj=adj, target_adj=adj,
                    mapping=np.arange(n, dtype=np.int64),
                    source_root=root, target_root=root,
                    source_rim=rim or [], target_rim=rim or [],
                    name="identity")


def dual_to_extension_map(dual: RotationGraph, ext: ExtendedGraph,
                          ext_graph: RotationGraph = None,
                          faces=None) -> GraphMap:
    """Each dual vertex (a face of the extension) goes to the minimal-id
    vertex on its face boundary."""
    from .planar import trace_faces
    if ext_graph is None:
        ext_graph = ext.to_rotation_graph()
    if faces is None:
        faces = trace_faces(ext_graph)
    if dual.vertex_count != faces.face_count:
        raise QuasiError("dual does not match the extension's face set")
    mapping = np.array([min(ext_graph.dart_owner[d] for d in cyc)
                        for cyc in faces.faces], dtype=np.int64)
    root_face = faces.dart_face[ext_graph.vertex_darts(ext.root)[0]]
    from .network import EdgeNetwork
    dual_adj = EdgeNetwork.from_rotation_graph(dual).adjacency()
    ext_adj = ext.adjacency()
    rim = set(ext.boundary_vertices())
    dual_rim = [f for f, cyc in enumerate(faces.faces)
                if any(ext_graph.dart_owner[d] in rim for d in cyc)]
    return GraphMap(source_adj=dual_adj, target_adj=ext_adj, mapping=mapping,
                    source_root=int(root_face), target_root=ext.root,
                    source_rim=dual_rim, target_rim=ext.boundary_vertices(),
                    name="dual-to-extension")


def standard_model_map(ext_k: ExtendedGraph, sigma_s: ExtendedGraph) -> GraphMap:
    """Collapse the kernel's finite hub onto the standard model's center and
    carry the wedge lattices across column by column."""
    kt = ext_k.base
    st = sigma_s.base
    kg, sg = kt.graph, st.graph
    n_ends_k = len([p for p in ext_k.patches])
    n_ends_s = len(sigma_s.patches)
    if n_ends_k != n_ends_s:
        raise QuasiError(
            f"end-count mismatch: kernel has {n_ends_k} components, "
            f"standard model has {n_ends_s}")
    center = st.root
    # hub of the kernel: vertices on paths between branch vertices
    branch = [v for v in range(kt.vertex_count) if kg.degree(v) >= 3]
    if branch:
        hub = set()
        d0 = bfs_distances(kg, branch[0])
        for b in branch:
            v = b
            while v != branch[0]:
                hub.add(v)
                v = min(w for w in kg.neighbors(v) if d0[w] == d0[v] - 1)
        hub.add(branch[0])
    else:
        hub = {kt.root}
    # ray structure: distance to the hub orders each ray
    hub_dist = bfs_distances(kg, sorted(hub))
    mapping = np.full(ext_k.vertex_count, -1, dtype=np.int64)
    # match wedges by patch order (both walks enumerate wedges in the same
    # rotation sense around their tree)
    for pi, (pk, ps) in enumerate(zip(ext_k.patches, sigma_s.patches)):
        walk_k = pk.arc.vertices
        walk_s = ps.arc.vertices
        # project each kernel walk position to a model walk position:
        # positions inside the hub collapse to the center's position
        center_pos = walk_s.index(center)
        proj = np.empty(len(walk_k), dtype=np.int64)
        before_hub = True
        for i, w in enumerate(walk_k):
            if w in hub:
                proj[i] = center_pos
                before_hub = False
            else:
                t_dist = int(hub_dist[w])
                if before_hub:
                    proj[i] = max(center_pos - t_dist, 0)
                else:
                    proj[i] = min(center_pos + t_dist, len(walk_s) - 1)
            mapping[w] = (center if w in hub
                          else walk_s[proj[i]])
        lo_k, hi_k = pk.glued.start, pk.glued.stop
        lo_s = ps.glued.start
        h1, cols = pk.grid.shape
        for c in range(cols):
            if c < lo_k:
                walk, off = 0, lo_k - c
            elif c >= hi_k:
                walk, off = len(walk_k) - 1, c - (hi_k - 1)
            else:
                walk, off = c - lo_k, 0
            col_s = lo_s + int(proj[walk])
            for r in range(h1):
                u = int(pk.grid[r, c])
                if u < kt.vertex_count:
                    continue
                row = min(r + off, sigma_s.patches[pi].grid.shape[0] - 1)
                mapping[u] = int(ps.grid[max(row, 1), col_s])
    return GraphMap(source_adj=ext_k.adjacency(), target_adj=sigma_s.adjacency(),
                    mapping=mapping, source_root=kt.root, target_root=center,
                    source_rim=ext_k.boundary_vertices(),
                    target_rim=sigma_s.boundary_vertices(),
                    name="standard-model-map",
                    aux={"hub": sorted(hub)})


def _star_ray(st: TreeTruncation, v: int) -> int:
    while st.parent[v] != st.root and st.parent[v] != -1:
        v = st.parent[v]
    return v
