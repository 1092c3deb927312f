"""Speiser graphs (line complexes) from plane trees, and their extensions.

A bipartite plane tree with singular values (-1, +1, infinity) induces a
triangulation of the sphere: every side of every tree edge becomes a triangle
with apex at infinity.  The dual of that triangulation is the Speiser graph:
one 3-valent vertex per tree dart, one edge across each tree edge (a "rung")
and one edge across each corner curve.  Faces of the Speiser graph correspond
to tree vertices (2 deg(v) darts, labeled by the vertex color) and to the
complementary components of the tree (labeled infinity).

Extended graphs glue half-plane lattices into unbounded faces and half
cylinders into large bounded faces.  On a truncation an unbounded face is a
finite boundary arc; the lattice continues past both arc ends by a margin so
that neighborhoods of the core are truncation-independent.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .planar import (FaceSet, GraphError, RotationGraph, bfs_distances,
                     trace_faces, twin)
from .trees import TreeTruncation

LABEL_MINUS = "-1"
LABEL_PLUS = "+1"
LABEL_INF = "inf"


class SpeiserError(ValueError):
    pass


@dataclass
class SpeiserGraph:
    """Line complex: 3-valent bipartite rotation graph with labeled faces."""
    graph: RotationGraph
    q: int
    faces: FaceSet
    face_label: list             # per face: "-1" | "+1" | "inf"
    face_tree_vertex: list       # per face: tree vertex id or -1
    corner_apex: list            # per Speiser edge: corner apex tree vertex, -1 for rungs
    tree: TreeTruncation = None

    @property
    def vertex_count(self):
        return self.graph.vertex_count

    def vertex_class(self, v) -> str:
        return self.graph.vertex_flags(v).get("color", "circle")

    def face_of_tree_vertex(self, tv: int) -> int:
        for f, v in enumerate(self.face_tree_vertex):
            if v == tv:
                return f
        raise KeyError(tv)

    def bounded_faces(self):
        return [f for f, lab in enumerate(self.face_label) if lab != LABEL_INF]

    def unbounded_faces(self):
        return [f for f, lab in enumerate(self.face_label) if lab == LABEL_INF]


def triangulate_and_dualize(t: TreeTruncation) -> SpeiserGraph:
    """Speiser graph of a bipartite plane tree (q = 3 singular values).

    Speiser vertex i is the triangle on one side of tree dart i.  The rung of
    tree edge e joins vertices 2e and 2e+1; the corner edge of tree dart d
    joins the triangle of d to the triangle of the next edge-side around
    head(d).  Rotations run (rung, previous corner, next corner) at every
    vertex, which reproduces the faces of the dual triangulation.
    """
    g = t.graph
    if g.edge_count == 0:
        raise SpeiserError("tree has no edges")
    nd = g.dart_count
    ne = g.edge_count
    fnext = [g.rot_next[twin(d)] for d in range(nd)]
    fprev = [0] * nd
    for d in range(nd):
        fprev[fnext[d]] = d

    rotations = []
    for v in range(nd):
        e = v // 2
        rung = 2 * e + (v & 1)
        prev_c = 2 * (ne + fprev[v]) + 1
        next_c = 2 * (ne + v)
        rotations.append((rung, prev_c, next_c))

    flags = {}
    for v in range(nd):
        tail = g.dart_owner[v]
        head = g.head(v)
        fl = {"color": "circle" if t.color[tail] == 0 else "cross"}
        if tail in t.frontier or head in t.frontier:
            fl["frontier"] = "1"
        flags[v] = fl
    sp = RotationGraph.from_vertex_rotations(rotations, flags=flags,
                                             name=f"speiser({g.name})")
    faces = trace_faces(sp)
    corner_apex = [-1] * (ne + nd)
    for d in range(nd):
        corner_apex[ne + d] = g.head(d)

    face_label = []
    face_tree_vertex = []
    for cycle in faces.faces:
        apexes = {corner_apex[d // 2] for d in cycle if d // 2 >= ne}
        if len(apexes) == 1:
            tv = next(iter(apexes))
            face_label.append(LABEL_MINUS if t.color[tv] == 0 else LABEL_PLUS)
            face_tree_vertex.append(tv)
        else:
            face_label.append(LABEL_INF)
            face_tree_vertex.append(-1)
    return SpeiserGraph(graph=sp, q=3, faces=faces, face_label=face_label,
                        face_tree_vertex=face_tree_vertex,
                        corner_apex=corner_apex, tree=t)


# --------------------------------------------------------------------------
# boundary arcs
# --------------------------------------------------------------------------

@dataclass
class BoundaryArc:
    """Maximal run of a face boundary between frontier cuts.

    For an open arc, vertices has len(darts) + 1 entries; a cyclic arc (no
    cut anywhere on the face) has len(darts) entries.
    """
    darts: list
    vertices: list
    cyclic: bool
    face: int


def _split_face_cycle(g: RotationGraph, cycle, drop_dart=None, cut_after=None):
    """Arcs of a face cycle: remove darts matching drop_dart, cut between d
    and its successor when cut_after(d).  Returns [(darts, cyclic)];
    empty runs between adjacent cuts are discarded."""
    n = len(cycle)
    marks = []
    for i, d in enumerate(cycle):
        if drop_dart is not None and drop_dart(d):
            marks.append((i, True))
        elif cut_after is not None and cut_after(d):
            marks.append((i, False))
    if not marks:
        return [(list(cycle), True)]
    arcs = []
    for m, (i, dropped) in enumerate(marks):
        start = (i + 1) % n
        j, dropped_next = marks[(m + 1) % len(marks)]
        count = (j - start) % n + (0 if dropped_next else 1)
        run = [cycle[(start + k) % n] for k in range(count)]
        if run:
            arcs.append((run, False))
    return arcs


def unbounded_arcs(sp: SpeiserGraph) -> list:
    """Boundary arcs of infinity-labeled faces, cut at frontier corners."""
    g = sp.graph
    t = sp.tree
    out = []

    def frontier_corner(d):
        apex = sp.corner_apex[d // 2]
        return apex >= 0 and apex in t.frontier

    for f in sp.unbounded_faces():
        cycle = list(sp.faces.faces[f])
        for run, cyclic in _split_face_cycle(g, cycle, drop_dart=frontier_corner):
            verts = [g.dart_owner[d] for d in run]
            if not cyclic:
                verts.append(g.head(run[-1]))
            out.append(BoundaryArc(darts=run, vertices=verts, cyclic=cyclic,
                                   face=f))
    return out


def tree_boundary_arcs(t: TreeTruncation) -> list:
    """Boundary arcs of the tree itself, cut at frontier turnarounds.

    These are the gluing walks for the dual-picture extension: a half-plane
    lattice per complementary-component arc, attached along the tree.
    """
    g = t.graph
    faces = trace_faces(g)
    out = []
    for fi, cycle in enumerate(faces.faces):
        arcs = _split_face_cycle(g, list(cycle),
                                 cut_after=lambda d: g.head(d) in t.frontier)
        for run, cyclic in arcs:
            verts = [g.dart_owner[d] for d in run]
            if not cyclic:
                verts.append(g.head(run[-1]))
            out.append(BoundaryArc(darts=run, vertices=verts, cyclic=cyclic,
                                   face=fi))
    return out


# --------------------------------------------------------------------------
# extended graphs
# --------------------------------------------------------------------------

@dataclass
class Patch:
    kind: str                 # "half-plane" | "half-cylinder"
    grid: np.ndarray          # (h+1, cols) vertex ids; row 0 may alias base
    glued: slice              # glued column range (half-plane); full for cylinders
    face: int
    arc: BoundaryArc


@dataclass
class ExtendedGraph:
    """Base graph plus lattice patches glued along face boundary walks.

    Row 0 of each patch grid aliases the base vertices along the walk
    (boundary vertices and edges are identified); deeper rows are fresh
    vertices.  Analysis runs on the assembled edge array; a full rotation
    system is materialized on demand for export and duals.
    """
    base: object              # SpeiserGraph or TreeTruncation
    base_graph: RotationGraph
    patches: list
    vertex_count: int
    height: int
    root: int
    cut_vertices: list
    name: str = ""

    def __post_init__(self):
        self._edges = None
        self._adj = None

    def is_lattice_vertex(self, v) -> bool:
        return v >= self.base_graph.vertex_count

    def edge_array(self) -> np.ndarray:
        if self._edges is not None:
            return self._edges
        parts = [np.asarray(self.base_graph.edges(), dtype=np.int64).reshape(-1, 2)]
        for p in self.patches:
            grid = p.grid
            h1, cols = grid.shape
            if p.kind == "half-cylinder":
                for r in range(1, h1):
                    a = grid[r]
                    parts.append(np.stack([a, np.roll(a, -1)], axis=1))
            else:
                lo, hi = p.glued.start, p.glued.stop
                for r in range(h1):
                    a = grid[r]
                    pairs = np.stack([a[:-1], a[1:]], axis=1)
                    if r == 0:
                        keep = np.ones(cols - 1, dtype=bool)
                        keep[lo:hi - 1] = False   # walk edges already in base
                        pairs = pairs[keep]
                    parts.append(pairs)
            parts.append(np.stack([grid[:-1].ravel(), grid[1:].ravel()], axis=1))
        self._edges = np.concatenate([x for x in parts if len(x)], axis=0)
        return self._edges

    def adjacency(self):
        if self._adj is None:
            from scipy import sparse
            e = self.edge_array()
            n = self.vertex_count
            data = np.ones(len(e), dtype=np.int8)
            m = sparse.coo_matrix((data, (e[:, 0], e[:, 1])), shape=(n, n))
            m = (m + m.T).tocsr()
            m.data[:] = 1
            self._adj = m
        return self._adj

    def boundary_vertices(self) -> list:
        out = set(self.cut_vertices)
        for p in self.patches:
            out.update(int(x) for x in p.grid[-1])
            if p.kind == "half-plane":
                out.update(int(x) for x in p.grid[:, 0])
                out.update(int(x) for x in p.grid[:, -1])
        return sorted(out)

    def distances_from(self, sources) -> np.ndarray:
        adj = self.adjacency()
        n = self.vertex_count
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

    # -- full rotation system ------------------------------------------------

    def to_rotation_graph(self, max_darts: int = 2_000_000) -> RotationGraph:
        """Materialize the full planar rotation system.

        New darts are allocated per lattice-edge instance: verticals between
        rows r and r+1 of a column, ring/row edges east of a column.  Each
        glued column's row-1 vertical splices into the face corner at its
        walk position; arc-end corners also receive the margin row edge.
        """
        base = self.base_graph
        total_new = int(self.edge_array().shape[0]) - base.edge_count
        if base.dart_count + 2 * total_new > max_darts:
            raise SpeiserError("extension too large to materialize")
        rot = {v: list(base.vertex_darts(v)) for v in range(base.vertex_count)}
        alloc = [base.dart_count]
        darts = {}

        def dart_for(key, end):
            # end 0: dart at the edge's first endpoint, end 1: at the second
            if key not in darts:
                d = alloc[0]
                alloc[0] += 2
                darts[key] = d
            return darts[key] + end

        def splice_after(vertex, anchor, dart):
            lst = rot[vertex]
            lst.insert(lst.index(anchor) + 1, dart)

        def splice_before(vertex, anchor, dart):
            lst = rot[vertex]
            lst.insert(lst.index(anchor), dart)

        for pi, p in enumerate(self.patches):
            grid = p.grid
            h1, cols = grid.shape
            run = p.arc.darts

            def vert(r, c, end):
                # edge between (r, c) and (r+1, c); end 0 at row r
                return dart_for((pi, "v", r, c), end)

            def horiz(r, c, end):
                # edge between (r, c) and (r, c+1 mod cols); end 0 at column c
                return dart_for((pi, "h", r, c), end)

            cyl = p.kind == "half-cylinder"
            lo, hi = p.glued.start, p.glued.stop
            if cyl:
                for j in range(cols):
                    splice_after(int(grid[0, j]), twin(run[j - 1]), vert(0, j, 0))
            else:
                for j in range(lo, hi):
                    u = int(grid[0, j])
                    d = vert(0, j, 0)
                    if j == lo:
                        splice_before(u, run[0], d)
                        if lo > 0:
                            splice_before(u, d, horiz(0, lo - 1, 1))
                    else:
                        splice_after(u, twin(run[j - lo - 1]), d)
                        if j == hi - 1 and hi < cols:
                            splice_after(u, d, horiz(0, j, 0))
            # patch-own vertices, ccw order: east, toward-walk, west, away
            for r in range(h1):
                for c in range(cols):
                    u = int(grid[r, c])
                    if r == 0 and (cyl or lo <= c < hi):
                        continue
                    order = []
                    if cyl or c + 1 < cols:
                        order.append(horiz(r, c, 0))
                    if r > 0:
                        order.append(vert(r - 1, c, 1))
                    if cyl or c - 1 >= 0:
                        order.append(horiz(r, (c - 1) % cols, 1))
                    if r + 1 < h1:
                        order.append(vert(r, c, 0))
                    rot[u] = order
            if not cyl:
                # row-0 edges inside the glued range are base edges: the
                # horiz(0, c) instances there must not be allocated
                for c in range(lo, hi - 1):
                    assert (pi, "h", 0, c) not in darts

        rotations = [rot.get(v, []) for v in range(self.vertex_count)]
        flags = {}
        for v in range(base.vertex_count):
            flags[v] = dict(base.vertex_flags(v))
        for v in range(base.vertex_count, self.vertex_count):
            flags[v] = {"lattice": "1"}
        return RotationGraph.from_vertex_rotations(rotations, flags=flags,
                                                   name=self.name or "extended")


def _build_patches(base_graph, arcs, cycles, h, margin):
    """Allocate patch grids; returns (patches, vertex_count, cut_vertices)."""
    next_id = base_graph.vertex_count
    patches = []
    cuts = set()
    for arc in arcs:
        walk = arc.vertices
        if arc.cyclic:
            cols = len(walk)
            grid = np.empty((h + 1, cols), dtype=np.int64)
            grid[0] = walk
            n_new = h * cols
            grid[1:] = np.arange(next_id, next_id + n_new).reshape(h, cols)
            next_id += n_new
            patches.append(Patch("half-cylinder", grid, slice(0, cols),
                                 arc.face, arc))
            continue
        L = len(walk)
        cols = L + 2 * margin
        grid = np.empty((h + 1, cols), dtype=np.int64)
        row0 = np.empty(cols, dtype=np.int64)
        row0[margin:margin + L] = walk
        n_margin = margin
        row0[:margin] = np.arange(next_id, next_id + n_margin)
        next_id += n_margin
        row0[margin + L:] = np.arange(next_id, next_id + n_margin)
        next_id += n_margin
        grid[0] = row0
        n_new = h * cols
        grid[1:] = np.arange(next_id, next_id + n_new).reshape(h, cols)
        next_id += n_new
        patches.append(Patch("half-plane", grid, slice(margin, margin + L),
                             arc.face, arc))
        cuts.add(walk[0])
        cuts.add(walk[-1])
    for arc, face_cycle in cycles:
        cols = len(arc.vertices)
        grid = np.empty((h + 1, cols), dtype=np.int64)
        grid[0] = arc.vertices
        n_new = h * cols
        grid[1:] = np.arange(next_id, next_id + n_new).reshape(h, cols)
        next_id += n_new
        patches.append(Patch("half-cylinder", grid, slice(0, cols),
                             arc.face, arc))
    return patches, next_id, sorted(cuts)


def extend(sp: SpeiserGraph, n, h: int, w: int = None) -> ExtendedGraph:
    """Extended Speiser graph: half-plane lattices in every unbounded face;
    for finite n, a half-cylinder in every bounded face with 2k >= 2n darts
    (2-dart faces are never patched).

    h is the lattice height; arcs extend past their ends by a margin of h
    columns (w, when given, fixes total width = arc length + 2*margin and
    must allow margin >= h).
    """
    if h < 1:
        raise SpeiserError("lattice height h must be >= 1")
    arcs = unbounded_arcs(sp)
    margin = h
    if w is not None:
        longest = max((len(a.vertices) for a in arcs), default=0)
        margin = (w - longest) // 2
        if margin < h:
            raise SpeiserError(
                f"width {w} too small: need >= {longest + 2 * h} "
                f"(longest arc plus 2h margin)")
    open_arcs = [a for a in arcs if not a.cyclic]
    cyc_arcs = [(a, None) for a in arcs if a.cyclic]
    cylinders = []
    if n is not None and n != float("inf"):
        if n < 1:
            raise SpeiserError("n must be >= 1 or None for infinity")
        for f in sp.bounded_faces():
            cycle = list(sp.faces.faces[f])
            if len(cycle) >= 2 * n and len(cycle) > 2:
                verts = [sp.graph.dart_owner[d] for d in cycle]
                # anchor the gluing at the face's minimal-id vertex
                k = verts.index(min(verts))
                cycle = cycle[k:] + cycle[:k]
                verts = verts[k:] + verts[:k]
                cylinders.append((BoundaryArc(darts=cycle, vertices=verts,
                                              cyclic=True, face=f), cycle))
    patches, count, cuts = _build_patches(sp.graph, open_arcs + [a for a, _ in cyc_arcs],
                                          cylinders, h, margin)
    label = "inf" if n is None or n == float("inf") else str(n)
    return ExtendedGraph(base=sp, base_graph=sp.graph, patches=patches,
                         vertex_count=count, height=h, root=0,
                         cut_vertices=cuts,
                         name=f"gamma_{label}({sp.graph.name})")


def extend_tree(t: TreeTruncation, h: int, w: int = None) -> ExtendedGraph:
    """Dual-picture extension: half-plane lattices glued along the tree's
    complementary-component boundary arcs."""
    if h < 1:
        raise SpeiserError("lattice height h must be >= 1")
    arcs = tree_boundary_arcs(t)
    margin = h
    if w is not None:
        longest = max((len(a.vertices) for a in arcs), default=0)
        margin = (w - longest) // 2
        if margin < h:
            raise SpeiserError(
                f"width {w} too small: need >= {longest + 2 * h}")
    patches, count, cuts = _build_patches(t.graph, arcs, [], h, margin)
    return ExtendedGraph(base=t, base_graph=t.graph, patches=patches,
                         vertex_count=count, height=h, root=t.root,
                         cut_vertices=cuts, name=f"ext({t.graph.name})")


def standard_model(n_ends: int, depth: int, h: int) -> ExtendedGraph:
    """Standard model: star tree with one valence-N vertex, a half-plane
    lattice glued into each of its N wedges."""
    from .trees import builtin_family, generate
    if n_ends < 1:
        raise SpeiserError("standard model needs >= 1 ends")
    t = generate(builtin_family("standard-model-tree", ends=n_ends), depth)
    ext = extend_tree(t, h)
    ext.name = f"sigma_s({n_ends})@{depth}"
    return ext


# --------------------------------------------------------------------------
# face-collapse surgery
# --------------------------------------------------------------------------

def collapse_faces(sp: SpeiserGraph) -> TreeTruncation:
    """Collapse bounded faces to vertices and merge parallel edges.

    Two regimes of the same surgery, picked by how bounded faces meet:

    * no two bounded faces share an edge (log-end graphs with isolated
      critical-point faces): contract every bounded face's boundary to a
      point, then merge parallel edges;
    * bounded faces share edges (duals of tree triangulations): each bounded
      face becomes a vertex, adjacent when the faces share an edge; this is
      the dual restricted to the finite labels and inverts
      triangulate_and_dualize on kernel-equal trees.

    The result must be a tree; a surviving cycle raises.
    """
    g = sp.graph
    faces = sp.faces
    bounded = [f for f in range(faces.face_count)
               if sp.face_label[f] != LABEL_INF]
    bset = set(bounded)
    shared = False
    for e in range(g.edge_count):
        f1, f2 = faces.dart_face[2 * e], faces.dart_face[2 * e + 1]
        if f1 != f2 and f1 in bset and f2 in bset:
            shared = True
            break
    if shared:
        return _collapse_by_face_adjacency(sp, bounded)
    return _collapse_by_contraction(sp, bounded)


def _tree_output(neighbor_lists, colors, frontier_leaves, root, name):
    flags = {}
    for v, lst in enumerate(neighbor_lists):
        flags[v] = {"color": "circle" if colors[v] == 0 else "cross"}
    for v in frontier_leaves:
        flags[v]["frontier"] = "1"
    flags.setdefault(root, {})["root"] = "1"
    graph = RotationGraph.from_neighbor_lists(neighbor_lists, flags=flags,
                                              name=name)
    layer = bfs_distances(graph, root)
    parent = [-1] * graph.vertex_count
    for v in range(graph.vertex_count):
        for w in graph.neighbors(v):
            if layer[w] == layer[v] - 1:
                parent[v] = w
    return TreeTruncation(graph=graph, root=root, depth=max(layer) if layer else 0,
                          frontier={v: 1 for v in frontier_leaves},
                          color=list(colors), layer=layer, parent=parent,
                          keys=[None] * graph.vertex_count, family=None)


def _collapse_by_face_adjacency(sp: SpeiserGraph, bounded):
    g = sp.graph
    faces = sp.faces
    index = {f: i for i, f in enumerate(bounded)}
    adj_sets = [set() for _ in bounded]
    order = [dict() for _ in bounded]   # neighbor -> first position on walk
    for f in bounded:
        i = index[f]
        for pos, d in enumerate(faces.faces[f]):
            other = faces.dart_face[twin(d)]
            if other == f or other not in index:
                continue
            j = index[other]
            if j not in order[i]:
                order[i][j] = pos
            adj_sets[i].add(j)
    lists = []
    for i in range(len(bounded)):
        lists.append(sorted(adj_sets[i], key=lambda j: order[i][j]))
    edge_total = sum(len(l) for l in lists)
    if edge_total != 2 * (len(bounded) - 1):
        raise SpeiserError("not a Speiser graph of Nevanlinna-Elfving type: "
                           "face collapse leaves a cycle")
    colors = [0 if sp.face_label[f] == LABEL_MINUS else 1 for f in bounded]
    frontier_leaves = []
    for f in bounded:
        cyc = faces.faces[f]
        if any("frontier" in g.vertex_flags(g.dart_owner[d]) for d in cyc):
            if len(lists[index[f]]) <= 1:
                frontier_leaves.append(index[f])
    tv = sp.face_tree_vertex
    root = 0
    if sp.tree is not None:
        for f in bounded:
            if tv[f] == sp.tree.root:
                root = index[f]
                break
    return _tree_output(lists, colors, frontier_leaves, root,
                        name=f"collapse({g.name})")


def _collapse_by_contraction(sp: SpeiserGraph, bounded):
    g = sp.graph
    faces = sp.faces
    parent = list(range(g.vertex_count))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for f in bounded:
        cyc = faces.faces[f]
        if len(cyc) <= 2:
            continue   # bigons die by parallel-edge merging below
        first = g.dart_owner[cyc[0]]
        for d in cyc[1:]:
            union(first, g.dart_owner[d])
    classes = sorted({find(v) for v in range(g.vertex_count)})
    cindex = {c: i for i, c in enumerate(classes)}
    pair_seen = set()
    adj = [[] for _ in classes]
    for v in range(g.vertex_count):
        for d in g.vertex_darts(v):
            u, w = cindex[find(v)], cindex[find(g.head(d))]
            if u == w:
                continue
            key = (min(u, w), max(u, w))
            if key in pair_seen:
                continue
            pair_seen.add(key)
            adj[u].append(w)
            adj[w].append(u)
    if len(pair_seen) != len(classes) - 1:
        raise SpeiserError("not a Speiser graph of Nevanlinna-Elfving type: "
                           "face collapse leaves a cycle")
    # 2-color the collapsed tree from the root class
    colors = [-1] * len(classes)
    colors[0] = 0
    q = deque([0])
    while q:
        v = q.popleft()
        for w in adj[v]:
            if colors[w] == -1:
                colors[w] = 1 - colors[v]
                q.append(w)
    frontier_leaves = []
    members = {}
    for v in range(g.vertex_count):
        members.setdefault(cindex[find(v)], []).append(v)
    for c, mem in members.items():
        if len(adj[c]) <= 1 and any("frontier" in g.vertex_flags(v) for v in mem):
            frontier_leaves.append(c)
    return _tree_output(adj, colors, frontier_leaves, 0,
                        name=f"collapse({g.name})")


# --------------------------------------------------------------------------
# plane-tree isomorphism (used by the surgery round trip)
# --------------------------------------------------------------------------

def _plane_code(t: TreeTruncation, root, mirror=False):
    g = t.graph

    def code(v, parent):
        rot = [g.head(d) for d in g.vertex_darts(v)]
        if parent is not None:
            i = rot.index(parent)
            rot = rot[i + 1:] + rot[:i]
        if mirror:
            rot = rot[::-1]
        subs = tuple(code(w, v) for w in rot)
        if parent is None:
            # canonical rotation of the root's child sequence
            best = None
            for s in range(max(len(subs), 1)):
                cand = subs[s:] + subs[:s]
                if best is None or cand < best:
                    best = cand
            subs = best if best is not None else ()
        return (len(subs),) + tuple(subs)

    import sys
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 4 * t.vertex_count + 100))
    try:
        return code(root, None)
    finally:
        sys.setrecursionlimit(old)


def plane_trees_isomorphic(a: TreeTruncation, b: TreeTruncation,
                           roots=None) -> bool:
    """Rooted plane-tree isomorphism, allowing a global reflection."""
    ra = a.root if roots is None else roots[0]
    rb = b.root if roots is None else roots[1]
    ca = _plane_code(a, ra)
    return ca == _plane_code(b, rb) or ca == _plane_code(b, rb, mirror=True)
