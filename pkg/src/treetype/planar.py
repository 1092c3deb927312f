"""Planar embedded graphs as rotation systems (combinatorial maps).

A graph is stored as a set of darts (directed half-edges).  Darts come in
twin pairs (2i, 2i+1); each dart has an owner vertex and a successor in the
counterclockwise rotation around its owner.  Faces are orbits of the map
d -> rotation_next(twin(d)), so V - E + F = 2 holds exactly for the genus-0
graphs produced by this package.

Multi-edges are permitted everywhere (Speiser graphs need them); self-loops
are rejected.  Vertex ids are dense integers assigned in construction order.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass


class GraphError(ValueError):
    pass


def twin(dart: int) -> int:
    return dart ^ 1


class RotationGraph:
    """Immutable planar graph: vertices, twin-paired darts, ccw rotations."""

    __slots__ = ("vertex_count", "dart_owner", "rot_next", "flags", "name",
                 "_vertex_darts", "_neighbors")

    def __init__(self, vertex_count, dart_owner, rot_next, flags=None, name=""):
        self.vertex_count = vertex_count
        self.dart_owner = dart_owner
        self.rot_next = rot_next
        self.flags = flags if flags is not None else {}
        self.name = name
        self._vertex_darts = None
        self._neighbors = None
        self._validate()

    # -- construction ------------------------------------------------------

    @classmethod
    def from_vertex_rotations(cls, rotations, flags=None, name=""):
        """Build from per-vertex lists of dart ids in ccw order.

        Dart ids must use the twin pairing (2i, 2i+1) and each dart must
        appear in exactly one rotation list.
        """
        dart_count = sum(len(r) for r in rotations)
        dart_owner = [-1] * dart_count
        rot_next = [-1] * dart_count
        for v, rot in enumerate(rotations):
            for i, d in enumerate(rot):
                if dart_owner[d] != -1:
                    raise GraphError(f"dart {d} appears twice")
                dart_owner[d] = v
                rot_next[d] = rot[(i + 1) % len(rot)]
        return cls(len(rotations), dart_owner, rot_next, flags=flags, name=name)

    @classmethod
    def from_neighbor_lists(cls, neighbor_lists, flags=None, name=""):
        """Build from per-vertex cyclic neighbor id lists.

        Parallel edges between u and v are paired in reversed order (the i-th
        occurrence of v at u twins with the last-but-i occurrence of u at v),
        the planar convention for a bundle of parallel arcs.
        """
        n = len(neighbor_lists)
        slots = {}          # (u, v) -> list of slot indices of v in u's list
        for u, lst in enumerate(neighbor_lists):
            for i, v in enumerate(lst):
                if not 0 <= v < n:
                    raise GraphError(f"vertex {u} lists unknown neighbor {v}")
                if v == u:
                    raise GraphError(f"self-loop at vertex {u}")
                slots.setdefault((u, v), []).append(i)
        dart_of_slot = {}
        next_dart = 0
        for (u, v), here in sorted(slots.items()):
            if u > v:
                continue
            there = slots.get((v, u))
            if there is None or len(there) != len(here):
                raise GraphError(
                    f"inconsistent adjacency between {u} and {v}: "
                    f"{len(here)} vs {0 if there is None else len(there)}")
            for i, si in enumerate(here):
                sj = there[len(there) - 1 - i]
                dart_of_slot[(u, si)] = next_dart
                dart_of_slot[(v, sj)] = next_dart + 1
                next_dart += 2
        rotations = [[dart_of_slot[(u, i)] for i in range(len(lst))]
                     for u, lst in enumerate(neighbor_lists)]
        g = cls.from_vertex_rotations(rotations, flags=flags, name=name)
        if n > 0 and not g.is_connected():
            raise GraphError("graph is not connected")
        return g

    def _validate(self):
        nd = len(self.dart_owner)
        if nd % 2 != 0 or len(self.rot_next) != nd:
            raise GraphError("dart arrays inconsistent")
        for d in range(nd):
            if self.dart_owner[d] == self.dart_owner[twin(d)]:
                raise GraphError(f"self-loop on dart {d}")
        # rotation restricted to each vertex is a single cycle
        seen = [False] * nd
        counts = [0] * self.vertex_count
        for d in range(nd):
            counts[self.dart_owner[d]] += 1
        for d in range(nd):
            if seen[d]:
                continue
            v = self.dart_owner[d]
            steps = 0
            e = d
            while True:
                if self.dart_owner[e] != v:
                    raise GraphError(f"rotation at vertex {v} leaves the vertex")
                seen[e] = True
                steps += 1
                e = self.rot_next[e]
                if e == d:
                    break
                if steps > counts[v]:
                    raise GraphError(f"rotation at vertex {v} is not a single cycle")
            if steps != counts[v]:
                raise GraphError(f"rotation at vertex {v} is not a single cycle")

    # -- basic accessors ----------------------------------------------------

    @property
    def dart_count(self) -> int:
        return len(self.dart_owner)

    @property
    def edge_count(self) -> int:
        return len(self.dart_owner) // 2

    def head(self, dart: int) -> int:
        return self.dart_owner[twin(dart)]

    def vertex_darts(self, v: int):
        """Darts owned by v in ccw rotation order."""
        if self._vertex_darts is None:
            vd = [[] for _ in range(self.vertex_count)]
            placed = [False] * self.dart_count
            for d in range(self.dart_count):
                if placed[d]:
                    continue
                cycle = []
                e = d
                while not placed[e]:
                    placed[e] = True
                    cycle.append(e)
                    e = self.rot_next[e]
                vd[self.dart_owner[d]] = cycle
            self._vertex_darts = vd
        return self._vertex_darts[v]

    def neighbors(self, v: int):
        if self._neighbors is None:
            self._neighbors = [
                [self.head(d) for d in self.vertex_darts(u)]
                for u in range(self.vertex_count)
            ]
        return self._neighbors[v]

    def degree(self, v: int) -> int:
        return len(self.vertex_darts(v))

    def edges(self):
        """One (tail, head) pair per edge, for dart 2i."""
        return [(self.dart_owner[d], self.head(d))
                for d in range(0, self.dart_count, 2)]

    def neighbor_lists(self):
        return [list(self.neighbors(v)) for v in range(self.vertex_count)]

    def vertex_flags(self, v: int) -> dict:
        return self.flags.get(v, {})

    def is_connected(self) -> bool:
        if self.vertex_count == 0:
            return True
        seen = [False] * self.vertex_count
        seen[0] = True
        stack = [0]
        count = 1
        while stack:
            u = stack.pop()
            for w in self.neighbors(u):
                if not seen[w]:
                    seen[w] = True
                    count += 1
                    stack.append(w)
        return count == self.vertex_count


@dataclass
class FaceSet:
    """Faces traced from a rotation graph.

    faces[i] is the cyclic dart sequence of face i; dart_face maps each dart
    to its face.  touches_frontier flags faces incident to a vertex carrying
    the 'frontier' mark (unbounded-face candidates on truncations).
    """
    faces: list
    dart_face: list
    touches_frontier: list

    @property
    def face_count(self) -> int:
        return len(self.faces)

    def dart_counts(self):
        return [len(f) for f in self.faces]


def build_graph(vertex_count, adjacency_with_rotation, flags=None, name=""):
    """Build a RotationGraph from per-vertex cyclic neighbor lists."""
    if len(adjacency_with_rotation) != vertex_count:
        raise GraphError("vertex count does not match adjacency length")
    return RotationGraph.from_neighbor_lists(adjacency_with_rotation,
                                             flags=flags, name=name)


def trace_faces(g: RotationGraph) -> FaceSet:
    """Trace all faces: orbits of d -> rot_next[twin(d)]."""
    nd = g.dart_count
    dart_face = [-1] * nd
    faces = []
    for d in range(nd):
        if dart_face[d] != -1:
            continue
        cycle = []
        e = d
        while dart_face[e] == -1:
            dart_face[e] = len(faces)
            cycle.append(e)
            e = g.rot_next[twin(e)]
        faces.append(tuple(cycle))
    touches = []
    for cycle in faces:
        t = any("frontier" in g.vertex_flags(g.dart_owner[d]) for d in cycle)
        touches.append(t)
    return FaceSet(faces=faces, dart_face=dart_face, touches_frontier=touches)


def word_distance(g: RotationGraph, u: int, v: int) -> int:
    """Shortest path length in the word metric (BFS)."""
    for x in (u, v):
        if not 0 <= x < g.vertex_count:
            raise GraphError(f"unknown vertex id {x}")
    if u == v:
        return 0
    dist = {u: 0}
    q = deque([u])
    while q:
        x = q.popleft()
        for y in g.neighbors(x):
            if y not in dist:
                dist[y] = dist[x] + 1
                if y == v:
                    return dist[y]
                q.append(y)
    raise GraphError(f"no path between {u} and {v}")


def bfs_distances(g: RotationGraph, sources) -> list:
    """Distances from a vertex or a set of vertices; -1 where unreachable."""
    if isinstance(sources, int):
        sources = [sources]
    dist = [-1] * g.vertex_count
    q = deque()
    for s in sources:
        if dist[s] == -1:
            dist[s] = 0
            q.append(s)
    while q:
        x = q.popleft()
        for y in g.neighbors(x):
            if dist[y] == -1:
                dist[y] = dist[x] + 1
                q.append(y)
    return dist


def dual_graph(g: RotationGraph, fs: FaceSet) -> RotationGraph:
    """Dual graph: one vertex per face, one edge per primal edge.

    Dual darts reuse primal dart ids (the dual dart of d crosses the primal
    edge of d, from face(d) into face(twin d)); the dual rotation at a face
    is the face's own dart cycle.
    """
    dart_owner = list(fs.dart_face)
    rot_next = [-1] * g.dart_count
    for cycle in fs.faces:
        for i, d in enumerate(cycle):
            rot_next[d] = cycle[(i + 1) % len(cycle)]
    return RotationGraph(fs.face_count, dart_owner, rot_next,
                         name=f"dual({g.name})" if g.name else "dual")


def euler_characteristic(g: RotationGraph, fs: FaceSet = None) -> int:
    if fs is None:
        fs = trace_faces(g)
    return g.vertex_count - g.edge_count + fs.face_count


def graphs_equal_up_to_rotation(a: RotationGraph, b: RotationGraph) -> bool:
    """Same vertex ids with identical cyclic neighbor lists (any phase)."""
    if a.vertex_count != b.vertex_count or a.dart_count != b.dart_count:
        return False
    for v in range(a.vertex_count):
        la, lb = a.neighbors(v), b.neighbors(v)
        if len(la) != len(lb):
            return False
        if len(la) == 0:
            continue
        doubled = la + la
        if not any(doubled[i:i + len(lb)] == lb for i in range(len(la))):
            return False
    return True
