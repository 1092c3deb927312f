"""Finitely-described infinite planar trees and their truncations.

A family describes an infinite tree by a root and a rule mapping a vertex
descriptor to the descriptors of its children, listed in counterclockwise
order after the parent edge.  A truncation materializes the ball of a given
radius; vertices at the boundary whose rule still produces children are
frontier vertices, and deeper generation extends them consistently (the
radius-R ball of the depth-(R+1) truncation is the depth-R truncation with
identical ids and rotations).

The builtin registry covers the families exercised by the analyses: the sine
tree (bi-infinite path), homogeneous trees, finite stars, caterpillars,
trees with growing valence (parabolic and hyperbolic variants), trees with
unbounded distance to the kernel (parabolic and hyperbolic variants), the
cos(pi cos z) grid pattern and N-ray star models.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .planar import RotationGraph, bfs_distances

ROOT = ("root",)

MAX_VERTICES = 2_000_000


class FamilyError(ValueError):
    pass


class KernelError(ValueError):
    pass


@dataclass(frozen=True)
class TreeFamily:
    """A finitely-described infinite planar tree."""
    name: str
    params: dict
    children: object          # callable key -> list of child keys, ccw after parent
    display: str = ""

    def full_valence(self, key) -> int:
        base = 0 if key == ROOT else 1
        return base + len(self.children(key))


@dataclass
class TreeTruncation:
    """Radius-R ball of a family tree, with frontier marks."""
    graph: RotationGraph
    root: int
    depth: int
    frontier: dict            # vid -> pending child count
    color: list               # 0 = circle (root), 1 = cross
    layer: list               # distance to root
    parent: list              # parent vid, -1 at root
    keys: list                # family descriptor per vertex
    family: TreeFamily = None

    @property
    def vertex_count(self):
        return self.graph.vertex_count

    def is_frontier(self, v) -> bool:
        return v in self.frontier

    def full_valence(self, v) -> int:
        if self.family is not None:
            return self.family.full_valence(self.keys[v])
        return self.graph.degree(v) + self.frontier.get(v, 0)

    def find_vertex(self, key):
        for v, k in enumerate(self.keys):
            if k == key:
                return v
        raise KeyError(key)

    def live(self):
        """live[v]: the subtree at v contains a frontier vertex.

        Children always have larger ids than parents (BFS order), so one
        reverse sweep propagates liveness to the root.
        """
        n = self.vertex_count
        out = [False] * n
        for v in range(n - 1, -1, -1):
            if v in self.frontier:
                out[v] = True
            if out[v] and self.parent[v] >= 0:
                out[self.parent[v]] = True
        return out


@dataclass
class Kernel:
    """Kernel of a truncation: bi-infinite-path union or one semi-infinite path."""
    vertices: frozenset
    kind: str                 # "bi-infinite-union" | "semi-infinite-path"

    def __contains__(self, v):
        return v in self.vertices


@dataclass
class TucReport:
    B: object                 # max observed valence (or "unstable")
    N: object
    M: object
    passes: dict              # "T1"/"T2"/"T3" -> bool
    witnesses: dict           # condition -> vertex id at the last depth
    stable_depth: object      # depth at which B and N stopped changing, or None
    trace: dict               # quantity -> [(depth, value)]

    @property
    def tuc_pass(self) -> bool:
        return all(self.passes.values())


# --------------------------------------------------------------------------
# builtin families
# --------------------------------------------------------------------------

def _sine_children(key):
    if key == ROOT:
        return [("s", 1), ("s", -1)]
    _, k = key
    return [("s", k + (1 if k > 0 else -1))]


def _homogeneous(d):
    def children(key):
        if key == ROOT:
            return [("h",)] * d
        return [("h",)] * (d - 1)
    return children


def _star(k):
    def children(key):
        if key == ROOT:
            return [("leaf",)] * k
        return []
    return children


def _standard_model_tree(n):
    def children(key):
        if key == ROOT:
            return [("ray",)] * n
        return [("ray",)]
    return children


def _caterpillar(m):
    def children(key):
        if key == ROOT:
            return [("s", 1), ("t", 1), ("s", -1)]
        tag = key[0]
        if tag == "s":
            k = key[1]
            if k > 0:
                return [("s", k + 1), ("t", 1)]
            return [("t", 1), ("s", k - 1)]
        j = key[1]
        return [("t", j + 1)] if j < m else []
    return children


def _fig1(period=3):
    def children(key):
        if key == ROOT:
            return [("s", 1), ("a",), ("s", -1)]
        tag = key[0]
        if tag == "s":
            k = key[1]
            branch = [("a",)] if k % period == 0 else []
            if k > 0:
                return [("s", k + 1)] + branch
            return branch + [("s", k - 1)]
        if tag == "a":
            return [("b",), ("b",)]
        return []
    return children


def _fig8():
    def children(key):
        if key == ROOT:
            return [("s", 1), ("s", -1)]
        tag = key[0]
        if tag == "l":
            return []
        k = key[1]
        m = abs(k)
        if k > 0:
            return [("l",)] * m + [("s", k + 1)] + [("l",)] * m
        return [("l",)] * m + [("s", k - 1)] + [("l",)] * m
    return children


def _fig11(spacing=4):
    def children(key):
        if key == ROOT:
            return [("s", 1), ("s", -1)]
        tag = key[0]
        if tag == "p":
            _, j, L = key
            return [("p", j + 1, L)] if j < L else []
        k = key[1]
        L = (abs(k) + spacing - 1) // spacing
        has = k % spacing == 0
        if k > 0:
            out = [("p", 1, L)] if has else []       # down branch
            out.append(("s", k + 1))
            if has:
                out.append(("p", 1, L))              # up branch
            return out
        out = [("p", 1, L)] if has else []           # up branch
        out.append(("s", k - 1))
        if has:
            out.append(("p", 1, L))                  # down branch
        return out
    return children


def _fig12(base=2, spacing=2):
    def branch_length(k):
        e = min(abs(k) - 1, 60)
        return base ** e

    def children(key):
        if key == ROOT:
            return [("s", 1), ("s", -1)]
        tag = key[0]
        if tag == "p":
            _, j, L = key
            return [("p", j + 1, L)] if j < L else []
        k = key[1]
        has = k % spacing == 0 and k != 0
        if k > 0:
            out = [("s", k + 1)]
            if has:
                out.append(("p", 1, branch_length(k)))   # up branch
            return out
        out = []
        if has:
            out.append(("p", 1, branch_length(k)))       # up branch
        out.append(("s", k - 1))
        return out
    return children


def _sutter(base=2, spacing=2):
    def children(key):
        if key == ROOT:
            return [("s", 1), ("s", -1)]
        tag = key[0]
        if tag == "l":
            return []
        k = key[1]
        fan = base ** min(abs(k), 24) if k % spacing == 0 and k != 0 else 0
        up, down = (fan + 1) // 2, fan // 2
        if k > 0:
            return [("l",)] * down + [("s", k + 1)] + [("l",)] * up
        return [("l",)] * up + [("s", k - 1)] + [("l",)] * down
    return children


def _coscos(spacing=2):
    def children(key):
        if key == ROOT:
            return [("s", 1), ("r",), ("s", -1), ("r",)]
        tag = key[0]
        if tag == "r":
            return [("r",)]
        k = key[1]
        has = k % spacing == 0
        if k > 0:
            out = [("r",)] if has else []            # down ray
            out.append(("s", k + 1))
            if has:
                out.append(("r",))                   # up ray
            return out
        out = [("r",)] if has else []
        out.append(("s", k - 1))
        if has:
            out.append(("r",))
        return out
    return children


def builtin_family(name: str, **params) -> TreeFamily:
    """Look up a family by name; unknown names or bad parameters raise."""
    name = name.replace("_", "-")
    if name == "sine":
        return TreeFamily("sine", {}, _sine_children, "sine tree (bi-infinite path)")
    if name == "homogeneous":
        d = int(params.get("valence", 3))
        if d < 2:
            raise FamilyError("homogeneous valence must be >= 2")
        return TreeFamily("homogeneous", {"valence": d}, _homogeneous(d),
                          f"homogeneous tree of valence {d}")
    if name == "star":
        k = int(params.get("rays", 3))
        if k < 1:
            raise FamilyError("star needs >= 1 rays")
        return TreeFamily("star", {"rays": k}, _star(k), f"finite {k}-star")
    if name == "standard-model-tree":
        n = int(params.get("ends", 4))
        if n < 1:
            raise FamilyError("standard model needs >= 1 ends")
        return TreeFamily("standard-model-tree", {"ends": n},
                          _standard_model_tree(n), f"{n}-ray star tree")
    if name == "caterpillar":
        m = int(params.get("tooth", 1))
        if m < 1:
            raise FamilyError("caterpillar tooth length must be >= 1")
        return TreeFamily("caterpillar", {"tooth": m}, _caterpillar(m),
                          f"caterpillar with teeth of length {m}")
    if name == "fig1":
        return TreeFamily("fig1", {}, _fig1(), "spine with finite Y-branches")
    if name == "fig8":
        return TreeFamily("fig8", {}, _fig8(),
                          "growing-valence tree (2|k| leaves at position k)")
    if name == "fig11":
        return TreeFamily("fig11", {}, _fig11(),
                          "unbounded kernel distance, linear branch growth")
    if name == "fig12":
        base = int(params.get("base", 2))
        if base < 2:
            raise FamilyError("fig12 schedule base must be >= 2")
        return TreeFamily("fig12", {"base": base}, _fig12(base=base),
                          f"unbounded kernel distance, A_k = {base}^k branch schedule")
    if name == "sutter":
        return TreeFamily("sutter", {}, _sutter(),
                          "rapidly growing valence (hyperbolic pattern)")
    if name == "coscos":
        return TreeFamily("coscos", {}, _coscos(),
                          "cos(pi cos z) pattern: spine with vertical rays")
    raise FamilyError(f"unknown family {name!r}")


BUILTIN_NAMES = ("sine", "homogeneous", "star", "standard-model-tree",
                 "caterpillar", "fig1", "fig8", "fig11", "fig12", "sutter",
                 "coscos")


# --------------------------------------------------------------------------
# generation
# --------------------------------------------------------------------------

def generate(family: TreeFamily, depth: int, max_vertices: int = MAX_VERTICES) -> TreeTruncation:
    """Materialize the radius-`depth` ball of the family tree."""
    if depth < 0:
        raise FamilyError("depth must be >= 0")
    keys = [ROOT]
    layer = [0]
    parent = [-1]
    child_ids = {0: []}
    frontier = {}
    current = [0]
    for lvl in range(depth + 1):
        nxt = []
        for v in current:
            kids = family.children(keys[v])
            if lvl == depth:
                if kids:
                    frontier[v] = len(kids)
                continue
            ids = []
            for key in kids:
                w = len(keys)
                keys.append(key)
                layer.append(lvl + 1)
                parent.append(v)
                ids.append(w)
                nxt.append(w)
            child_ids[v] = ids
            if len(keys) > max_vertices:
                raise FamilyError(
                    f"{family.name} at depth {depth} exceeds {max_vertices} vertices; "
                    f"use a smaller depth")
        current = nxt
    n = len(keys)
    neighbor_lists = []
    for v in range(n):
        kids = child_ids.get(v, [])
        if v == 0:
            neighbor_lists.append(list(kids))
        else:
            order = [parent[v]]
            # children() lists ccw after the parent; for non-root vertices the
            # parent occupies the remaining rotation slot.
            order.extend(kids)
            neighbor_lists.append(order)
    flags = {0: {"root": "1"}}
    for v, pending in frontier.items():
        flags.setdefault(v, {})["frontier"] = str(pending)
    color = [l % 2 for l in layer]
    for v in range(n):
        flags.setdefault(v, {})["color"] = "circle" if color[v] == 0 else "cross"
    graph = RotationGraph.from_neighbor_lists(neighbor_lists, flags=flags,
                                              name=f"{family.name}@{depth}")
    return TreeTruncation(graph=graph, root=0, depth=depth, frontier=frontier,
                          color=color, layer=layer, parent=parent, keys=keys,
                          family=family)


# --------------------------------------------------------------------------
# kernel and TUC machinery
# --------------------------------------------------------------------------

def kernel_of(t: TreeTruncation) -> Kernel:
    """Iteratively prune non-frontier leaves; classify by surviving rays."""
    if not t.frontier:
        raise KernelError("finite tree has no kernel")
    g = t.graph
    deg = [g.degree(v) for v in range(g.vertex_count)]
    alive = [True] * g.vertex_count
    q = deque(v for v in range(g.vertex_count)
              if deg[v] <= 1 and v not in t.frontier)
    while q:
        v = q.popleft()
        if not alive[v]:
            continue
        alive[v] = False
        for w in g.neighbors(v):
            if alive[w]:
                deg[w] -= 1
                if deg[w] <= 1 and w not in t.frontier:
                    q.append(w)
    survivors = frozenset(v for v in range(g.vertex_count) if alive[v])
    rays = [v for v in t.frontier if v in survivors]
    if len(rays) >= 2:
        return Kernel(vertices=survivors, kind="bi-infinite-union")
    # single complementary component: the canonical semi-infinite path runs
    # from the designated root to the unique frontier direction
    target = rays[0]
    path = {target}
    v = target
    dist = bfs_distances(g, t.root)
    while v != t.root:
        v = min(w for w in g.neighbors(v) if dist[w] == dist[v] - 1)
        path.add(v)
    return Kernel(vertices=frozenset(path), kind="semi-infinite-path")


def distance_to_kernel(t: TreeTruncation, k: Kernel) -> list:
    """Multi-source BFS distances to the kernel; 0 exactly on kernel vertices."""
    for v in k.vertices:
        if not 0 <= v < t.vertex_count:
            raise KernelError(f"kernel vertex {v} not in truncation")
    expected = kernel_of(t)
    if expected.vertices != k.vertices:
        raise KernelError("mismatched kernel for this truncation")
    return bfs_distances(t.graph, list(k.vertices))


def parent_map(t: TreeTruncation, k: Kernel) -> dict:
    """Retraction onto the kernel: off-kernel vertices map to the kernel
    vertex their branch hangs from; kernel vertices map to themselves."""
    g = t.graph
    out = {}
    q = deque()
    for v in k.vertices:
        out[v] = v
        q.append(v)
    while q:
        v = q.popleft()
        for w in g.neighbors(v):
            if w not in out:
                out[w] = v if v in k.vertices else out[v]
                q.append(w)
    return out


def induced_truncation(t: TreeTruncation, vertices) -> TreeTruncation:
    """Induced subtree on a connected vertex set, ids renumbered by old id.

    The rotation at each surviving vertex is the restriction of its original
    cyclic dart order.  Frontier marks survive; pruned neighbors of surviving
    vertices are not re-marked.
    """
    keep = sorted(set(vertices))
    index = {v: i for i, v in enumerate(keep)}
    g = t.graph
    lists = []
    for v in keep:
        lists.append([index[w] for w in g.neighbors(v) if w in index])
    flags = {index[v]: dict(g.vertex_flags(v)) for v in keep}
    graph = RotationGraph.from_neighbor_lists(lists, flags=flags,
                                              name=f"{g.name}|induced")
    root = index[t.root] if t.root in index else 0
    layer = bfs_distances(graph, root)
    parent = [-1] * len(keep)
    for v in sorted(range(len(keep)), key=lambda x: layer[x]):
        for w in graph.neighbors(v):
            if layer[w] == layer[v] - 1:
                parent[v] = w
    frontier = {index[v]: p for v, p in t.frontier.items() if v in index}
    return TreeTruncation(graph=graph, root=root, depth=max(layer),
                          frontier=frontier,
                          color=[t.color[v] for v in keep],
                          layer=layer, parent=parent,
                          keys=[t.keys[v] for v in keep], family=None)


def _live_direction_count(t: TreeTruncation, radius: int) -> int:
    """Directions at the given radius whose subtree reaches the frontier."""
    live = t.live()
    count = sum(1 for v in range(t.vertex_count)
                if t.layer[v] == radius + 1 and live[v])
    return count


def complementary_components(family: TreeFamily, depths,
                             max_vertices: int = MAX_VERTICES):
    """Stabilized count of complementary components in the plane.

    For each depth d the tree is generated to 2d and a direction at the
    d-sphere is counted only if it still reaches the deeper frontier; this
    censors finite branches that are merely incomplete at depth d.
    """
    depths = list(depths)
    if len(depths) < 2 or any(b <= a for a, b in zip(depths, depths[1:])):
        raise FamilyError("need >= 2 strictly increasing depths")
    trace = []
    for d in depths:
        t = generate(family, 2 * d, max_vertices=max_vertices)
        if not t.frontier:
            trace.append((d, 1))   # finite tree: one complementary component
            continue
        trace.append((d, _live_direction_count(t, d)))
    values = [v for _, v in trace]
    if values[-1] == values[-2]:
        return values[-1], trace
    return "unstable", trace


def check_tuc(family: TreeFamily, depths,
              max_vertices: int = MAX_VERTICES) -> TucReport:
    """Evaluate (T1) bounded valence, (T2) finitely many complementary
    components, (T3) bounded distance to the kernel, with stabilization
    across the given depths."""
    depths = list(depths)
    if len(depths) < 2 or any(b <= a for a, b in zip(depths, depths[1:])):
        raise FamilyError("need >= 2 strictly increasing depths")
    deep = generate(family, 2 * depths[-1], max_vertices=max_vertices)
    finite = not deep.frontier
    live = deep.live()
    if not finite:
        kern = kernel_of(deep)
        dist_k = bfs_distances(deep.graph, list(kern.vertices))
    trace = {"B": [], "N": [], "M": []}
    witness_b = witness_m = None
    for d in depths:
        ball = [v for v in range(deep.vertex_count) if deep.layer[v] <= d]
        b_val, b_wit = 0, None
        for v in ball:
            val = deep.full_valence(v)
            if val > b_val:
                b_val, b_wit = val, v
        trace["B"].append((d, b_val))
        if finite:
            trace["N"].append((d, 1))
            trace["M"].append((d, 0))
            continue
        n_val = sum(1 for v in range(deep.vertex_count)
                    if deep.layer[v] == d + 1 and live[v])
        trace["N"].append((d, n_val))
        m_val, m_wit = 0, None
        for v in ball:
            if dist_k[v] > m_val:
                m_val, m_wit = dist_k[v], v
        trace["M"].append((d, m_val))
        witness_b, witness_m = b_wit, m_wit
    def stable(series):
        return series[-1][1] == series[-2][1]
    st = {"B": stable(trace["B"]), "N": stable(trace["N"]), "M": stable(trace["M"])}
    passes = {"T1": st["B"], "T2": st["N"], "T3": st["M"]}
    stable_depth = None
    for i in range(len(depths) - 1, -1, -1):
        if (trace["B"][i][1] == trace["B"][-1][1]
                and trace["N"][i][1] == trace["N"][-1][1]):
            stable_depth = depths[i]
        else:
            break
    return TucReport(
        B=trace["B"][-1][1] if st["B"] else "unstable",
        N=trace["N"][-1][1] if st["N"] else "unstable",
        M=trace["M"][-1][1] if st["M"] else "unstable",
        passes=passes,
        witnesses={"T1": witness_b, "T3": witness_m},
        stable_depth=stable_depth,
        trace=trace,
    )
