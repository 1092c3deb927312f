"""Type-determination machinery for extended Speiser graphs and trees.

Every criterion returns an evidence-graded verdict: the type of an infinite
graph is never decidable from a finite truncation, so verdicts are
deterministic functions of numeric traces against fixed thresholds:

* divergence trend: the trace grows by at least DELTA per dyadic doubling
  over at least three doublings (parabolic evidence);
* convergence trend: the last two increments sum to less than TAU
  (hyperbolic evidence for resistance traces);
* isoperimetric stability: the candidate-set infimum stays above C_MIN and
  drops by at most MAX_DROP per doubling of depth (hyperbolic evidence,
  one-directional).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
import heapq
import math

import numpy as np

from .network import (Annulus, EdgeNetwork, NetworkError, annulus_separates,
                      bfs_distance_field, effective_resistance,
                      modulus_of_annulus, shell_annuli)
from .speiser import LABEL_INF, SpeiserGraph, extend, triangulate_and_dualize
from .trees import TreeFamily, builtin_family, generate

DELTA = 0.05      # required trace growth per dyadic doubling
TAU = 0.01        # tail bound for convergence evidence
C_MIN = 0.05      # isoperimetric stability floor
MAX_DROP = 0.20   # max relative drop of the isoperimetric constant per doubling

PARABOLIC = "parabolic-evidence"
HYPERBOLIC = "hyperbolic-evidence"
INCONCLUSIVE = "inconclusive"


class TypeEngineError(ValueError):
    pass


@dataclass
class TypeVerdict:
    verdict: str
    criterion: str
    trace: list                      # [(x, value)]
    thresholds: dict
    notes: str = ""
    aux: dict = field(default_factory=dict)

    def trace_values(self):
        return [v for _, v in self.trace]


def divergence_trend(values, delta=DELTA, min_doublings=3) -> bool:
    """True when the sequence keeps growing by >= delta per doubling of its
    index, over at least min_doublings dyadic steps ending at the last entry."""
    k = len(values)
    steps = 0
    while k // 2 >= 1 and steps < min_doublings:
        if values[k - 1] - values[k // 2 - 1] < delta:
            return False
        k //= 2
        steps += 1
    return steps >= min_doublings


def convergence_tail(values, tau=TAU) -> bool:
    if len(values) < 3:
        return False
    return abs(values[-1] - values[-3]) < tau


# --------------------------------------------------------------------------
# resistance to infinity
# --------------------------------------------------------------------------

def resistance_to_infinity(builder, depths, delta=DELTA, tau=TAU,
                           criterion="resistance-to-infinity") -> TypeVerdict:
    """Trend of R_d = effective resistance from the root to the depth-d
    boundary, over an increasing depth schedule.

    builder(depth) must yield consistent truncations: (EdgeNetwork, root,
    boundary vertex set).
    """
    depths = list(depths)
    if any(b <= a for a, b in zip(depths, depths[1:])):
        raise TypeEngineError("depths must be strictly increasing")
    trace = []
    for d in depths:
        net, root, boundary = builder(d)
        r = effective_resistance(net, root, boundary)
        if trace and r < trace[-1][1] - 1e-9:
            raise TypeEngineError(
                f"builder inconsistency: R_{d} = {r} dropped below "
                f"R_{trace[-1][0]} = {trace[-1][1]}")
        trace.append((d, r))
    values = [v for _, v in trace]
    incs = [b - a for a, b in zip(values, values[1:])]
    verdict = INCONCLUSIVE
    if len(incs) >= 3 and all(i >= delta for i in incs[-3:]):
        verdict = PARABOLIC
    elif len(incs) >= 2 and sum(incs[-2:]) < tau:
        verdict = HYPERBOLIC
    return TypeVerdict(verdict=verdict, criterion=criterion, trace=trace,
                       thresholds={"delta": delta, "tau": tau})


# --------------------------------------------------------------------------
# nested annuli (combinatorial modulus)
# --------------------------------------------------------------------------

def nested_annuli_test(net: EdgeNetwork, annuli, delta=DELTA,
                       validate=True) -> TypeVerdict:
    """Partial sums of 1/mod A_n over a nested disjoint annulus sequence;
    parabolic evidence when the sums keep growing per doubling of count."""
    annuli = list(annuli)
    if not annuli:
        raise TypeEngineError("need at least one annulus")
    if validate:
        seen = set()
        for i, a in enumerate(annuli):
            ids = set(map(int, a.edge_indices))
            if ids & seen:
                raise TypeEngineError(f"annuli {i - 1} and {i} share edges")
            seen |= ids
        for i in range(len(annuli) - 1):
            if not _separates_from_outside(net, annuli[i], annuli[i + 1]):
                raise TypeEngineError(
                    f"nesting violation: annulus {i + 1} does not separate "
                    f"annulus {i} from the frontier")
    mods = [modulus_of_annulus(net, a) for a in annuli]
    sums = list(np.cumsum([1.0 / m for m in mods]))
    trace = [(i + 1, s) for i, s in enumerate(sums)]
    verdict = PARABOLIC if divergence_trend(sums, delta) else INCONCLUSIVE
    return TypeVerdict(verdict=verdict, criterion="nested-annuli",
                       trace=trace, thresholds={"delta": delta},
                       aux={"moduli": mods})


def _separates_from_outside(net, inner_ann, outer_ann):
    """outer_ann must separate inner_ann from everything beyond it."""
    mask = np.ones(net.edge_count, dtype=bool)
    mask[outer_ann.edge_indices] = False
    e = net.edges[mask]
    from scipy import sparse
    from scipy.sparse import csgraph
    m = sparse.coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])),
                          shape=(net.vertex_count, net.vertex_count))
    _, labels = csgraph.connected_components(m, directed=False)
    inner_side = {labels[v] for v in inner_ann.inner | inner_ann.outer}
    outer_side = {labels[v] for v in outer_ann.outer}
    return not (inner_side & outer_side)


def width1_annuli(net: EdgeNetwork, root, radii) -> list:
    dist = bfs_distance_field(net, root)
    return shell_annuli(net.edges, dist, radii)


# --------------------------------------------------------------------------
# Nevanlinna-Wittich
# --------------------------------------------------------------------------

def nevanlinna_wittich(sp: SpeiserGraph, base_face=None, delta=DELTA) -> TypeVerdict:
    """Boundary-vertex counts per generation: s(n) is the number of
    generation-n vertices reachable from infinity without crossing the
    graph; parabolic evidence when the partial sums of 1/s(n) diverge."""
    g = sp.graph
    exposed = np.zeros(g.vertex_count, dtype=bool)
    for f in sp.unbounded_faces():
        for d in sp.faces.faces[f]:
            exposed[g.dart_owner[d]] = True
    if not exposed.all():
        bad = int(np.flatnonzero(~exposed)[0])
        raise TypeEngineError(
            f"criterion inapplicable: vertex {bad} is not frontier-accessible")
    if base_face is not None:
        base = min(g.dart_owner[d] for d in sp.faces.faces[base_face])
    else:
        base = 0
    net = EdgeNetwork.from_rotation_graph(g)
    dist = bfs_distance_field(net, base)
    contaminated = [dist[v] for v in range(g.vertex_count)
                    if "frontier" in g.vertex_flags(v)]
    n_max = (min(contaminated) - 1) if contaminated else int(dist.max())
    if n_max < 8:
        raise TypeEngineError(
            f"truncation too shallow for generation analysis (safe range {n_max})")
    s = []
    for n in range(1, n_max + 1):
        count = int(np.sum((dist == n) & exposed))
        if count == 0:
            raise TypeEngineError(f"empty generation {n}")
        s.append(count)
    sums = list(np.cumsum([1.0 / x for x in s]))
    trace = [(n + 1, v) for n, v in enumerate(sums)]
    verdict = PARABOLIC if divergence_trend(sums, delta) else INCONCLUSIVE
    return TypeVerdict(verdict=verdict, criterion="nevanlinna-wittich",
                       trace=trace, thresholds={"delta": delta},
                       aux={"s": s, "base": base})


# --------------------------------------------------------------------------
# Thomassen isoperimetric test
# --------------------------------------------------------------------------

def isoperimetric_infimum(adjacency, root, epsilon, rim=None,
                          greedy_cap=200_000):
    """inf |boundary V| / |V|^(1/2+eps) over BFS balls around the root and a
    greedy minimal-boundary growth from the root.

    rim lists truncation-boundary vertices: candidate sets never include
    them, so every candidate is a genuine rooted connected set of the
    infinite graph with an honestly counted boundary.
    """
    n = adjacency.shape[0]
    indptr, indices = adjacency.indptr, adjacency.indices
    forbidden = np.zeros(n, dtype=bool)
    if rim is not None:
        forbidden[list(rim)] = True
    if forbidden[root]:
        raise TypeEngineError("root lies on the truncation rim")
    dist = np.full(n, -1, dtype=np.int64)
    dist[root] = 0
    frontier = np.zeros(n, dtype=bool)
    frontier[root] = True
    reached = frontier.copy()
    d = 0
    while frontier.any():
        nxt = (adjacency @ frontier.astype(np.int8)).astype(bool) & ~reached
        d += 1
        dist[nxt] = d
        reached |= nxt
        frontier = nxt
    dmax = int(dist.max())
    if forbidden.any():
        rim_dists = dist[forbidden]
        r_safe = int(rim_dists[rim_dists >= 0].min()) - 1 if (rim_dists >= 0).any() else dmax - 1
    else:
        r_safe = dmax - 1
    exponent = 0.5 + epsilon
    best = math.inf
    best_witness = None
    # ball candidates: vertices on the boundary of ball(r) have a neighbor
    # at distance r+1
    nbr_dist = dist[indices]
    vmax = np.full(n, -1, dtype=np.int64)
    nonempty = indptr[:-1] < indptr[1:]
    if nonempty.any():
        vmax[nonempty] = np.maximum.reduceat(nbr_dist, indptr[:-1][nonempty])
    sizes = np.bincount(dist[dist >= 0], minlength=dmax + 1)
    ball_sizes = np.cumsum(sizes)
    is_bnd = vmax > dist
    bnd_per_shell = np.bincount(dist[(dist >= 0) & is_bnd], minlength=dmax + 1)
    for r in range(0, max(r_safe, 0)):
        vol = ball_sizes[r]
        bnd = bnd_per_shell[r]
        if bnd == 0:
            continue
        ratio = bnd / vol ** exponent
        if ratio < best:
            best = ratio
            best_witness = ("ball", r, int(vol), int(bnd))
    # greedy minimal-boundary growth, never entering the rim
    in_set = np.zeros(n, dtype=bool)
    out_count = np.zeros(n, dtype=np.int64)
    in_set[root] = True
    out_count[root] = indptr[root + 1] - indptr[root]
    boundary = 1 if out_count[root] > 0 else 0
    size = 1
    heap = []

    def delta_for(x):
        gain = 0
        oc = 0
        for w in indices[indptr[x]:indptr[x + 1]]:
            if in_set[w]:
                if out_count[w] == 1:
                    gain += 1
            else:
                oc += 1
        return (1 if oc > 0 else 0) - gain, oc

    for w in indices[indptr[root]:indptr[root + 1]]:
        if not forbidden[w]:
            heapq.heappush(heap, (delta_for(int(w))[0], int(w)))
    limit = min(n - 1, greedy_cap)
    while heap and size < limit:
        dm, x = heapq.heappop(heap)
        if in_set[x]:
            continue
        cur, oc = delta_for(x)
        if cur != dm:
            heapq.heappush(heap, (cur, x))
            continue
        in_set[x] = True
        out_count[x] = oc
        for w in indices[indptr[x]:indptr[x + 1]]:
            if in_set[w]:
                out_count[w] -= 1
                if out_count[w] == 0:
                    boundary -= 1
            elif not forbidden[w]:
                heapq.heappush(heap, (delta_for(int(w))[0], int(w)))
        if oc > 0:
            boundary += 1
        size += 1
        if boundary > 0 and size < n:
            ratio = boundary / size ** exponent
            if ratio < best:
                best = ratio
                best_witness = ("greedy", size, size, boundary)
    return best, best_witness


def thomassen_isoperimetric(graphs_by_depth, root, epsilon,
                            c_min=C_MIN, max_drop=MAX_DROP,
                            valence_bound=64) -> TypeVerdict:
    """Rooted connected isoperimetric test with f(k) = k^(1/2+epsilon).

    graphs_by_depth: [(depth, adjacency CSR, rim vertices)] with increasing
    depth.  The verdict is hyperbolic evidence when the candidate infimum
    stays above c_min and stops dropping (relative drop <= max_drop over the
    last doubling); the test is one-directional.
    """
    if epsilon <= 0:
        raise TypeEngineError("epsilon must be positive")
    trace = []
    witnesses = []
    prev_max_deg = None
    for depth, adj, rim in graphs_by_depth:
        degs = np.diff(adj.indptr)
        max_deg = int(degs.max())
        if max_deg > valence_bound or (prev_max_deg is not None
                                       and max_deg != prev_max_deg):
            raise TypeEngineError(
                f"unbounded local valence detected at depth {depth}: "
                f"max degree {max_deg} (was {prev_max_deg}); Thomassen's "
                f"test requires uniformly bounded valence")
        prev_max_deg = max_deg
        c, witness = isoperimetric_infimum(adj, root, epsilon, rim=rim)
        trace.append((depth, c))
        witnesses.append(witness)
    values = [v for _, v in trace]
    verdict = INCONCLUSIVE
    if len(values) >= 2:
        last, prev = values[-1], values[-2]
        if last >= c_min and prev > 0 and (prev - last) / prev <= max_drop:
            verdict = HYPERBOLIC
    return TypeVerdict(verdict=verdict, criterion="thomassen-isoperimetric",
                       trace=trace,
                       thresholds={"epsilon": epsilon, "c_min": c_min,
                                   "max_drop": max_drop},
                       aux={"witnesses": witnesses})


# --------------------------------------------------------------------------
# totally ramified values
# --------------------------------------------------------------------------

def totally_ramified_test(multiplicities) -> TypeVerdict:
    """Exact rational evaluation of sum(1 - 1/m): above 2 the surface is
    hyperbolic (no true form); at or below 2 the test says nothing."""
    total = Fraction(0)
    cleaned = []
    for m in multiplicities:
        if m in (None, math.inf, "inf"):
            total += 1
            cleaned.append("inf")
            continue
        m = int(m)
        if m < 2:
            raise TypeEngineError(f"multiplicity {m} < 2 is not totally ramified")
        total += 1 - Fraction(1, m)
        cleaned.append(m)
    verdict = HYPERBOLIC if total > 2 else INCONCLUSIVE
    note = (f"defect sum {total} > 2: no true form"
            if verdict == HYPERBOLIC else f"defect sum {total} <= 2")
    return TypeVerdict(verdict=verdict, criterion="totally-ramified",
                       trace=[(i + 1, float(total))
                              for i in range(1)],
                       thresholds={"bound": 2},
                       notes=note,
                       aux={"defect_sum": total, "multiplicities": cleaned})


def tree_multiplicities(t) -> list:
    """Multiplicities for the totally-ramified test of a tree: minimum full
    valence over each color class when >= 2, plus infinity for the omitted
    value."""
    mins = {0: None, 1: None}
    for v in range(t.vertex_count):
        val = t.full_valence(v)
        c = t.color[v]
        if mins[c] is None or val < mins[c]:
            mins[c] = val
    out = []
    for c in (0, 1):
        if mins[c] is not None and mins[c] >= 2:
            out.append(mins[c])
    out.append("inf")
    return out


# --------------------------------------------------------------------------
# builders and the Doyle-Merenkov pipeline
# --------------------------------------------------------------------------

def extension_builder(family: TreeFamily, n=None, max_vertices=None):
    """depth -> (network, root, boundary) over the extended Speiser graph
    Gamma_n at lattice height h = depth."""
    def build(depth):
        kwargs = {} if max_vertices is None else {"max_vertices": max_vertices}
        t = generate(family, depth, **kwargs)
        sp = triangulate_and_dualize(t)
        ext = extend(sp, n, h=depth)
        net = EdgeNetwork.from_extended(ext)
        return net, ext.root, ext.boundary_vertices()
    return build


def tree_network_builder(family: TreeFamily):
    def build(depth):
        t = generate(family, depth)
        net = EdgeNetwork.from_rotation_graph(t.graph)
        boundary = sorted(t.frontier)
        if not boundary:
            raise TypeEngineError("finite tree has no boundary at this depth")
        return net, t.root, boundary
    return build


def homogeneous_ladder_builder(valence: int):
    """Exact spherical collapse of the homogeneous tree: level j carries
    d(d-1)^(j-1) parallel unit edges, so the tree's root-to-sphere resistance
    is a series of parallel layers.  Equipotential layers make this exact."""
    d = valence

    def build(depth):
        cond = np.array([d * (d - 1) ** j for j in range(depth)], dtype=np.float64)
        edges = np.array([[j, j + 1] for j in range(depth)], dtype=np.int64)
        net = EdgeNetwork(depth + 1, edges, cond)
        return net, 0, [depth]
    return build


def half_plane_network(depth: int):
    """Half-plane lattice ball: columns -depth..depth, rows 0..depth."""
    cols = 2 * depth + 1
    rows = depth + 1
    idx = np.arange(cols * rows).reshape(rows, cols)
    horiz = np.stack([idx[:, :-1].ravel(), idx[:, 1:].ravel()], axis=1)
    vert = np.stack([idx[:-1].ravel(), idx[1:].ravel()], axis=1)
    edges = np.concatenate([horiz, vert], axis=0)
    net = EdgeNetwork(cols * rows, edges, None)
    root = depth          # (0, depth): boundary-row center
    rim = set(map(int, idx[-1])) | set(map(int, idx[:, 0])) | set(map(int, idx[:, -1]))
    rim.discard(root)
    return net, root, sorted(rim)


def combine_verdicts(*verdicts) -> str:
    kinds = {v.verdict if isinstance(v, TypeVerdict) else v for v in verdicts}
    kinds.discard(INCONCLUSIVE)
    if kinds == {PARABOLIC}:
        return PARABOLIC
    if kinds == {HYPERBOLIC}:
        return HYPERBOLIC
    return INCONCLUSIVE


def doyle_merenkov_pipeline(family: TreeFamily, n, depths, delta=DELTA,
                            tau=TAU, max_vertices=None) -> TypeVerdict:
    """Build the Speiser graph, extend to Gamma_n, and combine the
    resistance-to-infinity trend with the nested-annuli test; the verdict is
    asserted for the surface via the Doyle-Merenkov criterion."""
    depths = list(depths)
    builder = extension_builder(family, n, max_vertices=max_vertices)
    res = resistance_to_infinity(builder, depths, delta=delta, tau=tau)
    # width-1 annuli on the deepest extension
    kwargs = {} if max_vertices is None else {"max_vertices": max_vertices}
    t = generate(family, depths[-1], **kwargs)
    sp = triangulate_and_dualize(t)
    ext = extend(sp, n, h=depths[-1])
    net = EdgeNetwork.from_extended(ext)
    dist = bfs_distance_field(net, ext.root)
    safe = min(dist[v] for v in ext.boundary_vertices()) - 1
    radii = list(range(1, max(2, safe)))
    annuli = shell_annuli(net.edges, dist, radii)
    ann = nested_annuli_test(net, annuli, delta=delta, validate=False)
    verdict = combine_verdicts(res, ann)
    notes = f"resistance: {res.verdict}; annuli: {ann.verdict}"
    if {res.verdict, ann.verdict} == {PARABOLIC, HYPERBOLIC}:
        notes += " (conflicting evidence)"
    return TypeVerdict(verdict=verdict, criterion="doyle-merenkov",
                       trace=res.trace, thresholds=res.thresholds,
                       notes=notes,
                       aux={"resistance": res, "annuli": ann})
