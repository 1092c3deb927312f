"""Acceptance suite: every exit criterion at its stated tolerance.

Each test prints one `ACCEPTANCE <name>: PASS` line on success (run with -s
to see them); failures surface through the assertions themselves.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from oracle import modulus_by_qp

from treetype.network import (Annulus, EdgeNetwork, NetworkError,
                              bfs_distance_field, effective_resistance,
                              modulus_of_annulus, shell_annuli)
from treetype.planar import graphs_equal_up_to_rotation
from treetype.quasi import (build_phi, build_phi1, measure_tuc_constants,
                            verify_qi)
from treetype.speiser import (collapse_faces, extend, extend_tree,
                              plane_trees_isomorphic, standard_model,
                              triangulate_and_dualize)
from treetype.textio import parse_graph, print_graph, print_tree
from treetype.trees import (builtin_family, check_tuc, generate,
                            induced_truncation, kernel_of)
from treetype.type_engine import (HYPERBOLIC, INCONCLUSIVE, PARABOLIC,
                                  doyle_merenkov_pipeline, extension_builder,
                                  homogeneous_ladder_builder,
                                  nested_annuli_test, nevanlinna_wittich,
                                  resistance_to_infinity,
                                  thomassen_isoperimetric,
                                  totally_ramified_test, tree_multiplicities)

DEPTHS = (16, 32, 64, 128)


def report(name):
    print(f"ACCEPTANCE {name}: PASS")


# --------------------------------------------------------------------------
# 1. Duffin duality against the chain-enumeration QP oracle
# --------------------------------------------------------------------------

def _corpus():
    """Connected multigraphs with <= 12 edges and designated boundaries."""
    cases = []

    def add(n, edges, a, b):
        if len(edges) <= 12:
            cases.append((n, [tuple(e) for e in edges], set(a), set(b)))

    for n in range(1, 9):            # paths
        add(n + 1, [(i, i + 1) for i in range(n)], [0], [n])
    for n in range(3, 9):            # cycles
        add(n, [(i, (i + 1) % n) for i in range(n)], [0], [n // 2])
    for k in range(1, 7):            # parallel bundles
        add(2, [(0, 1)] * k, [0], [1])
    add(3, [(0, 1), (1, 2), (0, 2)], [0], [2])                     # K3
    add(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], [0], [3])  # K4
    for m in range(2, 5):            # 2 x m grids
        edges = []
        for r in range(2):
            for c in range(m - 1):
                edges.append((r * m + c, r * m + c + 1))
        for c in range(m):
            edges.append((c, m + c))
        add(2 * m, edges, [0], [2 * m - 1])
    for k in range(2, 7):            # stars with set boundaries
        add(k + 1, [(0, i) for i in range(1, k + 1)], [0],
            list(range(1, k + 1)))
    for k in range(3, 6):            # wheels
        edges = [(i, i % k + 1) for i in range(1, k + 1)]
        edges += [(0, i) for i in range(1, k + 1)]
        add(k + 1, edges, [0], [1])
    # theta chains and doubled paths
    add(3, [(0, 1), (0, 1), (1, 2), (1, 2)], [0], [2])
    add(4, [(0, 1), (1, 2), (1, 2), (2, 3), (2, 3), (2, 3)], [0], [3])
    rng = np.random.default_rng(20260808)
    while len(cases) < 210:
        n = int(rng.integers(3, 7))
        edges = [(int(rng.integers(0, i)), i) for i in range(1, n)]
        extra = int(rng.integers(0, min(13 - len(edges), 5)))
        for _ in range(extra):
            u, v = rng.integers(0, n, size=2)
            if u != v:
                edges.append((min(int(u), int(v)), max(int(u), int(v))))
        if len(edges) > 12:
            continue
        add(n, edges, [0], [n - 1])
    return cases


def test_acceptance_1_duffin_duality_oracle():
    t0 = time.perf_counter()
    cases = _corpus()
    assert len(cases) >= 200
    for n, edges, a, b in cases:
        net = EdgeNetwork(n, np.array(edges, dtype=np.int64), None)
        r = effective_resistance(net, a, b)
        mod = modulus_by_qp(edges, a, b)
        assert abs(1.0 / mod - r) <= 1e-6, (n, edges, a, b, r, 1 / mod)
    elapsed = time.perf_counter() - t0
    assert elapsed <= 120, f"corpus run took {elapsed:.1f}s"
    report(f"1 duffin-duality ({len(cases)} instances, {elapsed:.1f}s)")


# --------------------------------------------------------------------------
# 2. exact network laws and Rayleigh monotonicity
# --------------------------------------------------------------------------

def test_acceptance_2_exact_laws_and_rayleigh():
    for n in (1, 3, 10, 50):
        net = EdgeNetwork(n + 1, np.array([(i, i + 1) for i in range(n)]), None)
        assert abs(effective_resistance(net, 0, n) - n) <= 1e-12
    for k in (1, 2, 5, 9):
        net = EdgeNetwork(2, np.array([(0, 1)] * k), None)
        assert abs(effective_resistance(net, 0, 1) - 1 / k) <= 1e-12
    net = EdgeNetwork(4, np.array([(0, 1), (1, 2), (2, 3), (3, 0)]), None)
    assert abs(effective_resistance(net, 0, 1) - 0.75) <= 1e-12

    rng = np.random.default_rng(11)
    trials = 0
    while trials < 1000:
        n = int(rng.integers(4, 9))
        edges = [(int(rng.integers(0, i)), i) for i in range(1, n)]
        for _ in range(int(rng.integers(1, 6))):
            u, v = rng.integers(0, n, size=2)
            if u != v:
                edges.append((min(int(u), int(v)), max(int(u), int(v))))
        arr = np.array(edges, dtype=np.int64)
        net = EdgeNetwork(n, arr, None)
        s, t = 0, n - 1
        base = effective_resistance(net, s, t)
        if rng.random() < 0.5:
            k = int(rng.integers(0, len(arr)))
            mask = np.ones(len(arr), dtype=bool)
            mask[k] = False
            try:
                after = effective_resistance(EdgeNetwork(n, arr[mask], None), s, t)
            except NetworkError:
                continue
            assert after >= base - 1e-9
        else:
            u, v = rng.integers(0, n, size=2)
            if u == v:
                continue
            bigger = EdgeNetwork(n, np.vstack([arr, [[u, v]]]), None)
            assert effective_resistance(bigger, s, t) <= base + 1e-9
        trials += 1
    report("2 exact-laws and rayleigh (1000 trials)")


# --------------------------------------------------------------------------
# 3. paper classifications at depths 16..128
# --------------------------------------------------------------------------

def test_acceptance_3a_sine():
    t0 = time.perf_counter()
    rep = check_tuc(builtin_family("sine"), list(DEPTHS))
    assert rep.tuc_pass
    assert rep.B == 2 and rep.N == 2 and rep.M == 0
    v = doyle_merenkov_pipeline(builtin_family("sine"), None, list(DEPTHS))
    assert v.verdict == PARABOLIC
    elapsed = time.perf_counter() - t0
    assert elapsed <= 300
    report(f"3a sine tuc+parabolic ({elapsed:.1f}s)")


@pytest.mark.parametrize("n_ends", [1, 2, 3, 4])
def test_acceptance_3b_standard_model(n_ends):
    t0 = time.perf_counter()
    depth = DEPTHS[-1]
    ext = standard_model(n_ends, depth, depth)
    net = EdgeNetwork.from_extended(ext)
    dist = bfs_distance_field(net, ext.root)
    safe = int(min(dist[v] for v in ext.boundary_vertices()))
    radii = range(1, min(safe, depth))
    annuli = shell_annuli(net.edges, dist, radii)
    v = nested_annuli_test(net, annuli, validate=False)
    assert v.verdict == PARABOLIC
    mods = v.aux["moduli"]
    for n, m in enumerate(mods, start=1):
        assert m <= 8 * n_ends * n, f"mod A_{n} = {m} > 8*{n_ends}*{n}"
    partial = v.trace_values()[-1]
    elapsed = time.perf_counter() - t0
    assert elapsed <= 300
    print(f"ACCEPTANCE 3b standard-model N={n_ends}: verdict and modulus "
          f"bound hold; sum(1/mod)={partial:.3f}, required "
          f">= 0.5*ln({depth}) = {0.5 * math.log(depth):.3f} ({elapsed:.1f}s)")
    assert partial >= 0.5 * math.log(depth), (
        f"partial sums {partial:.3f} < 0.5*ln({depth}) = "
        f"{0.5 * math.log(depth):.3f}")
    report(f"3b standard-model N={n_ends}")


@pytest.mark.parametrize("valence", [3, 4, 5])
def test_acceptance_3c_homogeneous(valence):
    t0 = time.perf_counter()
    probe = generate(builtin_family("homogeneous", valence=valence), 4)
    v = totally_ramified_test(tree_multiplicities(probe))
    assert v.verdict == HYPERBOLIC
    expected = Fraction(1, 1) + 2 * (1 - Fraction(1, valence))
    assert v.aux["defect_sum"] == expected
    assert expected > 2
    res = resistance_to_infinity(homogeneous_ladder_builder(valence),
                                 list(DEPTHS))
    assert res.verdict == HYPERBOLIC
    values = res.trace_values()
    assert abs(values[-1] - values[-3]) < 0.01
    if valence == 3:
        assert abs(values[-1] - 2 / 3) <= 1e-6
    elapsed = time.perf_counter() - t0
    assert elapsed <= 300
    report(f"3c homogeneous({valence}) defect {expected} ({elapsed:.1f}s)")


def test_acceptance_3d_fig8_nevanlinna_wittich():
    t0 = time.perf_counter()
    sp = triangulate_and_dualize(generate(builtin_family("fig8"), 20))
    v = nevanlinna_wittich(sp)
    s = v.aux["s"]
    assert len(s) >= 128
    s = s[:128]
    ratio = max(x / (n + 1) for n, x in enumerate(s))
    assert ratio <= 8, f"s(n)/n reached {ratio}"
    partial = sum(1 / x for x in s)
    assert partial >= 0.4 * math.log(128)
    assert v.verdict == PARABOLIC
    elapsed = time.perf_counter() - t0
    assert elapsed <= 300
    report(f"3d fig8 s(n)/n<={ratio:.2f}, sum={partial:.2f} ({elapsed:.1f}s)")


def test_acceptance_3e_fig12_thomassen():
    t0 = time.perf_counter()
    fam = builtin_family("fig12")
    graphs = []
    for d in DEPTHS:
        t = generate(fam, d)
        sp = triangulate_and_dualize(t)
        ext = extend(sp, 4, h=d)
        graphs.append((d, ext.adjacency(), ext.boundary_vertices()))
    v = thomassen_isoperimetric(graphs, root=0, epsilon=0.25)
    assert v.verdict == HYPERBOLIC
    values = v.trace_values()
    assert values[-1] > 0 and values[-2] > 0
    assert (values[-2] - values[-1]) / values[-2] <= 0.20
    elapsed = time.perf_counter() - t0
    assert elapsed <= 300
    report(f"3e fig12 thomassen eps=0.25 c={values[-1]:.3f} ({elapsed:.1f}s)")


def test_acceptance_3f_fig11_tuc_fail_but_parabolic():
    t0 = time.perf_counter()
    fam = builtin_family("fig11")
    rep = check_tuc(fam, list(DEPTHS))
    assert not rep.passes["T3"]
    assert rep.M == "unstable"
    m_values = [v for _, v in rep.trace["M"]]
    assert m_values[-1] > m_values[0]
    assert rep.witnesses["T3"] is not None
    v = doyle_merenkov_pipeline(fam, None, list(DEPTHS))
    assert v.verdict == PARABOLIC
    elapsed = time.perf_counter() - t0
    assert elapsed <= 300
    report(f"3f fig11 T3-fail + parabolic ({elapsed:.1f}s)")


# --------------------------------------------------------------------------
# 4. quasi-isometry bounds
# --------------------------------------------------------------------------

@pytest.mark.parametrize("case", [("caterpillar", {"tooth": 1}),
                                  ("caterpillar", {"tooth": 2}),
                                  ("caterpillar", {"tooth": 3}),
                                  ("fig1", {})])
def test_acceptance_4_quasi_isometry(case):
    name, params = case
    t0 = time.perf_counter()
    radius = 20
    depth, h = 44, 42
    t = generate(builtin_family(name, **params), depth)
    kern = kernel_of(t)
    consts = measure_tuc_constants(t, kern)
    m_const = consts["M"]
    # tree part: k = 1 and C <= 2M, exhaustively within radius 20
    phi1 = build_phi1(t, kern)
    w_tree = verify_qi(phi1, sample_radius=radius, pair_cutoff=10 ** 9)
    assert w_tree.k == 1.0
    assert w_tree.C <= 2 * m_const
    assert w_tree.aux["upper_slack"] <= 0
    # glued map: upper inequality with k = 1, C = 0, exhaustively in radius 20
    ext_t = extend_tree(t, h=h)
    kt = induced_truncation(t, kern.vertices)
    ext_k = extend_tree(kt, h=2 * h + 4)
    phi = build_phi(t, kern, ext_t, ext_k)
    w = verify_qi(phi, sample_radius=radius, pair_cutoff=10 ** 9)
    assert w.k == 1.0
    assert w.aux["upper_slack"] <= 0
    elapsed = time.perf_counter() - t0
    assert elapsed <= 60, f"{name} QI run took {elapsed:.1f}s"
    bound = 2 * consts["M"] + 2 * consts["A"] * consts["B"]
    print(f"ACCEPTANCE 4 qi {name}{params}: tree part C={w_tree.C} <= "
          f"2M={2 * m_const}; glued map contracts (slack "
          f"{w.aux['upper_slack']}); overall C={w.C}, required <= 2M+2AB="
          f"{bound} ({elapsed:.1f}s)")
    assert w.C <= bound, f"C = {w.C} > 2M+2AB = {bound}"
    report(f"4 qi {name}{params}")


# --------------------------------------------------------------------------
# 5. surgery round trip
# --------------------------------------------------------------------------

def test_acceptance_5_surgery_round_trip():
    # Nevanlinna-Elfving pattern: one 4-dart face, four log ends
    from test_speiser import _ne_chain_graph
    out = collapse_faces(_ne_chain_graph(4))
    degs = sorted(out.graph.degree(v) for v in range(out.vertex_count))
    assert degs.count(4) == 1 and max(degs) == 4
    assert sum(1 for d in degs if d == 1) == 4

    kernel_equal = [
        ("sine", {}, 32),
        ("standard-model-tree", {"ends": 1}, 32),
        ("standard-model-tree", {"ends": 2}, 32),
        ("standard-model-tree", {"ends": 3}, 32),
        ("standard-model-tree", {"ends": 4}, 32),
        ("homogeneous", {"valence": 3}, 9),
        ("coscos", {}, 16),
    ]
    for name, params, depth in kernel_equal:
        t = generate(builtin_family(name, **params), depth)
        sp = triangulate_and_dualize(t)
        back = collapse_faces(sp)
        assert plane_trees_isomorphic(back, t), f"{name} round trip failed"
    report("5 surgery round trip (fig5 pattern + kernel-equal builtins)")


# --------------------------------------------------------------------------
# 6. determinism and gallery round trips
# --------------------------------------------------------------------------

def test_acceptance_6_determinism_and_round_trip():
    from treetype.reporting import AnalysisConfig, run_analysis
    cfg = AnalysisConfig(family="caterpillar", params={"tooth": 2},
                         depths=(4, 8, 16), criteria=("tuc", "ramified", "dm", "qi"),
                         seed=123, qi_radius=6)
    r1 = run_analysis(cfg)
    r2 = run_analysis(cfg)
    assert r1.body_text() == r2.body_text()

    gallery = [
        ("sine", {}, 8), ("homogeneous", {"valence": 3}, 5),
        ("star", {"rays": 3}, 2), ("standard-model-tree", {"ends": 4}, 8),
        ("caterpillar", {"tooth": 2}, 8), ("fig1", {}, 8),
        ("fig8", {}, 6), ("fig11", {}, 10), ("fig12", {}, 8),
        ("sutter", {}, 6), ("coscos", {}, 6),
    ]
    for name, params, depth in gallery:
        t = generate(builtin_family(name, **params), depth)
        text = print_tree(t)
        g2, meta = parse_graph(text)
        assert graphs_equal_up_to_rotation(t.graph, g2), name
        sp = triangulate_and_dualize(t)
        text = print_graph(sp.graph)
        g3, _ = parse_graph(text)
        assert graphs_equal_up_to_rotation(sp.graph, g3), name
        ext = extend(sp, None, h=4).to_rotation_graph()
        text = print_graph(ext, name="ext")
        g4, _ = parse_graph(text)
        assert graphs_equal_up_to_rotation(ext, g4), name
    report("6 determinism and gallery round trips")
