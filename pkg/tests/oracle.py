"""Independent brute-force oracles used only by the test suite."""

from collections import deque

import numpy as np


def all_pairs_shortest(neighbor_lists):
    """Plain BFS all-pairs distance table; -1 where unreachable."""
    n = len(neighbor_lists)
    table = [[-1] * n for _ in range(n)]
    for s in range(n):
        row = table[s]
        row[s] = 0
        q = deque([s])
        while q:
            x = q.popleft()
            for y in neighbor_lists[x]:
                if row[y] == -1:
                    row[y] = row[x] + 1
                    q.append(y)
    return table


def enumerate_simple_chains(edges, sources, targets):
    """All vertex-simple edge chains from a source vertex to a target vertex.

    edges: list of (u, v) with implicit edge index; parallel edges allowed.
    Returns a list of edge-index tuples.
    """
    sources = set(sources)
    targets = set(targets)
    incidence = {}
    for i, (u, v) in enumerate(edges):
        incidence.setdefault(u, []).append((i, v))
        incidence.setdefault(v, []).append((i, u))
    chains = []

    def walk(vertex, used_vertices, chain):
        if vertex in targets:
            chains.append(tuple(chain))
            return
        for ei, w in incidence.get(vertex, ()):
            if w in used_vertices or (w in sources):
                continue
            used_vertices.add(w)
            chain.append(ei)
            walk(w, used_vertices, chain)
            chain.pop()
            used_vertices.remove(w)

    for s in sources:
        walk(s, set([s]), [])
    return chains


def modulus_by_qp(edges, sources, targets, tol=1e-8, max_iter=200000):
    """Combinatorial modulus of the chain family joining sources to targets.

    Solves  min sum m(e)^2  s.t.  sum_{e in chain} m(e) >= 1 for every simple
    chain, by projected gradient ascent on the dual.  Independent of the
    network solver; exact up to `tol` on small instances.
    """
    chains = enumerate_simple_chains(edges, sources, targets)
    if not chains:
        raise ValueError("no chain joins the boundary sets")
    ne = len(edges)
    C = np.zeros((len(chains), ne))
    for r, chain in enumerate(chains):
        for ei in chain:
            C[r, ei] += 1.0
    # dual: maximize sum(lam) - (1/4)||C^T lam||^2 over lam >= 0;
    # primal optimum m = (1/2) C^T lam.
    G = C @ C.T
    step = 1.0 / (2.0 * max(np.linalg.eigvalsh(G).max(), 1e-12))
    lam = np.zeros(len(chains))
    for _ in range(max_iter):
        grad = 1.0 - 0.5 * (G @ lam)
        new = np.maximum(lam + step * grad, 0.0)
        if np.max(np.abs(new - lam)) < tol * 1e-2:
            lam = new
            break
        lam = new
    m = 0.5 * (C.T @ lam)
    # feasibility clean-up: scale up if any chain is slightly uncovered
    cover = C @ m
    worst = cover.min()
    if worst <= 0:
        raise ValueError("projected gradient failed to cover chains")
    m = m / worst
    return float(np.sum(m * m))
