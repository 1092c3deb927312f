"""Textual graph format, tree-family files, and DOT export.

Graph format, one record per line:

    graph <name> <vertex_count>
    v <id> [<neighbor ids in cyclic order>] [key=value | flag]...
    root <id>
    frontier <id> <id> ...

Neighbor lists are cyclic (counterclockwise); parallel edges are paired in
reversed order across the two endpoint lists, so printing and re-parsing a
graph reproduces it up to rotation phase with identical vertex ids.
"""

from __future__ import annotations

from .planar import GraphError, RotationGraph, bfs_distances, build_graph
from .trees import TreeTruncation, builtin_family


class FormatError(ValueError):
    pass


def _canonical_phase(cyclic):
    if not cyclic:
        return cyclic
    best = None
    for i in range(len(cyclic)):
        cand = cyclic[i:] + cyclic[:i]
        if best is None or cand < best:
            best = cand
    return best


def print_graph(g: RotationGraph, name: str = None, root: int = None,
                frontier=None) -> str:
    lines = [f"graph {name or g.name or 'g'} {g.vertex_count}"]
    for v in range(g.vertex_count):
        nbrs = " ".join(str(w) for w in _canonical_phase(list(g.neighbors(v))))
        parts = [f"v {v} [{nbrs}]"]
        flags = g.vertex_flags(v)
        for key in sorted(flags):
            val = flags[key]
            parts.append(key if val == "1" else f"{key}={val}")
        lines.append(" ".join(parts))
    if root is not None:
        lines.append(f"root {root}")
    if frontier:
        lines.append("frontier " + " ".join(str(v) for v in sorted(frontier)))
    return "\n".join(lines) + "\n"


def print_tree(t: TreeTruncation, name: str = None) -> str:
    return print_graph(t.graph, name=name, root=t.root,
                       frontier=sorted(t.frontier))


def parse_graph(text: str):
    """Parse the textual format; returns (RotationGraph, meta dict)."""
    name = "g"
    count = None
    lists = {}
    flags = {}
    meta = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        kind = toks[0]
        if kind == "graph":
            if len(toks) != 3:
                raise FormatError(f"line {lineno}: bad graph header")
            name = toks[1]
            count = int(toks[2])
        elif kind == "v":
            if count is None:
                raise FormatError(f"line {lineno}: v before graph header")
            body = line[2:].strip()
            vid_str, rest = body.split("[", 1)
            vid = int(vid_str)
            inside, after = rest.split("]", 1)
            nbrs = [int(x) for x in inside.split()]
            lists[vid] = nbrs
            fl = {}
            for tok in after.split():
                if "=" in tok:
                    k, _, val = tok.partition("=")
                    fl[k] = val
                else:
                    fl[tok] = "1"
            if fl:
                flags[vid] = fl
        elif kind == "root":
            meta["root"] = int(toks[1])
        elif kind == "frontier":
            meta["frontier"] = [int(x) for x in toks[1:]]
        elif kind == "family":
            meta["family"] = toks[1]
            meta["params"] = dict(tok.partition("=")[::2] for tok in toks[2:])
        else:
            raise FormatError(f"line {lineno}: unknown record {kind!r}")
    if count is None and "family" in meta:
        return None, meta
    if count is None:
        raise FormatError("missing graph header")
    if sorted(lists) != list(range(count)):
        raise FormatError("vertex ids must be dense 0..n-1")
    g = build_graph(count, [lists[v] for v in range(count)],
                    flags=flags, name=name)
    return g, meta


def parse_tree(text: str) -> TreeTruncation:
    """Load a tree truncation: either a `family ...` line or an explicit
    truncation in the graph format with root/frontier records."""
    g, meta = parse_graph(text)
    if g is None:
        params = {k: int(v) if str(v).isdigit() else v
                  for k, v in meta.get("params", {}).items()}
        fam = builtin_family(meta["family"], **params)
        depth = int(params.get("depth", 6))
        from .trees import generate
        return generate(fam, depth)
    root = meta.get("root", 0)
    layer = bfs_distances(g, root)
    if min(layer) < 0 or g.edge_count != g.vertex_count - 1:
        raise FormatError("explicit truncation must be a connected tree")
    parent = [-1] * g.vertex_count
    for v in range(g.vertex_count):
        for w in g.neighbors(v):
            if layer[w] == layer[v] - 1:
                parent[v] = w
    frontier = {}
    for v in meta.get("frontier", []):
        pend = g.vertex_flags(v).get("frontier", "1")
        frontier[v] = int(pend) if pend != "1" else 1
    for v, fl in list(g.flags.items()):
        if "frontier" in fl and v not in frontier:
            frontier[v] = int(fl["frontier"]) if fl["frontier"].isdigit() else 1
    color = [l % 2 for l in layer]
    return TreeTruncation(graph=g, root=root, depth=max(layer),
                          frontier=frontier, color=color, layer=layer,
                          parent=parent, keys=[None] * g.vertex_count,
                          family=None)


_DOT_SHAPE = {"circle": "circle", "cross": "diamond"}


def to_dot(g: RotationGraph, name: str = None) -> str:
    """DOT export; vertex shape encodes circle/cross class, lattice vertices
    are points, frontier vertices are marked."""
    out = [f'graph "{name or g.name or "g"}" {{']
    out.append("  node [fontsize=9];")
    for v in range(g.vertex_count):
        fl = g.vertex_flags(v)
        attrs = []
        if "lattice" in fl:
            attrs.append("shape=point")
        else:
            shape = _DOT_SHAPE.get(fl.get("color", ""), "circle")
            attrs.append(f"shape={shape}")
            if fl.get("color") == "cross":
                attrs.append('label="x"')
        if "frontier" in fl:
            attrs.append("style=dashed")
        if "root" in fl:
            attrs.append("penwidth=2")
        out.append(f"  {v} [{', '.join(attrs)}];")
    for u, v in g.edges():
        out.append(f"  {u} -- {v};")
    out.append("}")
    return "\n".join(out) + "\n"
