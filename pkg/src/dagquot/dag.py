"""Finite colored DAGs: validation, reachability order, closure, enumeration.

Vertex ids are opaque strings in all I/O; internally they are mapped to
dense indices only where it matters for speed.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field


class DagError(ValueError):
    pass


class LoopEdgeError(DagError):
    pass


class DuplicateEdgeError(DagError):
    pass


class MissingColorError(DagError):
    pass


class UnknownVertexError(DagError):
    pass


class CycleFoundError(DagError):
    def __init__(self, cycle: list[str]):
        self.cycle = cycle
        super().__init__("cycle found: " + " -> ".join(cycle))


@dataclass(frozen=True)
class ColoredDag:
    """A finite simple digraph with a 0/1 color on every vertex."""

    vertices: tuple[str, ...]
    edges: frozenset[tuple[str, str]]
    color: dict[str, int] = field(compare=False)

    def has_edge(self, u: str, v: str) -> bool:
        return (u, v) in self.edges

    def successors(self, u: str) -> list[str]:
        return sorted(v for (s, v) in self.edges if s == u)

    def out_degree(self, u: str) -> int:
        return sum(1 for (s, _) in self.edges if s == u)


def colored_dag(vertices, edges, color) -> ColoredDag:
    d = ColoredDag(tuple(vertices), frozenset(tuple(e) for e in edges), dict(color))
    validate(d)
    return d


def validate(d: ColoredDag) -> None:
    """Simple + acyclic + totally colored, else a specific error."""
    vset = set(d.vertices)
    if len(vset) != len(d.vertices):
        raise DuplicateEdgeError("duplicate vertex id")
    for u, v in d.edges:
        if u not in vset or v not in vset:
            raise UnknownVertexError(f"edge ({u}, {v}) uses unknown vertex")
        if u == v:
            raise LoopEdgeError(f"loop edge at {u}")
    for v in d.vertices:
        if d.color.get(v) not in (0, 1):
            raise MissingColorError(f"vertex {v} has no 0/1 color")
    _check_acyclic(d)


def _check_acyclic(d: ColoredDag) -> None:
    # iterative DFS with a path stack so a cycle witness can be reported
    WHITE, GRAY, BLACK = 0, 1, 2
    state = {v: WHITE for v in d.vertices}
    for root in d.vertices:
        if state[root] != WHITE:
            continue
        stack: list[tuple[str, list[str]]] = [(root, d.successors(root))]
        state[root] = GRAY
        path = [root]
        while stack:
            v, succs = stack[-1]
            if succs:
                nxt = succs.pop(0)
                if state[nxt] == GRAY:
                    cycle = path[path.index(nxt):] + [nxt]
                    raise CycleFoundError(cycle)
                if state[nxt] == WHITE:
                    state[nxt] = GRAY
                    path.append(nxt)
                    stack.append((nxt, d.successors(nxt)))
            else:
                state[v] = BLACK
                path.pop()
                stack.pop()


def leq(d: ColoredDag, u: str, v: str) -> bool:
    """True iff a directed path u -> ... -> v exists (reflexive)."""
    if u not in d.color or v not in d.color:
        raise UnknownVertexError(f"unknown vertex in leq({u}, {v})")
    if u == v:
        return True
    seen = {u}
    frontier = [u]
    while frontier:
        nxt = []
        for s in frontier:
            for t in d.successors(s):
                if t == v:
                    return True
                if t not in seen:
                    seen.add(t)
                    nxt.append(t)
        frontier = nxt
    return False


def transitive_closure(d: ColoredDag) -> ColoredDag:
    validate(d)
    closed = set()
    for u in d.vertices:
        for v in d.vertices:
            if u != v and leq(d, u, v):
                closed.add((u, v))
    return ColoredDag(d.vertices, frozenset(closed), dict(d.color))


def maximal_vertices(d: ColoredDag) -> list[str]:
    """Vertices with no outgoing edges, sorted by id; nonempty when d is."""
    if not d.vertices:
        raise DagError("empty DAG has no maximal vertex")
    return sorted(v for v in d.vertices if d.out_degree(v) == 0)


def enumerate_colored_dags(order: int, cap: int = 3):
    """Every labeled simple DAG on vertices '1'..'<order>' with every coloring."""
    if order > cap:
        raise DagError(f"order {order} exceeds enumeration cap {cap}")
    ids = [str(i) for i in range(1, order + 1)]
    pairs = [(u, v) for u in ids for v in ids if u != v]
    for mask in range(1 << len(pairs)):
        edges = frozenset(p for i, p in enumerate(pairs) if mask >> i & 1)
        d = ColoredDag(tuple(ids), edges, {v: 0 for v in ids})
        try:
            _check_acyclic(d)
        except CycleFoundError:
            continue
        for colors in itertools.product((0, 1), repeat=order):
            yield ColoredDag(tuple(ids), edges, dict(zip(ids, colors)))


def random_colored_dag(order: int, rng: random.Random, edge_prob: float = 0.5) -> ColoredDag:
    """A random labeled colored DAG: edges oriented along a random permutation."""
    ids = [str(i) for i in range(1, order + 1)]
    perm = ids[:]
    rng.shuffle(perm)
    rank = {v: i for i, v in enumerate(perm)}
    edges = set()
    for u in ids:
        for v in ids:
            if rank[u] < rank[v] and rng.random() < edge_prob:
                edges.add((u, v))
    color = {v: rng.randint(0, 1) for v in ids}
    return ColoredDag(tuple(ids), frozenset(edges), color)


def to_json(d: ColoredDag) -> dict:
    return {
        "vertices": [{"id": v, "color": d.color[v]} for v in d.vertices],
        "edges": [[u, v] for u, v in sorted(d.edges)],
    }


def from_json(data) -> ColoredDag:
    try:
        vertices = [str(entry["id"]) for entry in data["vertices"]]
        color = {str(entry["id"]): entry["color"] for entry in data["vertices"]}
        raw_edges = [tuple(str(x) for x in e) for e in data["edges"]]
    except (KeyError, TypeError) as exc:
        raise DagError(f"malformed DAG JSON: {exc}") from exc
    if len(set(raw_edges)) != len(raw_edges):
        seen = set()
        for e in raw_edges:
            if e in seen:
                raise DuplicateEdgeError(f"duplicate edge {e}")
            seen.add(e)
    d = ColoredDag(tuple(vertices), frozenset(raw_edges), color)
    validate(d)
    return d


def load(path) -> ColoredDag:
    with open(path, encoding="utf-8") as fh:
        return from_json(json.load(fh))


def to_dot(d: ColoredDag) -> str:
    """DOT form; color-1 vertices get a doubled border."""
    lines = ["digraph colored_dag {"]
    for v in d.vertices:
        extra = ", peripheries=2" if d.color[v] == 1 else ""
        lines.append(f'  "{v}" [label="{v} (c={d.color[v]})"{extra}];')
    for u, v in sorted(d.edges):
        lines.append(f'  "{u}" -> "{v}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
