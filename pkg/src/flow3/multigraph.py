"""Loopless multigraphs with indexed parallel edges.

Vertices are the integers ``0..n-1``; edges are kept in insertion order and
addressed by their position (the edge id).  Every structural operation that
removes or merges things returns explicit vertex/edge maps so orientations of
the smaller graph can be pulled back onto the larger one.
"""

from __future__ import annotations

import hashlib
import math
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

Edge = Tuple[int, int]


class GraphError(ValueError):
    """Raised for malformed graphs or violated operation preconditions."""


@dataclass(frozen=True)
class MultiGraph:
    n: int
    edges: Tuple[Edge, ...] = ()

    def __post_init__(self):
        if self.n < 0:
            raise GraphError("vertex count must be nonnegative")
        edges = tuple((int(u), int(v)) for u, v in self.edges)
        for i, (u, v) in enumerate(edges):
            if u == v:
                raise GraphError(f"edge {i} is a loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge {i} = ({u}, {v}) out of range for n={self.n}")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[Edge]) -> "MultiGraph":
        return cls(n, tuple(pairs))

    @classmethod
    def from_multiplicities(cls, n: int, mult: Dict[Edge, int]) -> "MultiGraph":
        edges = []
        for (u, v), k in sorted(mult.items()):
            edges.extend([(u, v)] * k)
        return cls(n, tuple(edges))

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def incidence(self) -> Tuple[Tuple[int, ...], ...]:
        inc: List[List[int]] = [[] for _ in range(self.n)]
        for i, (u, v) in enumerate(self.edges):
            inc[u].append(i)
            inc[v].append(i)
        return tuple(tuple(x) for x in inc)

    @cached_property
    def pair_classes(self) -> Dict[Edge, Tuple[int, ...]]:
        """Parallel classes keyed by the sorted endpoint pair."""
        classes: Dict[Edge, List[int]] = defaultdict(list)
        for i, (u, v) in enumerate(self.edges):
            classes[(min(u, v), max(u, v))].append(i)
        return {k: tuple(v) for k, v in sorted(classes.items())}

    def degree(self, v: int) -> int:
        return len(self.incidence[v])

    def degrees(self) -> List[int]:
        return [len(x) for x in self.incidence]

    def other(self, e: int, v: int) -> int:
        u, w = self.edges[e]
        if v == u:
            return w
        if v == w:
            return u
        raise GraphError(f"vertex {v} is not an endpoint of edge {e}")

    def edges_between(self, u: int, v: int) -> Tuple[int, ...]:
        return self.pair_classes.get((min(u, v), max(u, v)), ())

    def multiplicity(self, u: int, v: int) -> int:
        return len(self.edges_between(u, v))

    def neighbors(self, v: int) -> List[int]:
        return sorted({self.other(e, v) for e in self.incidence[v]})

    def is_simple(self) -> bool:
        return all(len(c) == 1 for c in self.pair_classes.values())

    def components(self) -> List[List[int]]:
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            seen[s] = True
            stack, comp = [s], []
            while stack:
                x = stack.pop()
                comp.append(x)
                for e in self.incidence[x]:
                    y = self.other(e, x)
                    if not seen[y]:
                        seen[y] = True
                        stack.append(y)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.components()) == 1

    def edges_within(self, vertices: Iterable[int]) -> List[int]:
        s = set(vertices)
        return [i for i, (u, v) in enumerate(self.edges) if u in s and v in s]

    def subgraph(self, vertices: Sequence[int], edge_ids: Sequence[int]) -> "MultiGraph":
        """Subgraph on ``vertices`` (relabelled in sorted order) using ``edge_ids`` in the given order."""
        order = sorted(vertices)
        index = {v: i for i, v in enumerate(order)}
        pairs = []
        for e in edge_ids:
            u, v = self.edges[e]
            if u not in index or v not in index:
                raise GraphError(f"edge {e} leaves the vertex set")
            pairs.append((index[u], index[v]))
        return MultiGraph(len(order), tuple(pairs))

    def induced(self, vertices: Sequence[int]) -> "MultiGraph":
        return self.subgraph(vertices, self.edges_within(vertices))

    def add_edges(self, pairs: Iterable[Edge]) -> "MultiGraph":
        return MultiGraph(self.n, self.edges + tuple(pairs))

    def canonical_text(self) -> str:
        """Edge-list text with edges normalised and sorted; stable input for hashing."""
        lines = [f"p mgraph {self.n} {self.m}"]
        for u, v in sorted((min(u, v), max(u, v)) for u, v in self.edges):
            lines.append(f"e {u} {v}")
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()

    def to_networkx(self) -> nx.Graph:
        h = nx.Graph()
        h.add_nodes_from(range(self.n))
        for (u, v), ids in self.pair_classes.items():
            h.add_edge(u, v, capacity=len(ids))
        return h


@dataclass(frozen=True)
class ContractionResult:
    graph: MultiGraph
    vertex_map: Tuple[int, ...]
    edge_map: Dict[int, int] = field(default_factory=dict)
    merged: int = 0  # id of the contracted vertex in ``graph``


@dataclass(frozen=True)
class SplitResult:
    """Outcome of deleting ``v`` and replacing reserved edge pairs at ``v`` by new edges."""

    graph: MultiGraph
    vertex_map: Tuple[Optional[int], ...]
    edge_map: Dict[int, int]
    v: int
    pairs: Tuple[Tuple[int, int], ...]
    new_edges: Tuple[int, ...]
    free_edges: Tuple[int, ...]


def complement(g: MultiGraph) -> MultiGraph:
    if not g.is_simple():
        raise GraphError("complement is undefined for graphs with parallel edges")
    present = set(g.pair_classes)
    pairs = [(u, v) for u in range(g.n) for v in range(u + 1, g.n) if (u, v) not in present]
    return MultiGraph(g.n, tuple(pairs))


def contract(g: MultiGraph, a: Iterable[int]) -> ContractionResult:
    """Identify the vertices of ``a`` and drop the resulting loops.

    The merged vertex takes the slot of ``min(a)``; all other vertices keep
    their relative order, and surviving edges keep theirs.  With this
    numbering, contracting ``A`` and then ``{w, v}`` yields exactly the same
    graph as contracting ``A | {v}`` at once.
    """
    aset = set(a)
    if not aset:
        raise GraphError("cannot contract an empty vertex set")
    if not all(0 <= x < g.n for x in aset):
        raise GraphError("contracted set contains unknown vertices")
    first = min(aset)
    vmap = [0] * g.n
    nxt = 0
    for x in range(g.n):
        if x in aset and x != first:
            continue
        vmap[x] = nxt
        nxt += 1
    for x in aset:
        vmap[x] = vmap[first]
    pairs, emap = [], {}
    for i, (u, v) in enumerate(g.edges):
        if u in aset and v in aset:
            continue
        emap[i] = len(pairs)
        pairs.append((vmap[u], vmap[v]))
    return ContractionResult(MultiGraph(nxt, tuple(pairs)), tuple(vmap), emap, vmap[first])


def split_vertex(g: MultiGraph, v: int, pairs: Sequence[Tuple[int, int]]) -> SplitResult:
    """Delete ``v``; every reserved pair ``(va, vb)`` of incident edges becomes one new edge ``ab``."""
    inc = set(g.incidence[v])
    used = [e for p in pairs for e in p]
    if len(set(used)) != len(used):
        raise GraphError("reserved edges must be distinct")
    ends = []
    for ea, eb in pairs:
        if ea not in inc or eb not in inc:
            raise GraphError(f"edges {ea}, {eb} are not both incident to vertex {v}")
        a, b = g.other(ea, v), g.other(eb, v)
        if a == b:
            raise GraphError(f"reserved pair at {v} would create a loop at {a}")
        ends.append((a, b))
    vmap: List[Optional[int]] = [None] * g.n
    nxt = 0
    for x in range(g.n):
        if x != v:
            vmap[x] = nxt
            nxt += 1
    new_pairs, emap = [], {}
    for i, (x, y) in enumerate(g.edges):
        if i in inc:
            continue
        emap[i] = len(new_pairs)
        new_pairs.append((vmap[x], vmap[y]))
    new_ids = []
    for a, b in ends:
        new_ids.append(len(new_pairs))
        new_pairs.append((vmap[a], vmap[b]))
    free = tuple(e for e in g.incidence[v] if e not in set(used))
    return SplitResult(
        MultiGraph(nxt, tuple(new_pairs)), tuple(vmap), emap, v,
        tuple(tuple(p) for p in pairs), tuple(new_ids), free,
    )


def pick_pair(g: MultiGraph, v: int, a: int, b: int, taken: Iterable[int] = ()) -> Tuple[int, int]:
    """Lowest-id unused edges ``va`` and ``vb``."""
    taken = set(taken)
    ea = next((e for e in g.edges_between(v, a) if e not in taken), None)
    if ea is None:
        raise GraphError(f"no free edge between {v} and {a}")
    taken.add(ea)
    eb = next((e for e in g.edges_between(v, b) if e not in taken), None)
    if eb is None:
        raise GraphError(f"no free edge between {v} and {b}")
    return ea, eb


def delete_vertex_add_edge(
    g: MultiGraph, v: int, a: int, b: int, ea: Optional[int] = None, eb: Optional[int] = None
) -> SplitResult:
    """``G - v + ab``; the consumed copies of ``va``/``vb`` default to the lowest ids."""
    if a == b:
        raise GraphError("a == b would create a loop")
    if v in (a, b):
        raise GraphError("a and b must differ from v")
    if ea is None or eb is None:
        ea, eb = pick_pair(g, v, a, b)
    return split_vertex(g, v, [(ea, eb)])


def cross_edge_count(g: MultiGraph, x: Iterable[int], y: Iterable[int]) -> int:
    xs, ys = set(x), set(y)
    if xs & ys:
        raise GraphError("vertex sets must be disjoint")
    return sum(1 for u, v in g.edges if (u in xs and v in ys) or (u in ys and v in xs))


def min_degree(g: MultiGraph) -> int:
    return min(g.degrees()) if g.n else 0


def min_degree_pair(g: MultiGraph) -> int:
    """``min(δ(G), δ(G^c))`` for a simple graph."""
    return min(min_degree(g), min_degree(complement(g)))


def min_cut(g: MultiGraph) -> Tuple[float, frozenset]:
    """Global minimum edge cut as ``(size, side)``.

    ``side`` is the part not containing vertex 0.  Single-vertex graphs give
    ``(inf, {})``; disconnected graphs give ``0`` and a component.
    """
    if g.n <= 1:
        return math.inf, frozenset()
    comps = g.components()
    if len(comps) > 1:
        return 0, frozenset(comps[-1])
    value, (part_a, part_b) = nx.stoer_wagner(g.to_networkx(), weight="capacity")
    side = part_b if 0 in part_a else part_a
    return value, frozenset(side)


def edge_connectivity(g: MultiGraph) -> float:
    return min_cut(g)[0]
