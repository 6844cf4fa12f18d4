"""Named graphs and families with constructive orientation providers.

Each provider rebuilds its answer through a reduction chain that mirrors
how membership in S3 is argued for that family: digon plus adjusting edges
for ``mK2``, a parallel-class contraction for the 7-edge triangles, a vertex
split down to ``K3^1`` for ``K4*``, ten splits down to ``K4*`` for
``K_{4,10}``, and a 3-closure on top of that for larger ``K_{m,n}``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import partial
from typing import Dict, List, Optional, Sequence, Tuple

from .multigraph import GraphError, MultiGraph, edge_connectivity, pick_pair, split_vertex
from .orientation import Boundary, find_sc_beta_orientation, is_s3
from .reduction import (
    Chain,
    LiftError,
    OrientationProvider,
    ReductionStep,
    base_chain,
    closure_steps,
    compute_cl3,
    pair_split_step,
    reduce_step,
    run_steps,
    vertex_split_step,
)

IN_S3 = "in_S3"
NOT_IN_S3 = "not_in_S3"
PHI_LT_3 = "phi_lt_3"
PHI_EQ_3 = "phi_eq_3"


@dataclass
class CatalogEntry:
    name: str
    graph: MultiGraph
    claimed_status: str
    provider: Optional[OrientationProvider] = None
    meta: Dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# solvers
# ---------------------------------------------------------------------------


def solve_oracle(g: MultiGraph, beta: Boundary) -> Chain:
    out = find_sc_beta_orientation(g, beta)
    if out.found is None:
        raise LiftError(f"oracle found no strongly connected orientation (exhaustive={out.exhaustive})")
    return base_chain(g, beta, out.found, "oracle")


def solve_trivial(g: MultiGraph, beta: Boundary) -> Chain:
    if g.n != 1:
        raise LiftError(f"expected a single vertex, got {g.n}")
    return base_chain(g, beta, (), "trivial")


def solve_mk2(g: MultiGraph, beta: Boundary) -> Chain:
    """A digon on the first two edges; the remaining ``m - 2`` edges fix the residue at vertex 0."""
    if g.n != 2 or g.m < 4:
        raise LiftError(f"mK2 construction needs 2 vertices and m >= 4, got n={g.n} m={g.m}")
    rest = g.m - 2
    o = next(o for o in range(rest + 1) if (2 * o - rest - beta[0]) % 3 == 0)
    tails = [0, 1] + [0 if i < o else 1 for i in range(rest)]
    return base_chain(g, beta, tails, "mk2")


def _heavy_class(g: MultiGraph) -> Tuple[int, int]:
    """A parallel class of size >= 3 whose contraction keeps at least 4 edges."""
    for (u, v), ids in sorted(g.pair_classes.items(), key=lambda kv: (-len(kv[1]), kv[0])):
        if len(ids) >= 3 and g.m - len(ids) >= 4:
            return u, v
    raise LiftError("no contractible parallel class")


def solve_k3(g: MultiGraph, beta: Boundary) -> Chain:
    """7-edge triangles: contract a triple class to reach ``4K2``."""
    if g.n != 3:
        raise LiftError("expected a 3-vertex multigraph")
    x, y = _heavy_class(g)
    return run_steps(g, beta, [ReductionStep("parallel_contract", {"x": x, "y": y})], solve_mk2)


def solve_k4_star(g: MultiGraph, beta: Boundary) -> Chain:
    """Zero boundary by search; otherwise split a vertex with nonzero boundary down to ``K3^1``."""
    if not any(beta):
        return solve_oracle(g, beta)
    v = next(i for i, b in enumerate(beta) if b)
    doubled = [u for u in g.neighbors(v) if g.multiplicity(u, v) == 2]
    single = [u for u in g.neighbors(v) if g.multiplicity(u, v) == 1]
    if len(doubled) != 2 or len(single) != 1:
        raise LiftError("graph does not have the K4* neighbourhood structure")
    a, b = doubled
    c = single[0]
    step = vertex_split_step(g, v, [(a, b), (a, c)])
    return run_steps(g, beta, [step], solve_k3)


K4_10_SCRIPT = [
    (0, 0, 1), (1, 0, 1),
    (2, 1, 2), (3, 1, 2),
    (4, 2, 3), (5, 2, 3),
    (6, 3, 0), (7, 3, 0),
    (8, 0, 2), (9, 1, 3),
]  # (y index, x index, x index): y_{2i-1}, y_{2i} -> x_i x_{i+1}; y9 -> x1x3; y10 -> x2x4


def k4_10_steps(g: MultiGraph, xs: Sequence[int], ys: Sequence[int]) -> List[ReductionStep]:
    current = list(range(g.n))  # original vertex -> id in the current graph
    h = g
    steps = []
    for yi, a, b in K4_10_SCRIPT:
        step = vertex_split_step(h, current[ys[yi]], [(current[xs[a]], current[xs[b]])])
        split = split_vertex(h, step.payload["v"], [tuple(p) for p in step.payload["pairs"]])
        current = [split.vertex_map[c] if c is not None else None for c in current]
        h = split.graph
        steps.append(step)
    return steps


def solve_k4_10(g: MultiGraph, beta: Boundary, xs: Sequence[int], ys: Sequence[int]) -> Chain:
    return run_steps(g, beta, k4_10_steps(g, xs, ys), solve_k4_star)


def solve_via_closure(
    g: MultiGraph,
    beta: Boundary,
    base: Sequence[int],
    h_edges: Sequence[int],
    provider: OrientationProvider,
    bottom=solve_trivial,
) -> Chain:
    """Contract an S3 subgraph, absorb its 3-closure, solve what is left with ``bottom``."""
    seq = compute_cl3(g, base)
    steps = closure_steps(g, seq, h_edges, provider)
    return run_steps(g, beta, steps, bottom)


def bipartite_provider(g: MultiGraph, xs: Sequence[int], ys: Sequence[int]) -> OrientationProvider:
    """Provider for a graph containing ``K_{|xs|,|ys|}`` on the given sides (|xs| >= 4, |ys| >= 10).

    The graph may have extra edges; its 3-closure over the ``K_{4,10}`` core
    must be the whole vertex set.
    """
    xs, ys = list(xs), list(ys)
    if len(xs) < 4 or len(ys) < 10:
        raise GraphError("need at least 4 + 10 vertices in the bipartition")
    for x in xs:
        for y in ys:
            if g.multiplicity(x, y) == 0:
                raise GraphError(f"missing bipartite edge {x}-{y}")
    core = sorted(xs[:4] + ys[:10])
    if len(xs) == 4 and len(ys) == 10 and g.n == 14 and g.m == 40:
        return OrientationProvider(g, partial(solve_k4_10, xs=xs, ys=ys), "K_{4,10}")
    cset = set(core)
    h_edges = []
    used = set()
    for x in xs[:4]:
        for y in ys[:10]:
            e = next(e for e in g.edges_between(x, y) if e not in used)
            used.add(e)
            h_edges.append(e)
    h_edges.sort()
    h = g.subgraph(core, h_edges)
    local = {v: i for i, v in enumerate(core)}
    inner = OrientationProvider(
        h, partial(solve_k4_10, xs=[local[x] for x in xs[:4]], ys=[local[y] for y in ys[:10]]), "K_{4,10}"
    )
    seq = compute_cl3(g, core)
    if len(seq.closure) != g.n:
        raise GraphError("3-closure of the K_{4,10} core does not span the graph")
    assert cset <= seq.closure
    return OrientationProvider(
        g, partial(solve_via_closure, base=core, h_edges=h_edges, provider=inner), f"cl3(K_4,10) on {g.n}"
    )


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------


def complete_bipartite(m: int, n: int) -> MultiGraph:
    return MultiGraph(m + n, tuple((x, m + y) for x in range(m) for y in range(n)))


def make_mk2(m: int) -> CatalogEntry:
    if m < 1:
        raise ValueError("m must be positive")
    g = MultiGraph(2, ((0, 1),) * m)
    if m >= 4:
        return CatalogEntry(f"{m}K2", g, IN_S3, OrientationProvider(g, solve_mk2, f"{m}K2"))
    return CatalogEntry(f"{m}K2", g, NOT_IN_S3)


K4_STAR_EDGES = ((0, 1), (0, 1), (1, 2), (1, 2), (2, 3), (2, 3), (3, 0), (3, 0), (0, 2), (1, 3))


def make_k4_star() -> CatalogEntry:
    g = MultiGraph(4, K4_STAR_EDGES)
    return CatalogEntry("K4*", g, IN_S3, OrientationProvider(g, solve_k4_star, "K4*"))


K3_1_MULT = {(0, 1): 2, (0, 2): 2, (1, 2): 3}


def k3_2_candidates() -> List[Dict[Tuple[int, int], int]]:
    """7-edge triangles other than ``K3^1`` with a triple class contracting to ``4K2`` and in S3.

    Multiplicity vectors are taken up to relabelling (sorted descending).
    """
    found = []
    for mult in sorted({tuple(sorted(t, reverse=True)) for t in itertools.product(range(8), repeat=3) if sum(t) == 7}):
        if mult == (3, 2, 2) or 3 not in mult:
            continue
        spec = dict(zip(((0, 1), (1, 2), (0, 2)), mult))
        g = MultiGraph.from_multiplicities(3, {k: v for k, v in spec.items() if v})
        if is_s3(g).member:
            found.append(spec)
    return found


def make_k3_variants() -> Tuple[CatalogEntry, CatalogEntry]:
    g1 = MultiGraph.from_multiplicities(3, K3_1_MULT)
    k31 = CatalogEntry("K3^1", g1, IN_S3, OrientationProvider(g1, solve_k3, "K3^1"))
    candidates = k3_2_candidates()
    if len(candidates) != 1:
        raise RuntimeError(f"expected a unique K3^2 candidate, found {candidates}")
    g2 = MultiGraph.from_multiplicities(3, {k: v for k, v in candidates[0].items() if v})
    k32 = CatalogEntry("K3^2", g2, IN_S3, OrientationProvider(g2, solve_k3, "K3^2"))
    return k31, k32


def make_complete_bipartite(m: int, n: int) -> CatalogEntry:
    if m < 1 or n < 1:
        raise ValueError("both sides must be nonempty")
    g = complete_bipartite(m, n)
    name = f"K_{m},{n}"
    small, large = min(m, n), max(m, n)
    if small >= 4 and large >= 10:
        if m <= n:
            xs, ys = list(range(m)), list(range(m, m + n))
        else:
            xs, ys = list(range(m, m + n)), list(range(m))
        return CatalogEntry(name, g, IN_S3, bipartite_provider(g, xs, ys))
    if g.m < 3 * g.n - 2:
        return CatalogEntry(name, g, NOT_IN_S3, meta={"reason": "edge bound"})
    return CatalogEntry(name, g, "unknown")


K3T_TARGETS = [(0, 1), (0, 2), (1, 2), (0, 1), (0, 2), (1, 2), (1, 2)]  # over (x, y, z): xy*2, xz*2, yz*3


def k3t_plus_steps(g: MultiGraph, b_side: Sequence[int], a_side: Sequence[int]):
    """Delete t-side vertices component by component until ``K3^1`` sits on the 3-side.

    Returns ``(steps, reduced_graph, b_ids, h_edges)`` where ``h_edges`` are
    the seven added edges in the reduced graph.  Every intermediate graph is
    checked to be 4-edge-connected.
    """
    current: List[Optional[int]] = list(range(g.n))
    h = g
    steps: List[ReductionStep] = []
    added: List[int] = []  # ids of added B edges in the current graph
    targets = list(K3T_TARGETS)

    def apply(step: ReductionStep) -> None:
        nonlocal h, current, added
        h2, _ = reduce_step(h, (0,) * h.n, step)
        # track vertex and edge ids through the reduction
        if step.kind not in ("vertex_split", "pair_split"):
            raise LiftError(f"unexpected step kind {step.kind} while deleting the t-side")
        if step.kind == "vertex_split":
            split = split_vertex(h, step.payload["v"], [tuple(p) for p in step.payload["pairs"]])
            vmaps, emaps, new = [split.vertex_map], [split.edge_map], list(split.new_edges)
        else:
            p = step.payload
            s1 = split_vertex(h, p["u"], [pick_pair(h, p["u"], p["v"], p["c"])])
            vm = s1.vertex_map
            s2 = split_vertex(s1.graph, vm[p["v"]], [pick_pair(s1.graph, vm[p["v"]], vm[p["a"]], vm[p["b"]])])
            vmaps, emaps, new = [s1.vertex_map, s2.vertex_map], [s1.edge_map, s2.edge_map], list(s2.new_edges)
        for vmap, emap in zip(vmaps, emaps):
            current = [vmap[c] if c is not None else None for c in current]
            added = [emap[e] for e in added]
        added += new
        lam = edge_connectivity(h2)
        if lam < 4:
            raise LiftError(f"step {len(steps)} ({step.kind}) leaves a graph with edge connectivity {lam}")
        h = h2
        steps.append(step)

    sub = g.induced(sorted(a_side))
    order = sorted(a_side)
    for comp_local in sub.components():
        comp = [order[i] for i in comp_local]
        while comp and targets:
            bx, by = (b_side[i] for i in targets[0])
            if len(comp) == 1:
                v = comp.pop()
                apply(vertex_split_step(h, current[v], [(current[bx], current[by])]))
            elif len(comp) == 2:
                u, v = comp
                comp = []
                apply(pair_split_step(h, current[u], current[v], current[bx], current[by]))
            else:
                leaf = _tree_leaf(g, comp)
                comp.remove(leaf)
                apply(vertex_split_step(h, current[leaf], [(current[bx], current[by])]))
            targets.pop(0)
        if not targets:
            break
    if targets:
        raise LiftError("ran out of t-side vertices before building K3^1")
    return steps, h, [current[b] for b in b_side], added


def _tree_leaf(g: MultiGraph, comp: Sequence[int]) -> int:
    """A leaf of the lowest-index-first BFS tree of ``g[comp]`` (the last vertex reached)."""
    cset = set(comp)
    root = min(comp)
    seen, queue, order = {root}, [root], []
    while queue:
        x = queue.pop(0)
        order.append(x)
        for y in g.neighbors(x):
            if y in cset and y not in seen:
                seen.add(y)
                queue.append(y)
    return order[-1]


def make_k3t_plus_provider(g: MultiGraph, b_side: Sequence[int], a_side: Sequence[int]) -> OrientationProvider:
    t = len(a_side)
    if t < 14:
        raise GraphError(f"K_3,t^+ needs t >= 14, got {t}")
    if len(b_side) != 3 or g.n != t + 3 or set(b_side) | set(a_side) != set(range(g.n)):
        raise GraphError("bipartition must split all vertices into 3 + t")
    for x in b_side:
        for y in a_side:
            if g.multiplicity(x, y) == 0:
                raise GraphError(f"missing bipartite edge {x}-{y}")
    if edge_connectivity(g) < 4:
        raise GraphError("K_3,t^+ must be 4-edge-connected")
    steps, reduced, b_ids, h_edges = k3t_plus_steps(g, b_side, a_side)
    h = reduced.subgraph(b_ids, sorted(h_edges))
    inner = OrientationProvider(h, solve_k3, "K3^1")
    base_order = sorted(b_ids)

    def solve(graph: MultiGraph, beta: Boundary) -> Chain:
        def bottom(r: MultiGraph, b: Boundary) -> Chain:
            return solve_via_closure(r, b, base_order, sorted(h_edges), inner)

        return run_steps(graph, beta, steps, bottom)

    if len(compute_cl3(reduced, base_order).closure) != reduced.n:
        raise LiftError("3-closure of K3^1 does not span the reduced graph")
    return OrientationProvider(g, solve, f"K_3,{t}^+")


# ---------------------------------------------------------------------------
# bad attachments
# ---------------------------------------------------------------------------

ATTACHMENT_KINDS = {
    "triangle": [(0, 1), (1, 2), (2, 0)],
    "c4": [(0, 1), (1, 2), (2, 3), (3, 0)],
    "c5": [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)],
    "c6": [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)],
    "two_triangles": [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)],
}


def make_bad_attachment_example(kind: str) -> Tuple[MultiGraph, List[int]]:
    """A ``K_{4,10}`` host with an attachment glued on by exactly ``3|Γ| - |E(Γ)|`` edges.

    Returns the graph and the attachment's vertex list.
    """
    if kind not in ATTACHMENT_KINDS:
        raise ValueError(f"unknown attachment kind {kind!r}; choose from {sorted(ATTACHMENT_KINDS)}")
    host = complete_bipartite(4, 10)
    inner = ATTACHMENT_KINDS[kind]
    k = 1 + max(max(e) for e in inner)
    off = host.n
    pairs = list(host.edges) + [(off + a, off + b) for a, b in inner]
    out_needed = 3 * k - len(inner)
    targets = itertools.cycle(range(host.n))
    per_vertex = [out_needed // k + (1 if i < out_needed % k else 0) for i in range(k)]
    for i, cnt in enumerate(per_vertex):
        for _ in range(cnt):
            pairs.append((off + i, next(targets)))
    return MultiGraph(host.n + k, tuple(pairs)), list(range(off, off + k))


def catalog_names() -> List[str]:
    return ["4K2", "K3^1", "K3^2", "K4*", "K_4,9", "K_4,10", "K_5,12"]


def get_entry(name: str) -> CatalogEntry:
    if name.endswith("K2") and name[:-2].isdigit():
        return make_mk2(int(name[:-2]))
    if name == "K4*":
        return make_k4_star()
    if name in ("K3^1", "K3^2"):
        k31, k32 = make_k3_variants()
        return k31 if name == "K3^1" else k32
    if name.startswith("K_") and "," in name:
        m, n = name[2:].split(",")
        return make_complete_bipartite(int(m), int(n))
    raise KeyError(f"unknown catalog entry {name!r}")
