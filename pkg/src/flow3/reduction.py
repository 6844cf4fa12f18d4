"""3-closures and constructive lifting of strongly connected β-orientations.

A reduction chain walks a graph down through a sequence of steps (contract
an S3 subgraph, contract a parallel class, split off a vertex, ...) to a
small base graph, solves the base, then lifts the orientation back up one
step at a time.  Every step is deterministic given its payload, the
boundary, and (for S3 contractions) the recorded answer on the contracted
subgraph, which is what lets certificates be replayed without search.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .multigraph import (
    ContractionResult,
    GraphError,
    MultiGraph,
    SplitResult,
    contract,
    pick_pair,
    split_vertex,
)
from .orientation import (
    Boundary,
    Orientation,
    is_beta_orientation,
    is_sc_beta_orientation,
    is_strongly_connected,
    is_valid_boundary,
    netflows,
)


class LiftError(RuntimeError):
    """A lift could not be completed; the inputs do not meet the step's preconditions."""


# ---------------------------------------------------------------------------
# 3-closure
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClosureSequence:
    base: Tuple[int, ...]
    order: Tuple[int, ...]
    closure: frozenset


def compute_cl3(g: MultiGraph, base, rng: Optional[random.Random] = None) -> ClosureSequence:
    """Greedily absorb outside vertices with at least 3 edges into the current set.

    The smallest eligible vertex is taken first unless ``rng`` is given, in
    which case a random eligible vertex is taken (the final set does not
    depend on the choice).
    """
    base = tuple(sorted(set(base)))
    if not base:
        raise GraphError("closure base must be nonempty")
    inside = set(base)
    count = [0] * g.n
    for u, v in g.edges:
        if u in inside and v not in inside:
            count[v] += 1
        elif v in inside and u not in inside:
            count[u] += 1
    order = []
    while True:
        eligible = [x for x in range(g.n) if x not in inside and count[x] >= 3]
        if not eligible:
            break
        x = rng.choice(eligible) if rng is not None else eligible[0]
        inside.add(x)
        order.append(x)
        for e in g.incidence[x]:
            y = g.other(e, x)
            if y not in inside:
                count[y] += 1
    return ClosureSequence(base, tuple(order), frozenset(inside))


# ---------------------------------------------------------------------------
# primitive lifts
# ---------------------------------------------------------------------------


def merged_boundary(beta: Sequence[int], cr: ContractionResult) -> Boundary:
    out = [0] * cr.graph.n
    for old, new in enumerate(cr.vertex_map):
        out[new] = (out[new] + beta[old]) % 3
    return tuple(out)


def pull_back(g: MultiGraph, cr: ContractionResult, d_small: Sequence[int]) -> List[Optional[int]]:
    """Tails on ``g`` inherited from an orientation of ``cr.graph``; deleted loops get ``None``."""
    tails: List[Optional[int]] = [None] * g.m
    for old, new in cr.edge_map.items():
        u, v = g.edges[old]
        t = d_small[new]
        tails[old] = u if cr.vertex_map[u] == t else v
    return tails


def extend_through_edge_contraction(g: MultiGraph, e: int, d_contracted: Sequence[int]) -> Orientation:
    """Extend a strongly connected orientation of ``g/e`` to ``g``.

    All parallel copies of ``e`` disappear in ``g/e``.  ``e`` is tried with
    the lower endpoint as tail first; the other copies get the opposite
    direction.
    """
    x, y = g.edges[e]
    cr = contract(g, (x, y))
    if not is_strongly_connected(cr.graph, d_contracted):
        raise LiftError("orientation of the contraction is not strongly connected")
    tails = pull_back(g, cr, d_contracted)
    lo, hi = min(x, y), max(x, y)
    copies = [c for c in g.edges_between(x, y) if c != e]
    for t_e, t_rest in ((lo, hi), (hi, lo)):
        trial = list(tails)
        trial[e] = t_e
        for c in copies:
            trial[c] = t_rest
        if is_strongly_connected(g, trial):
            return tuple(trial)
    raise LiftError(f"neither direction of edge {e} gives a strongly connected orientation")


def _drop_edges(g: MultiGraph, drop: Sequence[int]) -> Tuple[MultiGraph, Dict[int, int]]:
    dropset = set(drop)
    keep = [i for i in range(g.m) if i not in dropset]
    return MultiGraph(g.n, tuple(g.edges[i] for i in keep)), {old: new for new, old in enumerate(keep)}


def lift_through_parallel_contraction(
    g: MultiGraph, x: int, y: int, beta: Sequence[int], d_contracted: Sequence[int]
) -> Orientation:
    """Lift across the contraction of a class of at least 3 parallel ``xy`` edges.

    Two copies are held back; the remaining copies restore strong
    connectivity and the held-back pair fixes the residue at ``x`` (and so
    at ``y``).
    """
    ids = g.edges_between(x, y)
    if len(ids) < 3:
        raise LiftError(f"need at least 3 parallel edges between {x} and {y}, found {len(ids)}")
    cr = contract(g, (x, y))
    if not is_beta_orientation(cr.graph, d_contracted, merged_boundary(beta, cr)):
        raise LiftError("contracted orientation does not realise the merged boundary")
    e1, e2 = ids[0], ids[1]
    g1, emap = _drop_edges(g, (e1, e2))
    partial = extend_through_edge_contraction(g1, emap[ids[2]], d_contracted)
    tails = [0] * g.m
    for old, new in emap.items():
        tails[old] = partial[new]
    tails[e1] = tails[e2] = x
    nx_ = netflows(g, tails)[x] - 2  # held-back pair not yet counted
    need = (beta[x] - nx_) % 3
    if need == 0:
        tails[e1], tails[e2] = x, y
    elif need == 2:
        tails[e1] = tails[e2] = x
    else:
        tails[e1] = tails[e2] = y
    return tuple(tails)


def lift_through_s3_contraction(
    g: MultiGraph,
    h_vertices: Sequence[int],
    h_edges: Sequence[int],
    provider: Optional["OrientationProvider"],
    beta: Sequence[int],
    d_contracted: Sequence[int],
    h_orientation: Optional[Sequence[int]] = None,
) -> Tuple[Orientation, Orientation]:
    """Lift across contracting a vertex set spanned by an S3 subgraph ``H``.

    ``H`` is the subgraph on ``h_vertices`` (relabelled in sorted order)
    with edges ``h_edges``.  Edges inside the set but outside ``H`` get the
    lower endpoint as tail.  The answer on ``H`` comes from ``provider`` or,
    when replaying, from ``h_orientation``.  Returns the lifted orientation
    and the answer on ``H``.
    """
    hv = sorted(set(h_vertices))
    cr = contract(g, hv)
    if not is_sc_beta_orientation(cr.graph, d_contracted, merged_boundary(beta, cr)):
        raise LiftError("contracted orientation is not a strongly connected merged-boundary orientation")
    tails = pull_back(g, cr, d_contracted)
    hset = set(h_edges)
    for i, t in enumerate(tails):
        if t is None and i not in hset:
            tails[i] = min(g.edges[i])
    flow = [0] * g.n
    for i, t in enumerate(tails):
        if t is not None:
            flow[t] += 1
            flow[g.other(i, t)] -= 1
    beta2 = tuple((beta[v] - flow[v]) % 3 for v in hv)
    h = g.subgraph(hv, h_edges)
    if h_orientation is None:
        if provider is None:
            raise LiftError("no provider and no recorded answer for the contracted subgraph")
        h_orientation = provider.orient(beta2)
    h_orientation = tuple(h_orientation)
    if not is_sc_beta_orientation(h, h_orientation, beta2):
        raise LiftError("answer on the contracted subgraph is not a strongly connected β-orientation")
    for j, e in enumerate(h_edges):
        tails[e] = hv[h_orientation[j]]
    return tuple(tails), h_orientation


def split_boundary(g: MultiGraph, split: SplitResult, beta: Sequence[int]) -> Tuple[Boundary, Dict[int, int]]:
    """Boundary on the split graph plus the tails chosen for the free edges at ``v``.

    Each reserved pair becomes a path through ``v`` and contributes nothing
    there, so the free edges alone must realise ``beta[v]``: with ``k`` free
    edges and ``o`` of them leaving ``v`` the net is ``2o - k``.
    """
    v, free = split.v, split.free_edges
    k = len(free)
    o = next((o for o in range(k + 1) if (2 * o - k - beta[v]) % 3 == 0), None)
    if o is None:
        raise LiftError(f"{k} free edge(s) at vertex {v} cannot realise boundary {beta[v]}")
    free_tails = {}
    adjusted = list(beta)
    for idx, e in enumerate(free):
        x = g.other(e, v)
        if idx < o:
            free_tails[e] = v
            adjusted[x] += 1
        else:
            free_tails[e] = x
            adjusted[x] -= 1
    out = [0] * split.graph.n
    for old, new in enumerate(split.vertex_map):
        if new is not None:
            out[new] = adjusted[old] % 3
    return tuple(out), free_tails


def lift_split(g: MultiGraph, split: SplitResult, beta: Sequence[int], sub_solution: Sequence[int]) -> Orientation:
    beta_sub, free_tails = split_boundary(g, split, beta)
    if not is_sc_beta_orientation(split.graph, sub_solution, beta_sub):
        raise LiftError("sub-solution is not a strongly connected orientation for the adjusted boundary")
    inverse = {new: old for old, new in enumerate(split.vertex_map) if new is not None}
    tails: List[int] = [0] * g.m
    for old, new in split.edge_map.items():
        tails[old] = inverse[sub_solution[new]]
    v = split.v
    for (ea, eb), new in zip(split.pairs, split.new_edges):
        a, b = g.other(ea, v), g.other(eb, v)
        if inverse[sub_solution[new]] == a:
            tails[ea], tails[eb] = a, v
        else:
            tails[eb], tails[ea] = b, v
    for e, t in free_tails.items():
        tails[e] = t
    return tuple(tails)


def lift_vertex_split(
    g: MultiGraph, v: int, a: int, b: int, beta: Sequence[int], sub_solution: Sequence[int]
) -> Orientation:
    """Lift from ``G - v + ab`` (lowest-id ``va``/``vb`` reserved) back to ``G``."""
    if g.degree(v) < 4:
        raise LiftError(f"vertex {v} has degree {g.degree(v)} < 4")
    split = split_vertex(g, v, [pick_pair(g, v, a, b)])
    return lift_split(g, split, beta, sub_solution)


# ---------------------------------------------------------------------------
# reduction steps and chains
# ---------------------------------------------------------------------------


@dataclass
class ReductionStep:
    kind: str
    payload: dict
    provider: Optional["OrientationProvider"] = field(default=None, repr=False, compare=False)

    def to_json(self) -> dict:
        return {"kind": self.kind, "payload": self.payload}


def vertex_split_step(g: MultiGraph, v: int, targets: Sequence[Tuple[int, int]]) -> ReductionStep:
    """Split ``v`` so that each ``(a, b)`` in ``targets`` becomes a new edge ``ab``."""
    taken: List[int] = []
    pairs = []
    for a, b in targets:
        ea, eb = pick_pair(g, v, a, b, taken)
        taken += [ea, eb]
        pairs.append([ea, eb])
    return ReductionStep("vertex_split", {"v": v, "pairs": pairs})


def pair_split_step(g: MultiGraph, u: int, v: int, a: int, b: int) -> ReductionStep:
    """``G - u - v + ab`` via ``H = G - u + vc`` and a split of ``v`` in ``H``."""
    if g.multiplicity(u, v) == 0:
        raise LiftError(f"{u} and {v} are not adjacent")
    outside = sum(1 for e in g.incidence[v] if g.other(e, v) != u)
    if outside < 3:
        raise LiftError(f"vertex {v} has only {outside} edges leaving {{u, v}}; need 3")
    others = [c for c in g.neighbors(u) if c != v]
    if not others:
        return ReductionStep("parallel_contract", {"x": min(u, v), "y": max(u, v)})
    return ReductionStep("pair_split", {"u": u, "v": v, "c": others[0], "a": a, "b": b})


def _pair_split_parts(g: MultiGraph, p: dict) -> Tuple[SplitResult, SplitResult]:
    u, v, c, a, b = p["u"], p["v"], p["c"], p["a"], p["b"]
    if g.degree(u) < 4:
        raise LiftError(f"vertex {u} has degree {g.degree(u)} < 4")
    first = split_vertex(g, u, [pick_pair(g, u, v, c)])
    h = first.graph
    vm = first.vertex_map
    v1, a1, b1 = vm[v], vm[a], vm[b]
    if None in (v1, a1, b1):
        raise LiftError("pair split endpoints collide with the deleted vertex")
    if h.degree(v1) < 4:
        raise LiftError(f"vertex {v} has degree {h.degree(v1)} < 4 after the first split")
    second = split_vertex(h, v1, [pick_pair(h, v1, a1, b1)])
    return first, second


def reduce_step(g: MultiGraph, beta: Sequence[int], step: ReductionStep) -> Tuple[MultiGraph, Boundary]:
    p = step.payload
    if step.kind == "s3_contract":
        cr = contract(g, p["vertices"])
        return cr.graph, merged_boundary(beta, cr)
    if step.kind == "parallel_contract":
        cr = contract(g, (p["x"], p["y"]))
        return cr.graph, merged_boundary(beta, cr)
    if step.kind == "vertex_split":
        split = split_vertex(g, p["v"], [tuple(x) for x in p["pairs"]])
        return split.graph, split_boundary(g, split, beta)[0]
    if step.kind == "pair_split":
        first, second = _pair_split_parts(g, p)
        b1, _ = split_boundary(g, first, beta)
        return second.graph, split_boundary(first.graph, second, b1)[0]
    raise ValueError(f"unknown step kind {step.kind!r}")


def lift_step(g: MultiGraph, beta: Sequence[int], step: ReductionStep, d_next: Sequence[int]) -> Orientation:
    """Lift ``d_next`` across ``step``; S3 contractions record their answer in the payload."""
    p = step.payload
    if step.kind == "s3_contract":
        d, answer = lift_through_s3_contraction(
            g, p["vertices"], p["h_edges"], step.provider, beta, d_next, p.get("h_orientation")
        )
        p["h_orientation"] = list(answer)
        return d
    if step.kind == "parallel_contract":
        return lift_through_parallel_contraction(g, p["x"], p["y"], beta, d_next)
    if step.kind == "vertex_split":
        if g.degree(p["v"]) < 4:
            raise LiftError(f"vertex {p['v']} has degree {g.degree(p['v'])} < 4")
        split = split_vertex(g, p["v"], [tuple(x) for x in p["pairs"]])
        return lift_split(g, split, beta, d_next)
    if step.kind == "pair_split":
        first, second = _pair_split_parts(g, p)
        b1, _ = split_boundary(g, first, beta)
        mid = lift_split(first.graph, second, b1, d_next)
        return lift_split(g, first, beta, mid)
    raise ValueError(f"unknown step kind {step.kind!r}")


def lift_pair_split(
    g: MultiGraph, u: int, v: int, a: int, b: int, beta: Sequence[int], sub_solution: Sequence[int]
) -> Orientation:
    """Lift from ``G - u - v + ab`` back to ``G``; falls back to a parallel-class lift when ``u`` only sees ``v``."""
    return lift_step(g, beta, pair_split_step(g, u, v, a, b), sub_solution)


@dataclass
class Chain:
    """A solved reduction chain; level 0 is the top graph, the last level is the base."""

    graphs: List[MultiGraph]
    betas: List[Boundary]
    steps: List[ReductionStep]
    base: ReductionStep
    orientations: List[Orientation]

    @property
    def graph(self) -> MultiGraph:
        return self.graphs[0]

    @property
    def orientation(self) -> Orientation:
        return self.orientations[0]

    def digests(self) -> List[str]:
        return trace_digests(self.orientations, self.steps + [self.base])

    def trace(self) -> List[dict]:
        return [dict(s.to_json(), post_digest=d) for s, d in zip(self.steps + [self.base], self.digests())]


def _digest(orientation: Sequence[int], payload: dict, below: str) -> str:
    blob = json.dumps([list(orientation), payload, below], sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def trace_digests(orientations: Sequence[Sequence[int]], steps: Sequence[ReductionStep]) -> List[str]:
    """Hash chain: each level's digest covers its orientation, its step payload and the level below."""
    out = [""] * len(steps)
    below = ""
    for i in range(len(steps) - 1, -1, -1):
        below = out[i] = _digest(orientations[i], {"kind": steps[i].kind, **steps[i].payload}, below)
    return out


def base_chain(g: MultiGraph, beta: Sequence[int], d: Sequence[int], source: str) -> Chain:
    d = tuple(d)
    if not is_sc_beta_orientation(g, d, beta):
        raise LiftError(f"base orientation from {source} does not verify")
    step = ReductionStep("base", {"orientation": list(d), "source": source})
    return Chain([g], [tuple(beta)], [], step, [d])


Solver = Callable[[MultiGraph, Boundary], Chain]


def run_steps(g: MultiGraph, beta: Sequence[int], steps: Sequence[ReductionStep], bottom: Solver) -> Chain:
    """Reduce through ``steps``, solve the bottom graph with ``bottom``, then lift back up."""
    beta = tuple(beta)
    # fresh payloads: S3 answers depend on the boundary being lifted
    steps = [
        ReductionStep(s.kind, {k: v for k, v in s.payload.items() if k != "h_orientation"}, s.provider)
        for s in steps
    ]
    graphs, betas = [g], [beta]
    for step in steps:
        g2, b2 = reduce_step(graphs[-1], betas[-1], step)
        graphs.append(g2)
        betas.append(b2)
    sub = bottom(graphs[-1], betas[-1])
    orientations = list(sub.orientations)
    d = sub.orientation
    lifted = []
    for i in range(len(steps) - 1, -1, -1):
        d = lift_step(graphs[i], betas[i], steps[i], d)
        lifted.append(d)
    lifted.reverse()
    return Chain(graphs[:-1] + sub.graphs, betas[:-1] + sub.betas, list(steps) + sub.steps, sub.base, lifted + orientations)


class OrientationProvider:
    """Answers boundary queries on a fixed graph with verified strongly connected orientations."""

    def __init__(self, graph: MultiGraph, solve: Solver, name: str = ""):
        self.graph = graph
        self._solve = solve
        self.name = name

    def certify(self, beta: Sequence[int]) -> Chain:
        beta = tuple(b % 3 for b in beta)
        if not is_valid_boundary(beta, self.graph.n):
            raise ValueError(f"invalid boundary {beta}")
        chain = self._solve(self.graph, beta)
        if not is_sc_beta_orientation(self.graph, chain.orientation, beta):
            raise LiftError(f"provider {self.name or '?'} produced an orientation that does not verify")
        return chain

    def orient(self, beta: Sequence[int]) -> Orientation:
        return self.certify(beta).orientation

    def __repr__(self) -> str:
        return f"OrientationProvider({self.name!r}, n={self.graph.n}, m={self.graph.m})"


def closure_steps(g: MultiGraph, seq: ClosureSequence, h_edges: Sequence[int],
                  provider: Optional[OrientationProvider]) -> List[ReductionStep]:
    """Steps contracting the S3 base and then absorbing each closure vertex in order."""
    steps = [ReductionStep("s3_contract", {"vertices": list(seq.base), "h_edges": list(h_edges)}, provider)]
    prefix = list(seq.base)
    for v in seq.order:
        cr = contract(g, prefix)
        steps.append(ReductionStep("parallel_contract", {"x": cr.merged, "y": cr.vertex_map[v]}))
        prefix.append(v)
    return steps


def lift_closure_chain(
    g: MultiGraph,
    seq: ClosureSequence,
    provider: OrientationProvider,
    h_edges: Sequence[int],
    beta: Sequence[int],
    d_contracted: Sequence[int],
) -> Orientation:
    """Lift an orientation of ``g / closure`` back to ``g``.

    Closure vertices are un-contracted in reverse order with the parallel
    class lift; the base is un-contracted last with the S3 lift.
    """
    steps = closure_steps(g, seq, h_edges, provider)
    bottom_graph = contract(g, seq.closure).graph

    def bottom(h: MultiGraph, b: Boundary) -> Chain:
        if h != bottom_graph:
            raise LiftError("closure contraction does not compose as expected")
        return base_chain(h, b, d_contracted, "given")

    try:
        return run_steps(g, beta, steps, bottom).orientation
    except LiftError as exc:
        raise LiftError(f"closure chain failed: {exc}") from exc


def replay_trace(g: MultiGraph, beta: Sequence[int], trace: Sequence[dict]) -> Orientation:
    """Re-run a serialised chain without any search; return the top orientation.

    Raises ``LiftError`` (or ``GraphError``/``KeyError``/``TypeError`` on
    malformed payloads) when the trace does not replay exactly.
    """
    if not trace or trace[-1].get("kind") != "base":
        raise LiftError("trace must end with a base step")
    steps = [ReductionStep(s["kind"], json.loads(json.dumps(s["payload"]))) for s in trace]
    graphs, betas = [g], [tuple(beta)]
    for step in steps[:-1]:
        g2, b2 = reduce_step(graphs[-1], betas[-1], step)
        graphs.append(g2)
        betas.append(b2)
    d = tuple(steps[-1].payload["orientation"])
    if not is_sc_beta_orientation(graphs[-1], d, betas[-1]):
        raise LiftError("base orientation does not verify")
    orientations = [d]
    for i in range(len(steps) - 2, -1, -1):
        if steps[i].kind == "s3_contract" and "h_orientation" not in steps[i].payload:
            raise LiftError(f"step {i} lacks the recorded subgraph answer")
        d = lift_step(graphs[i], betas[i], steps[i], d)
        orientations.append(d)
    orientations.reverse()
    digests = trace_digests(orientations, steps)
    for i, (step, dg) in enumerate(zip(trace, digests)):
        if step.get("post_digest") != dg:
            raise LiftError(f"digest mismatch at step {i} ({step.get('kind')})")
    return orientations[0]
