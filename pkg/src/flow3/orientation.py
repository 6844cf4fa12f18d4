"""Modulo-3 boundaries, orientation checks and exhaustive orientation search.

An orientation is a tuple holding the tail vertex of every edge, indexed by
edge id.  A boundary is a tuple of residues in ``{0, 1, 2}`` whose sum is
divisible by 3.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .multigraph import MultiGraph

Orientation = Tuple[int, ...]
Boundary = Tuple[int, ...]

DEFAULT_BUDGET = 3 ** 20


def default_budget() -> int:
    env = os.environ.get("FLOW3_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class SearchOutcome:
    found: Optional[Orientation]
    nodes_explored: int = 0
    exhaustive: bool = True

    @property
    def inconclusive(self) -> bool:
        return self.found is None and not self.exhaustive

    def __bool__(self) -> bool:
        return self.found is not None


def netflows(g: MultiGraph, d: Sequence[int]) -> List[int]:
    flow = [0] * g.n
    for i, t in enumerate(d):
        flow[t] += 1
        flow[g.other(i, t)] -= 1
    return flow


def netflow(g: MultiGraph, d: Sequence[int], v: int) -> int:
    return netflows(g, d)[v]


def is_orientation(g: MultiGraph, d: Sequence[int]) -> bool:
    return len(d) == g.m and all(t in g.edges[i] for i, t in enumerate(d))


def is_valid_boundary(beta: Sequence[int], n: int) -> bool:
    return len(beta) == n and all(b in (0, 1, 2) for b in beta) and sum(beta) % 3 == 0


def is_beta_orientation(g: MultiGraph, d: Sequence[int], beta: Sequence[int]) -> bool:
    if not is_orientation(g, d) or len(beta) != g.n:
        return False
    return all((f - b) % 3 == 0 for f, b in zip(netflows(g, d), beta))


def is_mod3_orientation(g: MultiGraph, d: Sequence[int]) -> bool:
    return is_beta_orientation(g, d, (0,) * g.n)


def _reach(adj: List[int], n: int) -> int:
    seen = frontier = 1
    while frontier:
        nxt = 0
        f = frontier
        while f:
            low = f & -f
            nxt |= adj[low.bit_length() - 1]
            f ^= low
        frontier = nxt & ~seen
        seen |= frontier
    return seen


def _strong(out_adj: List[int], in_adj: List[int], n: int) -> bool:
    full = (1 << n) - 1
    return _reach(out_adj, n) == full and _reach(in_adj, n) == full


def is_strongly_connected(g: MultiGraph, d: Sequence[int]) -> bool:
    if g.n <= 1:
        return True
    out_adj = [0] * g.n
    in_adj = [0] * g.n
    for i, t in enumerate(d):
        h = g.other(i, t)
        out_adj[t] |= 1 << h
        in_adj[h] |= 1 << t
    return _strong(out_adj, in_adj, g.n)


def is_sc_beta_orientation(g: MultiGraph, d: Sequence[int], beta: Sequence[int]) -> bool:
    return is_beta_orientation(g, d, beta) and is_strongly_connected(g, d)


def iter_boundaries(n: int) -> Iterator[Boundary]:
    """All of Z(G, Z3) in odometer order: free on the first n-1 vertices, last forced."""
    if n == 0:
        yield ()
        return
    for head in itertools.product(range(3), repeat=n - 1):
        yield head + ((-sum(head)) % 3,)


def totaledge_boundary(g: MultiGraph, x: int = 0) -> Boundary:
    """The boundary that forces out-degree ≡ 0 (mod 3) away from ``x``."""
    deg = g.degrees()
    beta = [(-d) % 3 for d in deg]
    beta[x] = sum(deg[y] for y in range(g.n) if y != x) % 3
    return tuple(beta)


def _bfs_order(g: MultiGraph) -> List[int]:
    order, seen = [], set()
    for s in range(g.n):
        if s in seen:
            continue
        seen.add(s)
        queue = [s]
        while queue:
            x = queue.pop(0)
            order.append(x)
            for y in g.neighbors(x):
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
    return order


def find_sc_beta_orientation(
    g: MultiGraph, beta: Sequence[int], budget: Optional[int] = None
) -> SearchOutcome:
    """Exhaustive search for a strongly connected β-orientation.

    Parallel edges between the same pair only matter through how many of
    them point each way, so the search branches on that count per parallel
    class.  Vertices are checked as soon as their last class is decided.
    """
    if budget is None:
        budget = default_budget()
    if not is_valid_boundary(beta, g.n):
        raise ValueError(f"invalid boundary {tuple(beta)} for n={g.n}")
    if g.n <= 1:
        return SearchOutcome((), 0, True)
    if not g.is_connected():
        return SearchOutcome(None, 0, True)

    pos = {v: i for i, v in enumerate(_bfs_order(g))}
    classes = sorted(
        ((u, v, ids) for (u, v), ids in g.pair_classes.items()),
        key=lambda c: (max(pos[c[0]], pos[c[1]]), min(pos[c[0]], pos[c[1]])),
    )
    n = g.n
    rem_classes = [0] * n
    rem_mult = [0] * n
    for u, v, ids in classes:
        for x in (u, v):
            rem_classes[x] += 1
            rem_mult[x] += len(ids)
    net = [0] * n
    outs = [0] * n
    ins = [0] * n
    out_adj = [0] * n
    in_adj = [0] * n
    choice = [0] * len(classes)
    value_orders = [
        sorted(range(len(ids) + 1), key=lambda j, k=len(ids): (j in (0, k), abs(2 * j - k), -j))
        for _, _, ids in classes
    ]
    nodes = 0

    def feasible(x: int) -> bool:
        need = (beta[x] - net[x]) % 3
        r = rem_mult[x]
        if rem_classes[x] == 0:
            return need == 0 and outs[x] > 0 and ins[x] > 0
        if r == 1:
            return need != 0
        return True

    def rec(i: int) -> bool:
        nonlocal nodes
        if i == len(classes):
            return _strong(out_adj, in_adj, n)
        u, v, ids = classes[i]
        k = len(ids)
        rem_classes[u] -= 1
        rem_classes[v] -= 1
        rem_mult[u] -= k
        rem_mult[v] -= k
        saved = (out_adj[u], out_adj[v], in_adj[u], in_adj[v])
        for j in value_orders[i]:
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded
            delta = 2 * j - k
            net[u] += delta
            net[v] -= delta
            outs[u] += j
            ins[v] += j
            outs[v] += k - j
            ins[u] += k - j
            if j:
                out_adj[u] |= 1 << v
                in_adj[v] |= 1 << u
            if j < k:
                out_adj[v] |= 1 << u
                in_adj[u] |= 1 << v
            if feasible(u) and feasible(v):
                choice[i] = j
                if rec(i + 1):
                    return True
            net[u] -= delta
            net[v] += delta
            outs[u] -= j
            ins[v] -= j
            outs[v] -= k - j
            ins[u] -= k - j
            out_adj[u], out_adj[v], in_adj[u], in_adj[v] = saved
        rem_classes[u] += 1
        rem_classes[v] += 1
        rem_mult[u] += k
        rem_mult[v] += k
        return False

    try:
        ok = rec(0)
    except BudgetExceeded:
        return SearchOutcome(None, nodes, False)
    if not ok:
        return SearchOutcome(None, nodes, True)
    tails = [0] * g.m
    for (u, v, ids), j in zip(classes, choice):
        for idx, e in enumerate(ids):
            tails[e] = u if idx < j else v
    return SearchOutcome(tuple(tails), nodes, True)


def phi_lt_3(g: MultiGraph, budget: Optional[int] = None) -> SearchOutcome:
    """Strongly connected modulo-3 orientation; a hit certifies flow index < 3."""
    return find_sc_beta_orientation(g, (0,) * g.n, budget)


@dataclass
class S3Result:
    member: Optional[bool]
    witnesses: Dict[Boundary, Orientation] = field(default_factory=dict)
    failing: Optional[Boundary] = None
    nodes_explored: int = 0

    @property
    def inconclusive(self) -> bool:
        return self.member is None


def is_s3(g: MultiGraph, budget: Optional[int] = None) -> S3Result:
    """Decide membership in S3 by searching every boundary.

    The total-edge boundary is tried first since it refutes sparse graphs
    quickly; the rest follow in odometer order.  ``budget`` caps the total
    node count across all searches.
    """
    if budget is None:
        budget = default_budget()
    if g.n <= 1:
        return S3Result(True, {(0,) * g.n: ()})
    if not g.is_connected():
        return S3Result(False, failing=(0,) * g.n)
    first = totaledge_boundary(g)
    order = itertools.chain([first], (b for b in iter_boundaries(g.n) if b != first))
    result = S3Result(True)
    for beta in order:
        out = find_sc_beta_orientation(g, beta, budget - result.nodes_explored)
        result.nodes_explored += out.nodes_explored
        if out.found is not None:
            result.witnesses[beta] = out.found
        elif out.exhaustive:
            result.member = False
            result.failing = beta
            return result
        else:
            result.member = None
            return result
    result.witnesses = dict(sorted(result.witnesses.items()))
    return result


def s3_edge_bound_filter(g: MultiGraph) -> bool:
    """False certifies non-membership: S3 graphs have at least 3n - 2 edges."""
    if g.n <= 1:
        return True
    return g.m >= 3 * g.n - 2


def enumerate_mod3_orientations(g: MultiGraph, budget: Optional[int] = None) -> Iterator[Orientation]:
    """Every orientation with all netflows ≡ 0 (mod 3).

    Cotree edges range over both directions in odometer order; tree edges
    are then forced leaf-to-root, and a forced zero discards the point.
    """
    if budget is None:
        budget = default_budget()
    order = _bfs_order(g)
    parent_edge: Dict[int, int] = {}
    seen = set()
    tree = set()
    for s in order:
        if s in seen:
            continue
        seen.add(s)
        queue = [s]
        while queue:
            x = queue.pop(0)
            for e in g.incidence[x]:
                y = g.other(e, x)
                if y not in seen:
                    seen.add(y)
                    parent_edge[y] = e
                    tree.add(e)
                    queue.append(y)
    cotree = [e for e in range(g.m) if e not in tree]
    if 2 ** len(cotree) > budget:
        raise BudgetExceeded(f"2^{len(cotree)} points exceed budget {budget}")
    bfs_seq = [x for x in order if x in parent_edge]
    # first stored endpoint gains +f, second gains -f
    for values in itertools.product((1, 2), repeat=len(cotree)):
        f = [0] * g.m
        for e, val in zip(cotree, values):
            f[e] = val
        excess = [0] * g.n
        for e, val in zip(cotree, values):
            a, b = g.edges[e]
            excess[a] += val
            excess[b] -= val
        ok = True
        for x in reversed(bfs_seq):
            e = parent_edge[x]
            a, b = g.edges[e]
            # choose f[e] so that x balances
            val = (-excess[x]) % 3 if x == a else excess[x] % 3
            if val == 0:
                ok = False
                break
            f[e] = val
            excess[a] += val
            excess[b] -= val
        if ok:
            yield tuple(g.edges[e][0] if f[e] == 1 else g.edges[e][1] for e in range(g.m))
