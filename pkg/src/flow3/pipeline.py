"""Complement-pair certification, bad-attachment detection and certificate checking.

``certify_pair`` looks for an S3 seed (a large complete bipartite piece, or
a ``K_{3,t}`` pattern) on either side of a graph/complement pair, absorbs its
3-closure, solves the few leftover vertices by search, and lifts that
orientation back to the whole side.  Every positive result is a
``Certificate`` that ``check_certificate`` re-verifies without searching.
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from . import __version__
from .catalog import bipartite_provider, make_k3t_plus_provider
from .multigraph import (
    GraphError,
    MultiGraph,
    complement,
    contract,
    edge_connectivity,
    min_cut,
    min_degree,
)
from .orientation import (
    BudgetExceeded,
    find_sc_beta_orientation,
    is_beta_orientation,
    is_s3,
    is_strongly_connected,
    is_valid_boundary,
    iter_boundaries,
)
from .reduction import (
    Chain,
    ClosureSequence,
    LiftError,
    OrientationProvider,
    base_chain,
    closure_steps,
    compute_cl3,
    replay_trace,
    run_steps,
)

log = logging.getLogger(__name__)

REMAINDER_BUDGET = 200_000
ATTACHMENT_MAX_N = 40

POSITIVE_CLAIMS = ("phi_lt_3(G)", "phi_lt_3(G^c)", "s3(G)", "s3(G^c)")
WITNESS_CLAIMS = ("not_s3_witness",)
SEARCH_CLAIMS = ("phi_ge_3(G)", "not_s3(G)")

OK = "ok"
MALFORMED = "malformed"
DIGEST_MISMATCH = "digest_mismatch"
INVALID_BOUNDARY = "invalid_boundary"
ORIENTATION_INVALID = "orientation_invalid"
TRACE_DIVERGENCE = "trace_divergence"
WITNESS_INVALID = "witness_invalid"
UNVERIFIABLE = "unverifiable"


@dataclass
class Certificate:
    claim: str
    graph_digest: str
    orientation: Optional[List[List[int]]] = None
    beta: Optional[List[int]] = None
    trace: List[dict] = field(default_factory=list)
    witness: Optional[dict] = None
    witnesses: Optional[List[dict]] = None
    meta: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, data: dict) -> "Certificate":
        known = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in data.items() if k in known})

    @property
    def side(self) -> str:
        return "G^c" if self.claim.endswith("(G^c)") else "G"


@dataclass
class ClosureCandidate:
    side: str
    seed: Tuple[int, ...]
    closure: ClosureSequence
    kind: str
    parts: Tuple[Tuple[int, ...], Tuple[int, ...]]


@dataclass
class Verification:
    ok: bool
    code: str
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _encode_orientation(g: MultiGraph, d: Sequence[int]) -> List[List[int]]:
    return [[i, t, g.other(i, t)] for i, t in enumerate(d)]


def _meta(**extra) -> dict:
    return {"tool": "flow3", "version": __version__, **extra}


def chain_certificate(claim: str, g: MultiGraph, target: MultiGraph, chain: Chain, **meta) -> Certificate:
    return Certificate(
        claim=claim,
        graph_digest=g.digest(),
        orientation=_encode_orientation(target, chain.orientation),
        beta=list(chain.betas[0]),
        trace=chain.trace(),
        meta=_meta(**meta),
    )


# ---------------------------------------------------------------------------
# seeds and closures
# ---------------------------------------------------------------------------


def _bitsets(g: MultiGraph) -> List[int]:
    adj = [0] * g.n
    for u, v in g.edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    return adj


def _bits(mask: int) -> List[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _greedy_common(adj: List[int], start: int, size: int) -> Tuple[List[int], int]:
    """Grow ``size`` vertices from ``start`` keeping the common neighbourhood as large as possible."""
    xs = [start]
    common = adj[start]
    n = len(adj)
    while len(xs) < size:
        best, best_common = None, -1
        for x in range(n):
            if x in xs:
                continue
            c = bin(common & adj[x]).count("1")
            if c > best_common:
                best, best_common = x, c
        if best is None:
            break
        xs.append(best)
        common &= adj[best]
    return sorted(xs), common


def _seed_subgraph(f: MultiGraph, cand: ClosureCandidate) -> Tuple[List[int], List[int], OrientationProvider]:
    """Vertices, host edge ids and provider for a candidate's S3 seed."""
    a, b = cand.parts
    verts = sorted(set(a) | set(b))
    local = {v: i for i, v in enumerate(verts)}
    if cand.kind == "bipartite":
        aset, bset = set(a), set(b)
        h_edges = sorted(
            e for e, (u, v) in enumerate(f.edges) if (u in aset and v in bset) or (u in bset and v in aset)
        )
        h = f.subgraph(verts, h_edges)
        provider = bipartite_provider(h, [local[x] for x in a], [local[y] for y in b])
    else:
        h_edges = f.edges_within(verts)
        h = f.subgraph(verts, h_edges)
        provider = make_k3t_plus_provider(h, [local[x] for x in a], [local[y] for y in b])
    return verts, h_edges, provider


def find_closure_candidates(g: MultiGraph, g_complement: Optional[MultiGraph] = None) -> List[ClosureCandidate]:
    """Seeds on both sides ordered by closure size (largest first), then side, then seed.

    Seeds are ``K_{4,t}`` (t >= 10) and ``K_{3,t}`` (t >= 14) patterns grown
    greedily from every start vertex; this is a heuristic and need not reach
    the largest closure that exists.
    """
    gc = complement(g) if g_complement is None else g_complement
    found: Dict[Tuple[str, frozenset], ClosureCandidate] = {}
    for side, f in (("G", g), ("G^c", gc)):
        adj = _bitsets(f)
        for start in range(f.n):
            xs, common = _greedy_common(adj, start, 4)
            ys = _bits(common)
            if len(xs) == 4 and len(ys) >= 10:
                seed = tuple(sorted(xs + ys))
                seq = compute_cl3(f, seed)
                key = (side, seq.closure)
                if key not in found:
                    found[key] = ClosureCandidate(side, seed, seq, "bipartite", (tuple(xs), tuple(ys)))
            bs, common3 = _greedy_common(adj, start, 3)
            a_side = _bits(common3)
            if len(bs) == 3 and len(a_side) >= 14:
                seed = tuple(sorted(bs + a_side))
                if edge_connectivity(f.induced(seed)) < 4:
                    continue
                seq = compute_cl3(f, seed)
                key = (side, seq.closure)
                if key not in found:
                    found[key] = ClosureCandidate(side, seed, seq, "k3t", (tuple(bs), tuple(a_side)))
    return sorted(found.values(), key=lambda c: (-len(c.closure.closure), c.side != "G", c.seed))


def density_flags(g: MultiGraph, gc: MultiGraph) -> Dict[str, bool]:
    """Sides dense enough (|E| >= 8(n-1)) to contain a 16+ vertex S3 subgraph; informational only."""
    return {"G": g.m >= 8 * (g.n - 1), "G^c": gc.m >= 8 * (gc.n - 1)}


# ---------------------------------------------------------------------------
# certification
# ---------------------------------------------------------------------------


def small_cut_shortcut(g: MultiGraph, g_complement: Optional[MultiGraph] = None) -> Optional[Certificate]:
    """If one side has an edge cut of size <= 3, certify the other side via ``K_{s,t}`` and its closure."""
    if g.n < 26:
        raise ValueError(f"small-cut shortcut needs at least 26 vertices, got {g.n}")
    gc = complement(g) if g_complement is None else g_complement
    for cut_side, f, other, claim in (("G", g, gc, "s3(G^c)"), ("G^c", gc, g, "s3(G)")):
        lam, side = min_cut(f)
        if lam > 3:
            continue
        s = sorted(side)
        sbar = sorted(set(range(f.n)) - side)
        if len(s) > len(sbar):
            s, sbar = sbar, s
        t_side = [y for y in sbar if all(other.multiplicity(x, y) for x in s)]
        diag = {"cut_side": cut_side, "cut_size": lam, "s": len(s), "t": len(t_side)}
        if len(s) < 4 or len(t_side) < 10:
            return inconclusive(g, [f"small cut in {cut_side} but K_s,t too small: {diag}"])
        cand = ClosureCandidate(
            "G" if claim.endswith("(G)") else "G^c", tuple(sorted(s + t_side)),
            compute_cl3(other, s + t_side), "bipartite", (tuple(s), tuple(t_side)),
        )
        if len(cand.closure.closure) != other.n:
            return inconclusive(g, [f"closure of K_s,t covers {len(cand.closure.closure)}/{other.n} vertices"])
        try:
            verts, h_edges, provider = _seed_subgraph(other, cand)
            chain = run_steps(
                other, (0,) * other.n, closure_steps(other, cand.closure, h_edges, provider),
                lambda h, b: base_chain(h, b, (), "trivial"),
            )
        except (LiftError, GraphError) as exc:
            return inconclusive(g, [f"shortcut lift failed: {exc}"])
        return chain_certificate(claim, g, other, chain, route="small_cut", **diag)
    return None


def inconclusive(g: MultiGraph, diagnostics: List[str], **meta) -> Certificate:
    return Certificate("inconclusive", g.digest(), meta=_meta(diagnostics=diagnostics, **meta))


def certify_candidate(g: MultiGraph, f: MultiGraph, cand: ClosureCandidate,
                      budget: int = REMAINDER_BUDGET) -> Certificate:
    """Lift a strongly connected modulo-3 orientation of ``f / closure`` back to ``f``."""
    remainder = contract(f, cand.closure.closure).graph

    def bottom(h: MultiGraph, b):
        if h.n == 1:
            return base_chain(h, b, (), "trivial")
        out = find_sc_beta_orientation(h, b, budget)
        if out.found is None:
            why = "exhaustive: none exists" if out.exhaustive else "budget exhausted"
            raise LiftError(f"remainder on {h.n} vertices not solved ({why})")
        return base_chain(h, b, out.found, "oracle")

    verts, h_edges, provider = _seed_subgraph(f, cand)
    steps = closure_steps(f, cand.closure, h_edges, provider)
    chain = run_steps(f, (0,) * f.n, steps, bottom)
    return chain_certificate(
        f"phi_lt_3({cand.side})", g, f, chain,
        route="closure", seed_kind=cand.kind, seed=list(cand.seed),
        closure_size=len(cand.closure.closure), remainder_vertices=remainder.n,
    )


def certify_pair(g: MultiGraph, remainder_budget: int = REMAINDER_BUDGET) -> Certificate:
    """Certify ``phi < 3`` for ``g`` or its complement, or report why not."""
    if not g.is_simple():
        raise GraphError("certify_pair needs a simple graph")
    gc = complement(g)
    delta = (min_degree(g), min_degree(gc))
    report = {
        "n": g.n,
        "min_degree": list(delta),
        "preconditions": {"min_degree_ge_4": min(delta) >= 4, "n_ge_32": g.n >= 32},
        "density": density_flags(g, gc),
    }
    diagnostics: List[str] = []
    if g.n >= 26 and min(delta) >= 4:
        cert = small_cut_shortcut(g, gc)
        if cert is not None:
            if cert.claim != "inconclusive" and check_certificate(cert, g).ok:
                cert.meta["report"] = report
                return cert
            diagnostics += cert.meta.get("diagnostics", [])
    candidates = find_closure_candidates(g, gc)
    if not candidates:
        diagnostics.append("no S3 seed found on either side")
    for cand in candidates:
        f = g if cand.side == "G" else gc
        try:
            cert = certify_candidate(g, f, cand, remainder_budget)
        except (LiftError, GraphError, BudgetExceeded) as exc:
            diagnostics.append(f"{cand.side} {cand.kind} seed closure={len(cand.closure.closure)}: {exc}")
            continue
        result = check_certificate(cert, g)
        if result.ok:
            cert.meta["report"] = report
            return cert
        diagnostics.append(f"{cand.side} candidate failed verification: {result.code}")
    return inconclusive(g, diagnostics, report=report,
                        tried=[[c.side, c.kind, len(c.closure.closure)] for c in candidates])


# ---------------------------------------------------------------------------
# bad attachments
# ---------------------------------------------------------------------------


def detect_bad_attachments(g: MultiGraph, max_n: int = ATTACHMENT_MAX_N) -> List[Tuple[Tuple[int, ...], int, int]]:
    """All vertex sets of size 3..6 with at most ``3|Γ| - |E(Γ)|`` edges leaving them.

    Returns ``(vertices, inner_edges, outer_edges)`` in lexicographic order.
    A set qualifies iff ``sum(deg(v) - 3) <= inner_edges``; the search adds
    vertices in increasing order and prunes when even the best completion
    cannot reach that.
    """
    if g.n > max_n:
        raise BudgetExceeded(f"attachment search limited to {max_n} vertices (graph has {g.n})")
    deg = g.degrees()
    weight = [d - 3 for d in deg]
    mult = [[0] * g.n for _ in range(g.n)]
    for u, v in g.edges:
        mult[u][v] += 1
        mult[v][u] += 1
    max_mult = max((len(c) for c in g.pair_classes.values()), default=0)
    out: List[Tuple[Tuple[int, ...], int, int]] = []

    def rec(chosen: List[int], inner: int, wsum: int, k: int) -> None:
        if len(chosen) == k:
            if wsum <= inner:
                out.append((tuple(chosen), inner, sum(deg[v] for v in chosen) - 2 * inner))
            return
        r = k - len(chosen)
        start = chosen[-1] + 1 if chosen else 0
        if g.n - start < r:
            return
        gains = sorted(
            (sum(mult[u][c] for c in chosen) - weight[u] for u in range(start, g.n)), reverse=True
        )
        if inner - wsum + sum(gains[:r]) + max_mult * r * (r - 1) // 2 < 0:
            return
        for u in range(start, g.n):
            add = sum(mult[u][c] for c in chosen)
            chosen.append(u)
            rec(chosen, inner + add, wsum + weight[u], k)
            chosen.pop()

    for k in range(3, 7):
        rec([], 0, 0, k)
    return sorted(out)


def not_s3_witness(g: MultiGraph, gamma: Sequence[int]) -> Certificate:
    """Certificate that ``g`` is not in S3, from a bad attachment ``gamma``."""
    witness = _attachment_counts(g, gamma)
    if witness is None:
        raise ValueError(f"{sorted(gamma)} is not a bad attachment of this graph")
    return Certificate("not_s3_witness", g.digest(), witness=witness, meta=_meta())


def _attachment_counts(g: MultiGraph, gamma: Sequence[int]) -> Optional[dict]:
    gset = sorted(set(gamma))
    if len(gset) != len(gamma) or not 3 <= len(gset) <= 6 or not all(0 <= v < g.n for v in gset):
        return None
    rest = [v for v in range(g.n) if v not in set(gset)]
    if not rest:
        return None
    inner = len(g.edges_within(gset))
    outer = sum(1 for u, v in g.edges if (u in gset) != (v in gset))
    k = len(gset)
    contracted = contract(g, rest).graph
    if outer > 3 * k - inner or contracted.m >= 3 * contracted.n - 2:
        return None
    return {
        "gamma": gset,
        "in_edges": inner,
        "out_edges": outer,
        "contracted_vertices": contracted.n,
        "contracted_edges": contracted.m,
        "edge_bound": 3 * contracted.n - 2,
    }


# ---------------------------------------------------------------------------
# oracle certificates
# ---------------------------------------------------------------------------


def phi_certificate(g: MultiGraph, budget: Optional[int] = None) -> Certificate:
    out = find_sc_beta_orientation(g, (0,) * g.n, budget)
    meta = {"nodes_explored": out.nodes_explored, "exhaustive": out.exhaustive, "budget": budget}
    if out.found is not None:
        chain = base_chain(g, (0,) * g.n, out.found, "oracle")
        return chain_certificate("phi_lt_3(G)", g, g, chain, **meta)
    if out.exhaustive:
        return Certificate("phi_ge_3(G)", g.digest(), meta=_meta(**meta))
    return inconclusive(g, ["search budget exhausted"], **meta)


def s3_certificate(g: MultiGraph, budget: Optional[int] = None) -> Certificate:
    res = is_s3(g, budget)
    meta = {"nodes_explored": res.nodes_explored, "budget": budget}
    if res.member:
        table = [
            {"beta": list(b), "orientation": _encode_orientation(g, d)} for b, d in sorted(res.witnesses.items())
        ]
        return Certificate("s3(G)", g.digest(), witnesses=table, meta=_meta(**meta))
    if res.member is False:
        return Certificate("not_s3(G)", g.digest(), beta=list(res.failing), meta=_meta(**meta))
    return inconclusive(g, ["search budget exhausted"], **meta)


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------


def _decode_orientation(g: MultiGraph, rows) -> Optional[Tuple[int, ...]]:
    if not isinstance(rows, list) or len(rows) != g.m:
        return None
    tails = []
    for i, row in enumerate(rows):
        if not (isinstance(row, list) and len(row) == 3 and row[0] == i):
            return None
        _, t, h = row
        if sorted((t, h)) != sorted(g.edges[i]):
            return None
        tails.append(t)
    return tuple(tails)


def _check_orientation(g: MultiGraph, rows, beta) -> Verification:
    d = _decode_orientation(g, rows)
    if d is None:
        return Verification(False, ORIENTATION_INVALID, "orientation does not match the edge list")
    if not is_beta_orientation(g, d, beta):
        return Verification(False, ORIENTATION_INVALID, "netflow does not match the boundary")
    if not is_strongly_connected(g, d):
        return Verification(False, ORIENTATION_INVALID, "orientation is not strongly connected")
    return Verification(True, OK)


def check_certificate(cert: Certificate, g: MultiGraph) -> Verification:
    """Re-check a certificate against ``g`` without running any search."""
    try:
        return _check(cert, g)
    except (KeyError, TypeError, ValueError, AttributeError, IndexError) as exc:
        return Verification(False, MALFORMED, f"{type(exc).__name__}: {exc}")


def _check(cert: Certificate, g: MultiGraph) -> Verification:
    if not isinstance(cert.claim, str):
        return Verification(False, MALFORMED, "claim must be a string")
    if cert.graph_digest != g.digest():
        return Verification(False, DIGEST_MISMATCH, "certificate refers to a different graph")
    if cert.claim in WITNESS_CLAIMS:
        w = cert.witness or {}
        expect = _attachment_counts(g, w.get("gamma", []))
        if expect is None or any(w.get(k) != v for k, v in expect.items()):
            return Verification(False, WITNESS_INVALID, "witness counts do not hold")
        return Verification(True, OK)
    if cert.claim not in POSITIVE_CLAIMS:
        return Verification(False, UNVERIFIABLE, f"claim {cert.claim!r} carries no checkable evidence")
    target = complement(g) if cert.side == "G^c" else g
    if cert.witnesses is not None:
        seen = set()
        for entry in cert.witnesses:
            beta = entry["beta"]
            if not is_valid_boundary(beta, target.n):
                return Verification(False, INVALID_BOUNDARY, f"invalid boundary {beta}")
            res = _check_orientation(target, entry["orientation"], beta)
            if not res.ok:
                return res
            seen.add(tuple(beta))
        if cert.claim.startswith("s3") and seen != set(iter_boundaries(target.n)):
            return Verification(False, WITNESS_INVALID, f"{len(seen)} of {3 ** max(target.n - 1, 0)} boundaries witnessed")
        return Verification(True, OK)
    beta = cert.beta
    if beta is None or not is_valid_boundary(beta, target.n):
        return Verification(False, INVALID_BOUNDARY, "boundary missing or not in Z(G, Z3)")
    if cert.claim.startswith("phi") and any(beta):
        return Verification(False, INVALID_BOUNDARY, "phi claims need the zero boundary")
    res = _check_orientation(target, cert.orientation, beta)
    if not res.ok:
        return res
    if cert.trace:
        try:
            top = replay_trace(target, beta, cert.trace)
        except (LiftError, GraphError, KeyError, TypeError, ValueError, IndexError) as exc:
            return Verification(False, TRACE_DIVERGENCE, str(exc))
        if tuple(top) != _decode_orientation(target, cert.orientation):
            return Verification(False, TRACE_DIVERGENCE, "trace replays to a different orientation")
    return Verification(True, OK)


def verify_certificate(cert: Certificate, g: MultiGraph) -> bool:
    return check_certificate(cert, g).ok
