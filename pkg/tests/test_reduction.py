import itertools
import random

import pytest

from flow3.catalog import bipartite_provider, complete_bipartite, get_entry, make_k4_star, solve_k3
from flow3.multigraph import MultiGraph, contract, edge_connectivity, split_vertex
from flow3.orientation import (
    find_sc_beta_orientation,
    is_sc_beta_orientation,
    is_strongly_connected,
    iter_boundaries,
)
from flow3.reduction import (
    LiftError,
    OrientationProvider,
    base_chain,
    closure_steps,
    compute_cl3,
    extend_through_edge_contraction,
    lift_closure_chain,
    lift_pair_split,
    lift_through_parallel_contraction,
    lift_through_s3_contraction,
    lift_vertex_split,
    merged_boundary,
    pair_split_step,
    replay_trace,
    run_steps,
    split_boundary,
    vertex_split_step,
)

from helpers import random_connected_multigraph


def random_boundary(n, rng):
    head = [rng.randrange(3) for _ in range(n - 1)]
    return tuple(head + [(-sum(head)) % 3])


def sc_orientations(g):
    for tails in itertools.product(*[(u, v) for u, v in g.edges]):
        if is_strongly_connected(g, tails):
            yield tails


def k4():
    return MultiGraph.from_pairs(4, list(itertools.combinations(range(4), 2)))


# closure


def test_closure_examples():
    kb = complete_bipartite(5, 12)
    seq = compute_cl3(kb, list(range(4)) + list(range(5, 15)))
    assert seq.closure == frozenset(range(17))

    g = MultiGraph.from_pairs(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (0, 4)])
    seq = compute_cl3(g, [0, 1, 2])
    assert seq.order == () and seq.closure == frozenset({0, 1, 2})

    star = MultiGraph.from_pairs(5, [(0, i) for i in range(1, 5)])
    assert compute_cl3(star, [0]).closure == frozenset({0})


def test_closure_invariants():
    rng = random.Random(21)
    for _ in range(40):
        n = rng.randint(3, 12)
        g = random_connected_multigraph(n, rng.randint(n, 4 * n), rng)
        seq = compute_cl3(g, rng.sample(range(n), rng.randint(1, 3)))
        inside = set(seq.base)
        for v in seq.order:
            assert sum(1 for e in g.incidence[v] if g.other(e, v) in inside) >= 3
            inside.add(v)
        for v in set(range(n)) - inside:
            assert sum(1 for e in g.incidence[v] if g.other(e, v) in inside) <= 2


# edge contraction


def test_extend_triangle():
    tri = MultiGraph.from_pairs(3, [(0, 1), (1, 2), (0, 2)])
    small = contract(tri, (0, 1)).graph
    for d in sc_orientations(small):
        lifted = extend_through_edge_contraction(tri, 0, d)
        assert is_strongly_connected(tri, lifted)


def test_extend_k4_every_sc_orientation():
    g = k4()
    for e in range(g.m):
        small = contract(g, g.edges[e]).graph
        count = 0
        for d in sc_orientations(small):
            assert is_strongly_connected(g, extend_through_edge_contraction(g, e, d))
            count += 1
        assert count > 0


# parallel classes


def test_parallel_lift_standalone_4k2():
    g = MultiGraph(2, ((0, 1),) * 4)
    for beta in iter_boundaries(2):
        d = lift_through_parallel_contraction(g, 0, 1, beta, ())
        assert is_sc_beta_orientation(g, d, beta)


def test_parallel_lift_with_triangle():
    g = MultiGraph.from_pairs(3, [(0, 1)] * 3 + [(0, 2), (0, 2), (1, 2), (1, 2)])
    for beta in iter_boundaries(3):
        cr = contract(g, (0, 1))
        sub = find_sc_beta_orientation(cr.graph, merged_boundary(beta, cr)).found
        d = lift_through_parallel_contraction(g, 0, 1, beta, sub)
        assert is_sc_beta_orientation(g, d, beta)


def test_parallel_lift_zero_adjustment_goes_opposite():
    g = MultiGraph(2, ((0, 1),) * 4)
    d = lift_through_parallel_contraction(g, 0, 1, (0, 0), ())
    assert {d[0], d[1]} == {0, 1}


def test_parallel_lift_needs_three_copies():
    with pytest.raises(LiftError):
        lift_through_parallel_contraction(MultiGraph(2, ((0, 1),) * 2), 0, 1, (0, 0), ())


def test_parallel_lift_rejects_boundary_mismatch():
    g = MultiGraph.from_pairs(3, [(0, 1)] * 3 + [(0, 2), (0, 2), (1, 2), (1, 2)])
    cr = contract(g, (0, 1))
    sub = find_sc_beta_orientation(cr.graph, (1, 2)).found
    with pytest.raises(LiftError):
        lift_through_parallel_contraction(g, 0, 1, (0, 0, 0), sub)


# S3 contraction


def test_s3_lift_two_digon_blocks():
    # two 4K2 blocks on 0-1 and 1-2, plus two edges 0-2
    g = MultiGraph.from_pairs(3, [(0, 1)] * 4 + [(1, 2)] * 4 + [(0, 2)] * 2)
    h_edges = [0, 1, 2, 3]
    provider = get_entry("4K2").provider
    for beta in iter_boundaries(3):
        cr = contract(g, (0, 1))
        sub = find_sc_beta_orientation(cr.graph, merged_boundary(beta, cr)).found
        d, _ = lift_through_s3_contraction(g, (0, 1), h_edges, provider, beta, sub)
        assert is_sc_beta_orientation(g, d, beta)


def test_s3_lift_single_vertex_is_identity():
    g = MultiGraph.from_pairs(3, [(0, 1), (1, 2), (0, 2)])
    trivial = OrientationProvider(MultiGraph(1, ()), lambda h, b: base_chain(h, b, (), "trivial"))
    d, _ = lift_through_s3_contraction(g, (1,), [], trivial, (0, 0, 0), (0, 1, 2))
    assert d == (0, 1, 2)


def test_s3_lift_k4_11_over_k4_10():
    g = complete_bipartite(4, 11)
    hv = list(range(14))
    h_edges = [e for e, (u, v) in enumerate(g.edges) if v < 14]
    provider = bipartite_provider(g.subgraph(hv, h_edges), range(4), range(4, 14))
    rng = random.Random(22)
    cr = contract(g, hv)
    assert cr.graph.n == 2 and cr.graph.m == 4
    for _ in range(5):
        beta = random_boundary(g.n, rng)
        sub = find_sc_beta_orientation(cr.graph, merged_boundary(beta, cr)).found
        d, _ = lift_through_s3_contraction(g, hv, h_edges, provider, beta, sub)
        assert is_sc_beta_orientation(g, d, beta)


# closure chains


def test_closure_chain_k5_10():
    g = complete_bipartite(5, 10)
    base = [0, 1, 2, 3] + list(range(5, 15))
    h_edges = [e for e, (u, v) in enumerate(g.edges) if u < 4]
    provider = bipartite_provider(g.subgraph(base, h_edges), range(4), range(4, 14))
    seq = compute_cl3(g, base)
    assert seq.order == (4,)
    rng = random.Random(23)
    for _ in range(5):
        beta = random_boundary(g.n, rng)
        d = lift_closure_chain(g, seq, provider, h_edges, beta, ())
        assert is_sc_beta_orientation(g, d, beta)


def test_closure_chain_with_empty_order():
    g = complete_bipartite(4, 10)
    provider = get_entry("K_4,10").provider
    seq = compute_cl3(g, range(14))
    assert seq.order == ()
    beta = (1, 2) + (0,) * 12
    d = lift_closure_chain(g, seq, provider, list(range(g.m)), beta, ())
    assert is_sc_beta_orientation(g, d, beta)


# vertex splits


def test_vertex_split_k4_star_to_k3():
    g = make_k4_star().graph
    # vertex 0 has doubled neighbours 1, 3 and single neighbour 2
    step = vertex_split_step(g, 0, [(1, 3), (1, 2)])
    for beta in iter_boundaries(4):
        if beta[0] == 0:
            continue
        chain = run_steps(g, beta, [step], solve_k3)
        assert is_sc_beta_orientation(g, chain.orientation, beta)


def test_split_zero_boundary_free_edges_opposite():
    # v = 0 with neighbours 1, 2 (reserved) and two extra edges to 3
    g = MultiGraph.from_pairs(4, [(0, 1), (0, 2), (0, 3), (0, 3), (1, 2), (1, 2), (1, 3), (2, 3), (1, 3), (2, 3)])
    split = split_vertex(g, 0, [(0, 1)])
    beta_sub, free_tails = split_boundary(g, split, (0, 0, 0, 0))
    assert sorted(free_tails.values()) == [0, 3]
    assert sum(beta_sub) % 3 == 0


def test_lift_vertex_split_k4_star():
    g = make_k4_star().graph
    a, b = 1, 3
    split = split_vertex(g, 0, [(0, 6)])
    for beta in iter_boundaries(4):
        beta_sub, _ = split_boundary(g, split, beta)
        sub = find_sc_beta_orientation(split.graph, beta_sub).found
        if sub is None:
            continue
        d = lift_vertex_split(g, 0, a, b, beta, sub)
        assert is_sc_beta_orientation(g, d, beta)


def test_split_boundary_conserves_sum():
    rng = random.Random(24)
    for _ in range(60):
        n = rng.randint(4, 8)
        g = random_connected_multigraph(n, rng.randint(2 * n, 4 * n), rng)
        v = max(range(n), key=g.degree)
        nbrs = sorted(g.neighbors(v))
        if g.degree(v) < 4 or len(nbrs) < 2:
            continue
        split = split_vertex(g, v, [(g.edges_between(v, nbrs[0])[0], g.edges_between(v, nbrs[1])[0])])
        beta = random_boundary(n, rng)
        beta_sub, _ = split_boundary(g, split, beta)
        assert sum(beta_sub) % 3 == 0


def test_low_degree_split_rejected():
    tri = MultiGraph.from_pairs(3, [(0, 1), (1, 2), (0, 2)])
    with pytest.raises(LiftError):
        lift_vertex_split(tri, 0, 1, 2, (0, 0, 0), (0,))


# pair splits


def test_pair_split_single_neighbour_becomes_parallel_contract():
    g = MultiGraph.from_pairs(4, [(0, 1)] * 4 + [(1, 2)] * 2 + [(1, 3)] * 2 + [(2, 3)] * 4)
    step = pair_split_step(g, 0, 1, 2, 3)
    assert step.kind == "parallel_contract"
    beta = (1, 0, 2, 0)
    chain = run_steps(g, beta, [step], lambda h, b: base_chain(h, b, find_sc_beta_orientation(h, b).found, "oracle"))
    assert is_sc_beta_orientation(g, chain.orientation, beta)


def test_pair_split_low_outside_degree_rejected():
    # u, v joined twice, each with exactly two edges to the rest
    g = MultiGraph.from_pairs(4, [(0, 1), (0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (2, 3), (2, 3), (2, 3)])
    with pytest.raises(LiftError):
        pair_split_step(g, 0, 1, 2, 3)


def test_lift_pair_split_on_k3t_component():
    from flow3.catalog import k3t_plus_steps

    t = 14
    pairs = [(b, 3 + j) for b in range(3) for j in range(t)] + [(3 + 2 * i, 4 + 2 * i) for i in range(t // 2)]
    g = MultiGraph.from_pairs(3 + t, pairs)
    steps, reduced, _, _ = k3t_plus_steps(g, [0, 1, 2], list(range(3, 3 + t)))
    assert any(s.kind == "pair_split" for s in steps)
    step = next(s for s in steps if s.kind == "pair_split")
    p = step.payload
    assert {p["a"], p["b"]} <= {0, 1, 2}
    beta = (0,) * g.n
    chain = run_steps(g, beta, steps, lambda h, b: base_chain(h, b, find_sc_beta_orientation(h, b).found, "oracle"))
    assert is_sc_beta_orientation(g, chain.orientation, beta)
    i = next(i for i, s in enumerate(steps) if s.kind == "pair_split")
    d = lift_pair_split(chain.graphs[i], p["u"], p["v"], p["a"], p["b"], chain.betas[i], chain.orientations[i + 1])
    assert d == chain.orientations[i]


# round trips and traces


def test_contract_then_lift_keeps_outside_edges():
    rng = random.Random(25)
    lifted = 0
    for _ in range(300):
        g = random_connected_multigraph(5, rng.randint(10, 16), rng, max_mult=4)
        pairs = [(u, v) for (u, v), ids in g.pair_classes.items() if len(ids) >= 3]
        if not pairs or edge_connectivity(g) < 4:
            continue
        x, y = pairs[0]
        beta = random_boundary(5, rng)
        cr = contract(g, (x, y))
        sub = find_sc_beta_orientation(cr.graph, merged_boundary(beta, cr)).found
        if sub is None:
            continue
        d = lift_through_parallel_contraction(g, x, y, beta, sub)
        assert is_sc_beta_orientation(g, d, beta)
        for old, new in cr.edge_map.items():
            assert cr.vertex_map[d[old]] == sub[new]
        lifted += 1
    assert lifted >= 10


def test_replay_reproduces_k4_10_chain():
    g = complete_bipartite(4, 10)
    provider = get_entry("K_4,10").provider
    rng = random.Random(26)
    for _ in range(3):
        beta = random_boundary(g.n, rng)
        chain = provider.certify(beta)
        assert len(chain.steps) >= 10
        assert replay_trace(g, beta, chain.trace()) == chain.orientation


def test_replay_detects_tampering():
    g = complete_bipartite(4, 10)
    beta = (0,) * 14
    trace = get_entry("K_4,10").provider.certify(beta).trace()
    trace[0]["payload"]["pairs"][0].reverse()
    with pytest.raises(LiftError):
        replay_trace(g, beta, trace)


def test_closure_steps_replay():
    g = complete_bipartite(5, 12)
    base = [0, 1, 2, 3] + list(range(5, 15))
    h_edges = [e for e, (u, v) in enumerate(g.edges) if u < 4 and v < 15]
    provider = bipartite_provider(g.subgraph(base, h_edges), range(4), range(4, 14))
    seq = compute_cl3(g, base)
    beta = random_boundary(g.n, random.Random(27))
    chain = run_steps(g, beta, closure_steps(g, seq, h_edges, provider), lambda h, b: base_chain(h, b, (), "trivial"))
    assert replay_trace(g, beta, chain.trace()) == chain.orientation
