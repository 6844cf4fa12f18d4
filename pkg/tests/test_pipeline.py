import itertools
import json
import random

import pytest

from flow3.catalog import complete_bipartite, make_bad_attachment_example
from flow3.multigraph import GraphError, MultiGraph, complement
from flow3.pipeline import (
    Certificate,
    certify_candidate,
    certify_pair,
    check_certificate,
    detect_bad_attachments,
    find_closure_candidates,
    not_s3_witness,
    phi_certificate,
    s3_certificate,
    small_cut_shortcut,
    verify_certificate,
)

from helpers import planted_pair


def complete(n):
    return MultiGraph.from_pairs(n, list(itertools.combinations(range(n), 2)))


def two_cliques(k, bridges):
    pairs = list(itertools.combinations(range(k), 2)) + [(k + a, k + b) for a, b in itertools.combinations(range(k), 2)]
    pairs += [(i, k + i) for i in range(bridges)]
    return MultiGraph.from_pairs(2 * k, pairs)


def brute_attachments(g):
    out = []
    for k in range(3, 7):
        for gamma in itertools.combinations(range(g.n), k):
            s = set(gamma)
            inner = sum(1 for u, v in g.edges if u in s and v in s)
            outer = sum(1 for u, v in g.edges if (u in s) != (v in s))
            if outer <= 3 * k - inner:
                out.append((gamma, inner, outer))
    return sorted(out)


# small-cut shortcut


def test_small_cut_shortcut_two_cliques():
    g = two_cliques(15, 2)
    cert = small_cut_shortcut(g)
    assert cert.claim == "s3(G^c)"
    assert verify_certificate(cert, g)


def test_small_cut_shortcut_inapplicable():
    rng = random.Random(41)
    g = planted_pair(32, 0, rng)
    assert small_cut_shortcut(g) is None


def test_small_cut_shortcut_size_bound():
    with pytest.raises(ValueError):
        small_cut_shortcut(complete(25))


# candidates


def test_candidates_spanning_bipartite_complement():
    # G^c contains K_{4,28} on all 32 vertices
    kb = complete_bipartite(4, 28)
    g = complement(kb)
    cands = find_closure_candidates(g)
    assert cands and cands[0].side == "G^c" and len(cands[0].closure.closure) == 32


def test_candidates_empty_when_small():
    assert find_closure_candidates(complete(8)) == []


def test_candidate_order():
    g = planted_pair(34, 3, random.Random(42))
    cands = find_closure_candidates(g)
    keys = [(-len(c.closure.closure), c.side != "G", c.seed) for c in cands]
    assert keys == sorted(keys)


# certify_pair


def test_certify_k40_reports_preconditions():
    g = complete(40)
    cert = certify_pair(g)
    assert cert.claim == "phi_lt_3(G)"
    assert cert.meta["report"]["min_degree"] == [39, 0]
    assert cert.meta["report"]["preconditions"]["min_degree_ge_4"] is False
    assert verify_certificate(cert, g)


@pytest.mark.parametrize("rest", [3, 4])
def test_complement_remainder_is_solved_and_lifted(rest):
    g = planted_pair(36, rest, random.Random(43 + rest))
    gc = complement(g)
    cand = next(c for c in find_closure_candidates(g, gc) if c.side == "G^c")
    assert len(cand.closure.closure) == g.n - rest
    cert = certify_candidate(g, gc, cand)
    assert cert.claim == "phi_lt_3(G^c)"
    assert cert.meta["remainder_vertices"] == rest + 1
    assert verify_certificate(cert, g)


def test_seeded_random_suite_only_emits_verified_certificates():
    rng = random.Random(44)
    found = 0
    for n in (32, 36, 40):
        pairs = [p for p in itertools.combinations(range(n), 2) if rng.random() < 0.5]
        g = MultiGraph.from_pairs(n, pairs)
        cert = certify_pair(g)
        if cert.claim != "inconclusive":
            found += 1
            assert verify_certificate(cert, g)
    print(f"random pairs certified: {found}/3")


def test_certify_pair_rejects_multigraph():
    with pytest.raises(GraphError):
        certify_pair(MultiGraph(2, ((0, 1), (0, 1))))


def test_inconclusive_lists_reasons():
    cert = certify_pair(complete(8))
    assert cert.claim == "inconclusive"
    assert cert.meta["diagnostics"]
    assert check_certificate(cert, complete(8)).code == "unverifiable"


# bad attachments


def test_detect_templates():
    g, gamma = make_bad_attachment_example("triangle")
    assert (tuple(gamma), 3, 6) in detect_bad_attachments(g)
    g, gamma = make_bad_attachment_example("c4")
    assert (tuple(gamma), 4, 8) in detect_bad_attachments(g)


def test_detect_none_in_k10():
    assert detect_bad_attachments(complete(10)) == []


def test_detect_matches_brute_force():
    rng = random.Random(45)
    nonempty = 0
    for _ in range(25):
        n = rng.randint(6, 14)
        p = rng.choice([0.2, 0.35, 0.5])
        g = MultiGraph.from_pairs(n, [q for q in itertools.combinations(range(n), 2) if rng.random() < p])
        expect = brute_attachments(g)
        assert detect_bad_attachments(g) == expect
        nonempty += bool(expect)
    assert nonempty > 5


def test_detect_matches_brute_force_on_multigraphs():
    rng = random.Random(46)
    for _ in range(10):
        n = rng.randint(6, 10)
        pairs = [q for q in itertools.combinations(range(n), 2) for _ in range(rng.choice([0, 0, 1, 2, 3]))]
        g = MultiGraph.from_pairs(n, pairs)
        assert detect_bad_attachments(g) == brute_attachments(g)


def test_detect_guard_for_large_graphs():
    from flow3.orientation import BudgetExceeded

    with pytest.raises(BudgetExceeded):
        detect_bad_attachments(complete(41))


def test_witness_arithmetic():
    g, gamma = make_bad_attachment_example("triangle")
    w = not_s3_witness(g, gamma).witness
    assert (w["contracted_vertices"], w["contracted_edges"], w["edge_bound"]) == (4, 9, 10)
    g, gamma = make_bad_attachment_example("c4")
    w = not_s3_witness(g, gamma).witness
    assert (w["contracted_vertices"], w["contracted_edges"], w["edge_bound"]) == (5, 12, 13)


def test_witness_rejects_non_attachment():
    g, gamma = make_bad_attachment_example("triangle")
    with pytest.raises(ValueError):
        not_s3_witness(g, [0, 1, 2])


# verification


def test_wrong_graph_is_digest_mismatch():
    g = MultiGraph(2, ((0, 1),) * 4)
    cert = phi_certificate(g)
    assert check_certificate(cert, MultiGraph(2, ((0, 1),) * 5)).code == "digest_mismatch"


def test_flipped_edge_rejected():
    g = complete_bipartite(4, 10)
    cert = phi_certificate(g)
    assert check_certificate(cert, g).ok
    e, t, h = cert.orientation[3]
    cert.orientation[3] = [e, h, t]
    assert check_certificate(cert, g).code == "orientation_invalid"


def test_full_s3_table():
    g = MultiGraph(2, ((0, 1),) * 4)
    cert = s3_certificate(g)
    assert cert.claim == "s3(G)" and len(cert.witnesses) == 3
    assert check_certificate(cert, g).ok
    cert.witnesses.pop()
    assert check_certificate(cert, g).code == "witness_invalid"


def test_negative_search_claims_are_unverifiable():
    cert = phi_certificate(complete(6))
    assert cert.claim == "phi_ge_3(G)"
    assert check_certificate(cert, complete(6)).code == "unverifiable"


def test_malformed_certificate():
    g = MultiGraph(2, ((0, 1),) * 4)
    cert = phi_certificate(g)
    cert.orientation = "nonsense"
    assert check_certificate(cert, g).code == "orientation_invalid"
    cert = phi_certificate(g)
    cert.trace = [{"kind": "base"}]
    assert check_certificate(cert, g).code in ("trace_divergence", "malformed")
    assert check_certificate(Certificate(claim=3, graph_digest=g.digest()), g).code == "malformed"


def test_json_round_trip():
    g = planted_pair(32, 0, random.Random(47))
    cert = certify_pair(g)
    again = Certificate.from_json(json.loads(cert.dumps()))
    assert again == cert
    assert verify_certificate(again, g)
