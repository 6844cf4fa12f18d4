"""Graph generators shared by the tests."""

from __future__ import annotations

import itertools
import random
from typing import Dict, List, Tuple

from flow3.multigraph import MultiGraph, complement, edge_connectivity, min_degree

REMAINDERS = {0: [], 3: [(0, 1), (1, 2), (0, 2)], 4: [(0, 1), (1, 2), (2, 3), (0, 3)]}


ACCEPTANCE: Dict[int, str] = {}


def planted_pair(n: int, rest: int, rng: random.Random, p: float = 0.8) -> MultiGraph:
    return planted_instance(n, rest, rng, p)[0]


def planted_instance(n: int, rest: int, rng: random.Random, p: float = 0.8) -> Tuple[MultiGraph, List[int], List[int]]:
    """A simple graph ``G`` whose complement holds a planted ``K_{4,10}``.

    The complement is a random core (edge probability ``p``) containing the ``K_{4,10}``
    plus ``rest`` extra vertices forming a triangle or 4-cycle, each joined
    to the core by two edges.  Retries until both sides have minimum degree
    at least 4 and the complement is 4-edge-connected.
    """
    core = n - rest
    while True:
        pairs = set()
        for u, v in itertools.combinations(range(core), 2):
            if rng.random() < p:
                pairs.add((u, v))
        xs = rng.sample(range(core), 4)
        ys = rng.sample([v for v in range(core) if v not in xs], 10)
        for x in xs:
            for y in ys:
                pairs.add((min(x, y), max(x, y)))
        for a, b in REMAINDERS[rest]:
            pairs.add((core + a, core + b))
        for i in range(rest):
            for t in rng.sample(range(core), 2):
                pairs.add((t, core + i))
        f = MultiGraph.from_pairs(n, sorted(pairs))
        g = complement(f)
        if min_degree(f) >= 4 and min_degree(g) >= 4 and edge_connectivity(f) >= 4:
            return g, sorted(xs), sorted(ys)


def random_connected_multigraph(n: int, m: int, rng: random.Random, max_mult: int = 3) -> MultiGraph:
    """Random tree plus random extra edges, parallel edges allowed up to ``max_mult``."""
    m = min(m, max_mult * n * (n - 1) // 2)
    pairs: List[tuple] = []
    for v in range(1, n):
        pairs.append((rng.randrange(v), v))
    while len(pairs) < m:
        u, v = sorted(rng.sample(range(n), 2))
        if pairs.count((u, v)) + pairs.count((v, u)) < max_mult:
            pairs.append((u, v))
    rng.shuffle(pairs)
    return MultiGraph.from_pairs(n, pairs)
