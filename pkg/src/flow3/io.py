"""Edge-list and graph6 readers/writers."""

from __future__ import annotations

from typing import Iterable, List

import networkx as nx

from .multigraph import GraphError, MultiGraph


class ParseError(GraphError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def format_edge_list(g: MultiGraph) -> str:
    """Serialise in edge order (not sorted) so edge ids survive a round trip."""
    lines = [f"p mgraph {g.n} {g.m}"]
    lines += [f"e {u} {v}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> MultiGraph:
    n = m = None
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if n is not None:
                raise ParseError("duplicate header", lineno)
            if len(parts) != 4 or parts[1] != "mgraph":
                raise ParseError(f"malformed header {line!r}", lineno)
            try:
                n, m = int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError(f"malformed header {line!r}", lineno) from None
            if n < 0 or m < 0:
                raise ParseError("negative counts in header", lineno)
        elif parts[0] == "e":
            if n is None:
                raise ParseError("edge before header", lineno)
            if len(parts) != 3:
                raise ParseError(f"malformed edge line {line!r}", lineno)
            try:
                u, v = int(parts[1]), int(parts[2])
            except ValueError:
                raise ParseError(f"malformed edge line {line!r}", lineno) from None
            if not (0 <= u < n and 0 <= v < n):
                raise ParseError(f"vertex id out of range in {line!r}", lineno)
            if u == v:
                raise ParseError(f"loop at vertex {u}", lineno)
            pairs.append((u, v))
        else:
            raise ParseError(f"unknown line type {parts[0]!r}", lineno)
    if n is None:
        raise ParseError("missing 'p mgraph' header")
    if len(pairs) != m:
        raise ParseError(f"header announces {m} edges, found {len(pairs)}")
    return MultiGraph(n, tuple(pairs))


def parse_graph6(text: str) -> MultiGraph:
    s = text.strip()
    if s.startswith(">>graph6<<"):
        s = s[len(">>graph6<<"):]
    try:
        h = nx.from_graph6_bytes(s.encode("ascii"))
    except Exception as exc:  # networkx raises several types here
        raise ParseError(f"invalid graph6 string: {exc}") from None
    return MultiGraph(h.number_of_nodes(), tuple(sorted((min(u, v), max(u, v)) for u, v in h.edges())))


def to_graph6(g: MultiGraph) -> str:
    if not g.is_simple():
        raise GraphError("graph6 only encodes simple graphs")
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return nx.to_graph6_bytes(h, header=False).decode().strip()


def parse_graph(text: str) -> MultiGraph:
    """Edge-list or graph6, told apart by the first nonblank line.

    graph6 strings are a single token whose alphabet includes ``c``, ``e``
    and ``p``, so the test is whitespace rather than the leading letter.
    """
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if len(line.split()) > 1 or line == "c":
            return parse_edge_list(text)
        return parse_graph6(line)
    raise ParseError("empty input")


def format_orientation(g: MultiGraph, tails: Iterable[int]) -> List[str]:
    return [f"{i} {t} {g.other(i, t)}" for i, t in enumerate(tails)]
