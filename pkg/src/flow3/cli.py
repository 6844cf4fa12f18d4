"""``flow3`` command-line front end.

Exit codes: 0 verified positive, 1 verified negative or witness,
2 inconclusive (or a certificate that fails verification), 3 input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from typing import List, Optional, Sequence

from . import __version__
from .catalog import IN_S3, NOT_IN_S3, get_entry
from .io import ParseError, format_edge_list, parse_graph
from .multigraph import GraphError, MultiGraph, complement, edge_connectivity, min_degree
from .orientation import BudgetExceeded, DEFAULT_BUDGET, is_valid_boundary
from .pipeline import (
    POSITIVE_CLAIMS,
    Certificate,
    certify_pair,
    chain_certificate,
    check_certificate,
    detect_bad_attachments,
    not_s3_witness,
    phi_certificate,
    s3_certificate,
)
from .reduction import compute_cl3

EXIT_POSITIVE, EXIT_NEGATIVE, EXIT_INCONCLUSIVE, EXIT_INPUT = 0, 1, 2, 3

log = logging.getLogger("flow3")


@dataclass
class RunConfig:
    budget_points: int = DEFAULT_BUDGET
    rng_seed: int = 0
    output_path: Optional[str] = None
    format: str = "text"

    def __post_init__(self):
        if self.budget_points < 1:
            raise ValueError("budget must be at least 1")


def read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def parse_input(path: str) -> MultiGraph:
    return parse_graph(read_text(path))


def _parse_ints(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ParseError(f"expected comma-separated integers, got {text!r}") from None


def _status_line(cert: Certificate, n: int) -> str:
    claim = cert.claim
    side = "G^c" if claim.endswith("(G^c)") else "G"
    if claim.startswith("phi_lt_3"):
        return f"phi({side}) < 3: strongly-connected modulo-3 orientation found"
    if claim == "phi_ge_3(G)":
        return "phi(G) >= 3: no strongly-connected modulo-3 orientation (exhaustive)"
    if claim.startswith("s3") and cert.witnesses is not None:
        return f"in S3: {len(cert.witnesses)}/{3 ** max(n - 1, 0)} boundary classes witnessed"
    if claim.startswith("s3"):
        return f"{side} in S3: boundary {cert.beta} witnessed by a lifted chain"
    if claim == "not_s3(G)":
        return f"not in S3: boundary {cert.beta} has no strongly-connected orientation (exhaustive)"
    if claim == "not_s3_witness":
        w = cert.witness or {}
        return (
            f"not in S3: bad attachment {w.get('gamma')} leaves a contraction with "
            f"{w.get('contracted_vertices')} vertices and {w.get('contracted_edges')} edges "
            f"< {w.get('edge_bound')}"
        )
    return "inconclusive"


def render_report(cert: Certificate, g: Optional[MultiGraph] = None) -> str:
    """Human-readable summary of a certificate, with graph counts when ``g`` is given."""
    n = g.n if g is not None else len(cert.beta or [])
    if g is not None and cert.side == "G^c":
        n = g.n
    lines = [_status_line(cert, n), f"claim: {cert.claim}"]
    if g is not None:
        lam = edge_connectivity(g)
        lines.append(f"n={g.n} m={g.m} min_degree={min_degree(g)} edge_connectivity={lam}")
    if cert.trace:
        lines.append(f"trace: {len(cert.trace)} steps ({', '.join(s['kind'] for s in cert.trace)})")
    report = cert.meta.get("report")
    if report:
        pre = ", ".join(f"{k}={v}" for k, v in sorted(report["preconditions"].items()))
        lines.append(f"min degrees (G, G^c): {report['min_degree']}; {pre}")
    if cert.meta.get("exhaustive"):
        lines.append(f"search: {cert.meta.get('nodes_explored')} nodes, exhaustive")
    if cert.claim == "inconclusive":
        for side, kind, size in cert.meta.get("tried", []):
            lines.append(f"tried: {side} {kind} seed, closure of {size} vertices")
        for reason in cert.meta.get("diagnostics", []):
            lines.append(f"reason: {reason}")
    if g is not None and (cert.claim in POSITIVE_CLAIMS or cert.claim == "not_s3_witness"):
        res = check_certificate(cert, g)
        lines.append(f"verification: {res.code}" + (f" ({res.message})" if res.message else ""))
    return "\n".join(lines)


def exit_code(cert: Certificate) -> int:
    if cert.claim in POSITIVE_CLAIMS:
        return EXIT_POSITIVE
    if cert.claim == "inconclusive":
        return EXIT_INCONCLUSIVE
    return EXIT_NEGATIVE


def to_dot(g: MultiGraph, cert: Certificate) -> str:
    lines = ["digraph orientation {"]
    lines += [f"  {v};" for v in range(g.n)]
    lines += [f'  {t} -> {h} [label="{e}"];' for e, t, h in cert.orientation or []]
    lines.append("}")
    return "\n".join(lines) + "\n"


def _emit(args, text: str) -> None:
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _emit_cert(args, cert: Certificate, g: Optional[MultiGraph]) -> int:
    _emit(args, cert.dumps() if args.json else render_report(cert, g))
    if args.dot and cert.orientation:
        target = complement(g) if cert.side == "G^c" else g
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(to_dot(target, cert))
    return exit_code(cert)


def cmd_certify_pair(args, cfg: RunConfig) -> int:
    g = parse_input(args.file)
    return _emit_cert(args, certify_pair(g), g)


def cmd_oracle(args, cfg: RunConfig) -> int:
    g = parse_input(args.file)
    if args.question == "phi":
        cert = phi_certificate(g, cfg.budget_points)
    else:
        cert = s3_certificate(g, cfg.budget_points)
    cert.meta["budget"] = cfg.budget_points
    return _emit_cert(args, cert, g)


def cmd_closure(args, cfg: RunConfig) -> int:
    g = parse_input(args.file)
    base = _parse_ints(args.base)
    if not base or any(not 0 <= v < g.n for v in base):
        raise ParseError(f"base vertices must lie in 0..{g.n - 1}")
    seq = compute_cl3(g, base)
    out = {"base": list(seq.base), "order": list(seq.order), "closure": sorted(seq.closure)}
    if args.json:
        _emit(args, json.dumps(out, sort_keys=True))
    else:
        _emit(args, f"closure ({len(seq.closure)}/{g.n} vertices): {out['closure']}\norder: {out['order']}")
    return EXIT_POSITIVE


def cmd_attachments(args, cfg: RunConfig) -> int:
    g = parse_input(args.file)
    found = detect_bad_attachments(g)
    if args.json:
        certs = [not_s3_witness(g, gamma).to_json() for gamma, _, _ in found]
        _emit(args, json.dumps(certs, sort_keys=True, indent=2))
    else:
        lines = [f"{len(found)} bad attachment(s)"]
        lines += [f"{list(gamma)} in_edges={i} out_edges={o}" for gamma, i, o in found]
        _emit(args, "\n".join(lines))
    return EXIT_NEGATIVE if found else EXIT_INCONCLUSIVE


def cmd_verify(args, cfg: RunConfig) -> int:
    try:
        data = json.loads(read_text(args.certificate))
        cert = Certificate.from_json(data)
    except (json.JSONDecodeError, TypeError) as exc:
        raise ParseError(f"certificate is not valid JSON: {exc}") from None
    g = parse_input(args.file)
    res = check_certificate(cert, g)
    if args.json:
        _emit(args, json.dumps({"ok": res.ok, "code": res.code, "message": res.message}, sort_keys=True))
    else:
        _emit(args, f"{'accepted' if res.ok else 'rejected'}: {res.code}" + (f" ({res.message})" if res.message else ""))
    if not res.ok:
        return EXIT_INCONCLUSIVE
    return exit_code(cert)


def cmd_catalog(args, cfg: RunConfig) -> int:
    try:
        entry = get_entry(args.name)
    except (KeyError, ValueError) as exc:
        raise ParseError(str(exc)) from None
    g = entry.graph
    if args.beta is None:
        text = f"c {entry.name} status={entry.claimed_status}\n" + format_edge_list(g)
        _emit(args, text.rstrip("\n"))
        return {IN_S3: EXIT_POSITIVE, NOT_IN_S3: EXIT_NEGATIVE}.get(entry.claimed_status, EXIT_INCONCLUSIVE)
    beta = _parse_ints(args.beta)
    if not is_valid_boundary(beta, g.n):
        raise ParseError(f"{beta} is not a boundary on {g.n} vertices (values 0..2, sum divisible by 3)")
    if entry.provider is None:
        _emit(args, f"{entry.name}: status {entry.claimed_status}; no provider")
        return EXIT_NEGATIVE if entry.claimed_status == NOT_IN_S3 else EXIT_INCONCLUSIVE
    chain = entry.provider.certify(beta)
    cert = chain_certificate("s3(G)", g, g, chain, catalog=entry.name)
    return _emit_cert(args, cert, g)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="flow3", description="Strongly connected modulo-3 orientations and certificates.")
    p.add_argument("--version", action="version", version=f"flow3 {__version__}")
    p.add_argument("--budget", type=int, default=None, help="search node budget (default 3^20 or $FLOW3_BUDGET)")
    p.add_argument("--seed", type=int, default=0, help="random seed for randomized helpers")
    p.add_argument("--json", action="store_true", help="print JSON instead of a text report")
    p.add_argument("--dot", metavar="PATH", help="also write the certified orientation as DOT")
    p.add_argument("-o", "--output", metavar="PATH", help="write the main output to a file")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("certify-pair", help="certify phi < 3 for a graph or its complement")
    s.add_argument("file", help="edge-list or graph6 file, '-' for stdin")
    s.set_defaults(func=cmd_certify_pair)

    s = sub.add_parser("oracle", help="exhaustive search")
    s.add_argument("question", choices=["s3", "phi"])
    s.add_argument("file")
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("closure", help="3-closure of a vertex set")
    s.add_argument("file")
    s.add_argument("--base", required=True, help="comma-separated base vertices")
    s.set_defaults(func=cmd_closure)

    s = sub.add_parser("attachments", help="list bad attachments")
    s.add_argument("file")
    s.set_defaults(func=cmd_attachments)

    s = sub.add_parser("verify", help="check a certificate against a graph")
    s.add_argument("certificate")
    s.add_argument("file")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("catalog", help="print a named graph, or certify a boundary on it")
    s.add_argument("name", help="e.g. 4K2, K3^1, K3^2, K4*, K_4,10")
    s.add_argument("--beta", help="comma-separated boundary to certify")
    s.set_defaults(func=cmd_catalog)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    budget = args.budget if args.budget is not None else int(os.environ.get("FLOW3_BUDGET", DEFAULT_BUDGET))
    try:
        cfg = RunConfig(budget, args.seed, args.output, "json" if args.json else "text")
        return args.func(args, cfg)
    except (ParseError, GraphError, OSError, ValueError) as exc:
        print(f"flow3: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceeded as exc:
        print(f"flow3: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE


if __name__ == "__main__":
    sys.exit(main())
