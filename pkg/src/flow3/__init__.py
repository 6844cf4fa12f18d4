"""Strongly connected modulo-3 orientations: search, reductions and certificates."""

__version__ = "0.1.0"

from .multigraph import GraphError, MultiGraph, complement, contract, edge_connectivity, min_cut  # noqa: E402
from .orientation import (  # noqa: E402
    find_sc_beta_orientation,
    is_s3,
    is_sc_beta_orientation,
    phi_lt_3,
    totaledge_boundary,
)
from .reduction import compute_cl3, replay_trace  # noqa: E402
from .pipeline import (  # noqa: E402
    Certificate,
    certify_pair,
    check_certificate,
    detect_bad_attachments,
    not_s3_witness,
    verify_certificate,
)

__all__ = [
    "Certificate",
    "GraphError",
    "MultiGraph",
    "certify_pair",
    "check_certificate",
    "complement",
    "compute_cl3",
    "contract",
    "detect_bad_attachments",
    "edge_connectivity",
    "find_sc_beta_orientation",
    "is_s3",
    "is_sc_beta_orientation",
    "min_cut",
    "not_s3_witness",
    "phi_lt_3",
    "replay_trace",
    "totaledge_boundary",
    "verify_certificate",
]
