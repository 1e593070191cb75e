"""Node automata for local broadcast, RLNC global broadcast and contention estimation."""

from .common import Packet, ProtocolInvariantError, frame, unframe
from .estimation import run_estimation
from .local import (
    complete_graph,
    neighborhood_contention,
    random_payloads,
    run_local_multihop,
    run_local_single_hop_full,
    run_local_single_hop_half,
)
from .rlnc import default_round_bound, run_rlnc, run_rlnc_after_estimation, run_rlnc_bcc

__all__ = [
    "Packet",
    "ProtocolInvariantError",
    "complete_graph",
    "default_round_bound",
    "frame",
    "neighborhood_contention",
    "random_payloads",
    "run_estimation",
    "run_local_multihop",
    "run_local_single_hop_full",
    "run_local_single_hop_half",
    "run_rlnc",
    "run_rlnc_after_estimation",
    "run_rlnc_bcc",
    "unframe",
]
