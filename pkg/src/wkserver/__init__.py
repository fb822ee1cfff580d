"""Simulation lab for the randomized weighted k-server lower bound on uniform metrics."""
from .core import (
    Configuration,
    ConsistencyError,
    CostLedger,
    DomainError,
    RangeLimitError,
    UniformSpace,
    VerificationError,
    WeightVector,
    serve_with,
    server_weight,
)
from .setsys import build_set_system, harmonic, n_seq, property3_witness, verify_set_system
from .adversary import (
    adversary_serve,
    c_closed_form,
    c_seq,
    choose_beta,
    flatten_requests,
    generate_trace,
)
from .algorithms import CheapestMove, StickyHeavy, WeightedRank, make_algorithm, run_online
from .offline import opt_cost_bruteforce, opt_cost_dp

__version__ = "0.1.0"
