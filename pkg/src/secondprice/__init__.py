"""Second-price (one-slot GSP) keyword allocation toolkit: exact auction
semantics, offline and online solvers, hardness-instance generators, and
a reproducible Monte Carlo verification harness."""

from .model import (
    FLAVOR_2PAA,
    FLAVOR_2PM,
    SKIP,
    AuctionError,
    AuctionState,
    Decision,
    Instance,
    Ledger,
    NoSuchBidError,
    OutbidError,
    apply_decision,
    effective_bid,
    load_allocation,
    load_instance,
    r_min,
    run_allocation,
    save_allocation,
    save_instance,
    second_price_upper_bound,
    validate_instance,
)
from .graphs import BipartiteGraph, graph_from_instance, instance_from_graph
from .offline import (
    EdgeClass,
    Matching,
    brute_force_1paa_opt,
    brute_force_2paa_opt,
    brute_force_2pm_opt,
    classify_edge,
    maximum_bipartite_matching,
    reverse_match,
    top_c_allocate,
)
from .online import (
    AlwaysSkip,
    GreedyMatcher,
    OnlineAlgorithm,
    Ranking,
    RankingSimulator,
    SimulateState,
    TrivialFirst,
    greedy_2pm,
    ranking,
    ranking_prime,
    ranking_simulate,
    run_online,
    trivial_first,
)
from .generators import (
    AdversaryGame,
    ChainInstance,
    LeftCopyMap,
    SatFormula,
    SimpleGraph,
    deterministic_adversary,
    gen_3sat_2pm,
    gen_chain_instance,
    gen_partition_2paa,
    gen_random_2paa,
    gen_random_2pm,
    gen_vc_2pm,
    is_satisfiable,
    left_k_copy,
    min_vertex_cover_size,
    parse_dimacs,
    parse_edge_list,
    partition_hardness_premises,
    partition_witness_value,
    replay_partition_witness,
    sample_chain,
)
from .bridge import (
    FirstPriceAllocation,
    RandomConstructionSampler,
    construct_with_marks,
    first_price_value,
    is_prefix_normalized,
    normalize_prefix_budget,
    proxy_bid,
    proxy_price_setter,
    random_construction,
    second_price_proxy_bids,
)
from .rng import CoinStream, Rng, make_coins, make_permutation
from .stats import TrialStats, Welford
from .harness import SimulationTask, TrialError, run_trials
from .verify import DEFAULT_SEED, SUITES, VerifyReport, run_suite

__version__ = "0.1.0"
