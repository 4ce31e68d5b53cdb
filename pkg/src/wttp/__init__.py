"""Node-weighted tour optimisation: W-TSP, W-TTP and TTP objectives, a (1+1)-EA
with interchangeable driver objectives, and tour similarity measures."""

from .heuristics import nearest_neighbor_tour, weighted_greedy_tour
from .instance import (
    Coord,
    Item,
    ParseError,
    Tour,
    TtpInstance,
    distance,
    format_tour_file,
    format_ttp_instance,
    load_instance,
    load_tour,
    parse_tour_file,
    parse_ttp_instance,
)
from .objectives import (
    Evaluator,
    prefix_weights,
    tsp_length,
    ttp_objective,
    wtsp_objective,
    wttp_objective,
)
from .packing import PackingPlan, effective_capacity, generate_packing, node_weights
from .search import Driver, Mutation, RunResult, run_one_plus_one_ea
from .similarity import common_edges, count_inversions, inversion_similarity

__version__ = "0.1.0"
