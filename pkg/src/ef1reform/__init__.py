"""Reforming allocations of indivisible goods into EF1 allocations by exchanges."""

from .core import (
    DEFAULT_BUDGET,
    INFINITY,
    Allocation,
    BudgetExceeded,
    ExchangeStep,
    GoodNotHeld,
    Instance,
    ReformError,
    Unreformable,
    UtilityClass,
    WrongUtilityClass,
    apply_exchange,
    classify_utilities,
    is_balanced,
    is_ef1,
    is_ef1_pair,
    is_s_balanced,
    is_weak_ef1,
    replay,
    round_robin,
    size_vector,
)
from .generators import (
    ReducedInstance,
    SourceProblem,
    decide,
    gen_balanced_multi_partition,
    random_allocation,
    random_instance,
    reduce,
    solve_source,
)
from .optimal import (
    ExchangeGraph,
    Movement,
    enumerate_movements,
    exchange_distance_exact,
    exchange_sequence,
    max_circuit_partition,
    optimal_binary_const,
    optimal_exchanges,
    optimal_exchanges_with_method,
    optimal_identical_binary,
    optimal_two_identical,
)
from .oracle import (
    beneficial_reachable_ef1,
    enumerate_allocations,
    exchange_distance_bfs,
    exists_ef1_bruteforce,
    min_exchanges_bfs,
    reaches_ef1_within,
    shortest_ef1_path,
)
from .reformability import (
    TypeCountMatrix,
    enumerate_ef1_classes,
    reformable,
    reformable_binary_const,
    reformable_dp,
    reformable_identical_binary,
    reformable_two_identical,
    reformable_with_method,
)
from .weak_ef1 import TraceStep, algorithm_A, verify_trace
from .worst_case import (
    BoundReport,
    CategoryPlan,
    constrained_round_robin,
    general_bounds,
    construct_ef1_within_bound,
    idenbin_bounds,
    lower_bound_formula,
    lower_bound_instance,
    upper_bound_formula,
)

__version__ = "0.1.0"
