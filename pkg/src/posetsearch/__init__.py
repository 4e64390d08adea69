"""Classical and simulated-quantum search of partially ordered sets."""

from .errors import (
    BudgetExceeded,
    ConditionViolation,
    CycleError,
    EmptySetError,
    InconsistentOracle,
    NotForestError,
    PosetSearchError,
    PromiseViolation,
    RangeError,
    RedundantCoverError,
    SizeError,
    UndefinedError,
    UnsortedInput,
)
from .poset import (
    ChainDecomposition,
    GammaResult,
    Poset,
    antichain,
    build_poset,
    central_element,
    chain,
    count_ideals,
    dilworth_decomposition,
    exact_decision_depth,
    forest_poset,
    gamma_bruteforce,
    grid_poset,
    height,
    maximal_elements,
    random_poset,
    siblings,
    width,
)
from .oracles import (
    AbstractSession,
    ConcreteSession,
    QueryLedger,
    assign_random_linear_extension,
    layered_instance,
)
from .qsim import (
    OraclePredicate,
    amplify_bound,
    amplify_exact,
    bbht_search,
    exact_grover,
    grover_iterations,
    grover_success_prob,
    recursion_cost_model,
    recursive_amplified_run,
)
from .abstract_search import forest_search, forest_search_multi, halving_learner
from .arrays import SortedArray2D, random_sorted_array
from .concrete_search import (
    classical_2d_search,
    ddim_search,
    dilworth_search_classical,
    dilworth_search_quantum,
    quantum_2d_search,
)
from .intersect import (
    merge_intersect_baseline,
    multi_block_intersect,
    single_block_search,
)

__version__ = "0.1.0"
