"""Energy-minimal scheduling of non-migratory tasks on restricted parallel processors.

Each task has a work amount (CPU cycles) and a set of eligible processors;
all tasks share a common deadline and processors scale their speed, paying
``speed ** alpha`` power.
"""

from .baselines import BudgetExceededError, OracleBudget, brute_force_minmax, brute_force_opt, lfj, lfm
from .core import (
    Assignment,
    InfeasibleError,
    Instance,
    InvalidAssignmentError,
    InvalidInstanceError,
    SchedulingError,
    Task,
    Violation,
    approximation_bound,
    check_feasibility,
    energy,
    energy_of_loads,
    load_vector,
    make_instance,
    max_eligibility,
    speeds,
    validate_instance,
)
from .harness import BenchReport, GenParams, gen_inclusive, gen_random, generate, run_bench, run_sweep, write_report
from .io import ParseError, parse_instance, write_instance
from .relax import ConvergenceError, FractionalAssignment, RelaxReport, solve_relaxation, stationarity_residual
from .rounding import RoundingTrace, SupportGraph, break_cycles, build_support_graph, fdr, round_forest, smax_guarantee
from .uniform import FlowNetwork, MinMaxResult, bs_algo, build_network, ecsemrpp, max_flow

__version__ = "0.1.0"
