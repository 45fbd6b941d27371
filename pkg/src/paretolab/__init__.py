"""paretolab: exploration-exploitation analysis of sequential black-box search.

Fits Gaussian-process surrogates to decision traces, maps candidate
decisions to (improvement, uncertainty) pairs under three uncertainty
measures, classifies decisions by their distance to the bi-objective Pareto
frontier, and relates rationality to average cumulative reward. Traces come
from synthetic agents or from human players via the bundled web game.
"""

from .agents import AgentPolicy, PolicyKind, run_agent
from .acquisition import acq_ei, acq_pi, acq_ucb, thompson_next
from .analysis import (
    ACRRecord,
    DecisionTableRow,
    Step3Row,
    acr,
    analyze_trace,
    analyze_traces,
    pareto_counts,
    run_lengths,
    step3_report,
)
from .domain import Box
from .errors import FitError, InputError, NumericalError
from .gp import (
    Dataset,
    FitOptions,
    GPPosterior,
    condition_gp,
    fit_gp,
    log_marginal_likelihood,
    posterior_mean,
    posterior_var,
)
from .kernels import ALL_KERNELS, KernelKind, KernelSpec, gram_matrix, kernel_eval
from .pareto import (
    ObjectivePair,
    ParetoFrontier,
    RationalityVerdict,
    build_grid,
    classify_decision,
    evaluate_objectives,
    frontier_distance,
    pareto_frontier,
)
from .stats import MWUResult, mann_whitney_u
from .testbed import TestProblem, evaluate_problem, get_problem, list_problems
from .traces import Trace, TraceStep, read_traces
from .uncertainty import (
    ALL_MEASURES,
    Incumbent,
    UQMeasure,
    improvement,
    uq_distance,
    uq_entropy,
    uq_sigma,
)

__version__ = "0.1.0"
