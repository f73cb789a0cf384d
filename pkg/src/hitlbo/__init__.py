"""Finite-domain Bayesian optimization over reduced combinatorial problems.

The pipeline: :mod:`hitlbo.problems` parses and scores combinatorial
instances, :mod:`hitlbo.reduction` turns them into seeded univariate
functions on integer domains, :mod:`hitlbo.gp` and :mod:`hitlbo.bo` supply
the Gaussian-process machinery and the budgeted optimization loop with its
closed-form regret calculators, :mod:`hitlbo.concentration` the tail-bound
calculators, and :mod:`hitlbo.search` the prior-queried cell-tree search
that asks an expert (:mod:`hitlbo.expert`) for a Gaussian prior at every
expansion.  :mod:`hitlbo.server` exposes the expert queue over HTTP for a
human console.
"""

from .bo import (BOConfig, BORunResult, BoundReport, cell_ub, dominance_factor,
                 make_bound_report, normregret_lower, normregret_upper,
                 regret_report, run_bo)
from .concentration import (ConcentrationParams, mcdiarmid_bound,
                            mean_concentration_bound, path_success,
                            required_samples)
from .expert import (ConsistencyLedger, ExpertBridge, ExpertQuery,
                     ExpertResponse, ExpertTimeout, LedgerContradiction,
                     MLEExpert, RemoteExpert, SimulatedExpert,
                     mle_expert_respond)
from .gp import (NumericalError, PriorSpec, kernel_eval, matern52, posterior,
                 prior_from_wire, prior_to_wire, sample_realization,
                 squared_exponential, wiener)
from .problems import (BruteForceResult, ParseError, ProblemInstance,
                       ProblemKind, brute_force_optimum, clique_instance,
                       evaluate_assignment, max_sat_instance, parse_cnf,
                       parse_graph, value_range, vertex_cover_cost,
                       vertex_cover_instance)
from .reduction import (ReducedFunction, build_reduction, decode_assignment,
                        descriptor, eval_point, from_descriptor, resample)
from .search import (Cell, SearchConfig, SearchDriver, SearchResult,
                     SearchSuspended, expand, run_search, select_cell)

__version__ = "0.1.0"
