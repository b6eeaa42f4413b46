"""Approximate equilibria for Lipschitz, penalty and distance-biased games."""
from .approx import base_algorithm, choose_delta, exact_equilibrium_if_dominant, measure_regrets
from .biased import (best_response, best_response_l1, best_response_linf, best_response_linf_partition,
                     best_response_quadratic, is_base_dominant, wsne_quality)
from .core import (COL, ROW, ApproxResult, BimatrixGame, ConvexStrategySpace, DistanceBiasedGame, LipschitzGame,
                   MixedStrategy, NormKind, PenaltyGame, PenaltySpec, penalty_value, regret, utility_biased,
                   utility_penalty)
from .lipschitz import (BudgetExceeded, Equilibrium, NoExactEquilibrium, bimatrix_as_lipschitz, evaluate_guarantee,
                        find_equilibrium)
from .oracle import exhaustive_quadratic_br, grid_best_response, verify_epsilon_equilibrium
from .penalty import approx_best_response_penalty, qptas
from .uniform import (CountVector, enumerate_k_uniform, k_for_lipschitz, k_for_penalty, l_for_penalty_br,
                      l_for_regret)

__version__ = "0.1.0"
