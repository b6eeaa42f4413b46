from __future__ import annotations

import threading
import time

import numpy as np

from .biased import best_response, pure_best_response
from .core import COL, ROW, ApproxResult, MixedStrategy, NormPenalty, PenaltyGame, ZeroPenalty, as_probs, player_index, utility_penalty
from .lipschitz import DEFAULT_BUDGET, Equilibrium, LipschitzVerdict, NoExactEquilibrium, check_budget, scan_profiles
from .uniform import count_k_uniform, k_for_penalty, k_uniform_weights, l_for_penalty_br


class PenaltyGrid:
    """l-uniform strategies of one player with their penalties, computed once."""

    def __init__(self, g: PenaltyGame, player: int, l: int):
        self.l = l
        self.points = k_uniform_weights(g.n, l)
        self.penalties = g.penalty(player).values(self.points)

    def best(self, payoffs: np.ndarray) -> tuple[int, float]:
        values = self.points @ payoffs - self.penalties
        j = int(np.argmax(values))
        return j, float(values[j])


def approx_best_response_penalty(g: PenaltyGame, player, opponent, epsilon: float,
                                 grid: PenaltyGrid | None = None) -> tuple[MixedStrategy, float]:
    """Best l-uniform response; its value is within ``epsilon`` of the exact best response."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    player = player_index(player)
    if grid is None:
        spec = g.penalty(player)
        grid = PenaltyGrid(g, player, l_for_penalty_br(spec.lipschitz_lambda, spec.norm_exponent, epsilon))
    j, value = grid.best(g.game.payoff_vector(player, as_probs(opponent)))
    return MixedStrategy(grid.points[j]), value


def exact_best_response_penalty(g: PenaltyGame, player, opponent) -> tuple[MixedStrategy, float] | None:
    """Exact best response for the built-in norm and zero penalties; ``None`` for black boxes."""
    player = player_index(player)
    spec = g.penalty(player)
    payoffs = g.game.payoff_vector(player, as_probs(opponent))
    if isinstance(spec.evaluator, ZeroPenalty):
        br = pure_best_response(payoffs)
    elif isinstance(spec.evaluator, NormPenalty):
        ev = spec.evaluator
        br = best_response(ev.norm, payoffs, ev.base, ev.d)
    else:
        return None
    return br, float(br.probs @ payoffs - spec(br))


def qptas(g: PenaltyGame, epsilon: float, k_override: int | None = None, *, workers: int = 1, fast: bool = False,
          budget: int = DEFAULT_BUDGET) -> LipschitzVerdict:
    """Search k-uniform profile pairs for a certified ``3 * epsilon`` equilibrium.

    A single ``k`` is chosen from the larger of the two players' declared
    penalty constants.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    t0 = time.perf_counter()
    specs = (g.penalty_row, g.penalty_col)
    if k_override is not None:
        k = k_override
    else:
        lam = max(s.lipschitz_lambda for s in specs)
        p = max(s.norm_exponent for s in specs)
        k = k_for_penalty(g.n, lam, p, epsilon)
    if k < 1:
        raise ValueError("k must be >= 1")
    ls = [l_for_penalty_br(s.lipschitz_lambda, s.norm_exponent, epsilon) for s in specs]
    size = count_k_uniform(g.n, k)
    check_budget([size, size], max(count_k_uniform(g.n, l) for l in ls), budget)
    grids = [PenaltyGrid(g, i, ls[i]) for i in (ROW, COL)]
    strategies = k_uniform_weights(g.n, k)
    best: dict[tuple[int, int], float] = {}
    lock = threading.Lock()

    def best_value(player: int, opp_index: int) -> float:
        key = (player, opp_index)
        value = best.get(key)
        if value is None:
            payoffs = g.game.payoff_vector(player, strategies[opp_index])
            value = grids[player].best(payoffs)[1]
            with lock:
                best[key] = value
        return value

    def evaluate(idx):
        x, y = strategies[idx[0]], strategies[idx[1]]
        regrets = (
            max(0.0, best_value(ROW, idx[1]) - utility_penalty(g, x, y, ROW)),
            max(0.0, best_value(COL, idx[0]) - utility_penalty(g, x, y, COL)),
        )
        return epsilon + max(regrets), regrets

    found = scan_profiles([size, size], evaluate, 2 * epsilon, workers, fast)
    if found is None:
        return NoExactEquilibrium(k, size * size)
    (idx, alpha, regrets), gi = found
    profile = (MixedStrategy(strategies[idx[0]]), MixedStrategy(strategies[idx[1]]))
    info = {"k": k, "l": tuple(ls), "index": gi}
    return Equilibrium(ApproxResult(profile, regrets, alpha, "qptas", (time.perf_counter() - t0) * 1000, info), k, gi + 1)
