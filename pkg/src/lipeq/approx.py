from __future__ import annotations

import time

from .biased import best_response, is_base_dominant
from .core import COL, ROW, ApproxResult, DistanceBiasedGame, MixedStrategy, NormKind, as_probs, utility_biased

DOMINANCE_TOL = 1e-9


def best_response_for(g: DistanceBiasedGame, player: int, opponent) -> MixedStrategy:
    """Exact best response of ``player`` against the opponent's strategy."""
    payoffs = g.game.payoff_vector(player, opponent)
    return best_response(g.norm(player), payoffs, g.base(player), g.weight(player))


def measure_regrets(g: DistanceBiasedGame, x, y) -> tuple[float, float]:
    x, y = as_probs(x), as_probs(y)
    row_br = best_response_for(g, ROW, y)
    col_br = best_response_for(g, COL, x)
    row = utility_biased(g, row_br, y, ROW) - utility_biased(g, x, y, ROW)
    col = utility_biased(g, x, col_br, COL) - utility_biased(g, x, y, COL)
    return max(0.0, row), max(0.0, col)


def choose_delta(g: DistanceBiasedGame) -> float:
    """Mixing weight on the starting strategy, picked by the column penalty."""
    norm = g.norm_col
    if norm is NormKind.L2SQ:
        return 5 / 7 if g.base_col.probs.max() <= 0.5 else 2 / 3
    if norm is NormKind.INNER:
        return 13 / 21 if g.d_col > 0.5 else 3 / 5
    return 2 / 3


def analytic_bound(g: DistanceBiasedGame, delta: float) -> float:
    """Worst-case regret bound of the mixed profile for this instance's branch."""
    d = g.d_col
    norm = g.norm_col
    if norm is NormKind.L1:
        factor = 1 + 2 * d
    elif norm is NormKind.LINF:
        factor = 1 + d
    elif norm is NormKind.L2SQ:
        factor = 1 + 1.5 * d if g.base_col.probs.max() <= 0.5 else 1 + d
    else:
        factor = 1 + (5 / 8 if 0.5 < d <= 1 else d)
    return max(delta, (1 - delta) * factor)


def exact_equilibrium_if_dominant(g: DistanceBiasedGame):
    """Return ``((x, y), (row_regret, col_regret))`` when a base strategy is dominant, else ``None``."""
    row_dom = is_base_dominant(g.norm_row, g.d_row, g.n)
    col_dom = is_base_dominant(g.norm_col, g.d_col, g.n)
    if not (row_dom or col_dom):
        return None
    if row_dom and col_dom:
        x, y = g.base_row, g.base_col
    elif row_dom:
        x = g.base_row
        y = best_response_for(g, COL, x)
    else:
        y = g.base_col
        x = best_response_for(g, ROW, y)
    regrets = measure_regrets(g, x, y)
    if max(regrets) > DOMINANCE_TOL:
        raise ArithmeticError(f"dominance certificate failed with regrets {regrets}")
    return (x, y), regrets


def base_algorithm(g: DistanceBiasedGame) -> ApproxResult:
    """Mix the start strategy with a best response to the column's best response.

    A dominant base strategy short-circuits to an exact equilibrium.  The
    reported guarantee is the largest measured regret; the branch's worst
    case bound is kept in ``info``.
    """
    t0 = time.perf_counter()
    found = exact_equilibrium_if_dominant(g)
    if found is not None:
        (x, y), regrets = found
        info = {"path": "dominance", "delta": 0.0, "analytic_bound": 0.0}
        return ApproxResult((x, y), regrets, max(regrets), "dominance", _ms(t0), info)
    start = MixedStrategy.uniform(g.n).probs if g.norm_row is NormKind.INNER else g.base_row.probs
    y = best_response_for(g, COL, start)
    x_br = best_response_for(g, ROW, y)
    delta = choose_delta(g)
    mixed = delta * start + (1 - delta) * x_br.probs
    x = MixedStrategy(mixed / mixed.sum())
    regrets = measure_regrets(g, x, y)
    info = {"path": "base", "delta": delta, "analytic_bound": analytic_bound(g, delta)}
    return ApproxResult((x, y), regrets, max(regrets), "base", _ms(t0), info)


def _ms(t0: float) -> float:
    return (time.perf_counter() - t0) * 1000.0
