"""Guarantee evaluation and the exhaustive k-uniform equilibrium search.

The search walks every profile of k-uniform strategies in a fixed global
order (player 0 most significant, each player's strategies in the order of
:func:`lipeq.uniform.enumerate_k_uniform`) and accepts the first profile whose
evaluated guarantee is below ``2 * epsilon``.  With several workers the scan
is block-cyclic and the answer is still the minimum accepting index.
"""
from __future__ import annotations

import math
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .biased import best_response
from .core import COL, ROW, ApproxResult, BimatrixGame, LipschitzGame, MixedStrategy, as_probs
from .uniform import count_k_uniform, k_for_lipschitz, k_uniform_weights, l_for_regret

DEFAULT_BUDGET = 10**11
SCAN_BLOCK = 64


class BudgetExceeded(RuntimeError):
    def __init__(self, estimate: int, budget: int):
        super().__init__(f"projected work {estimate:.3e} exceeds budget {budget:.3e}")
        self.estimate = estimate
        self.budget = budget


@dataclass(frozen=True)
class Equilibrium:
    result: ApproxResult
    k_used: int
    profiles_checked: int


@dataclass(frozen=True)
class NoExactEquilibrium:
    k_used: int
    profiles_checked: int


LipschitzVerdict = Equilibrium | NoExactEquilibrium


def check_budget(strategy_counts: Sequence[int], grid_size: int, budget: int) -> int:
    estimate = math.prod(strategy_counts) * grid_size
    if estimate > budget:
        raise BudgetExceeded(estimate, budget)
    return estimate


def _unravel(index: int, sizes: Sequence[int]) -> tuple[int, ...]:
    out = []
    for size in reversed(sizes):
        index, r = divmod(index, size)
        out.append(r)
    return tuple(reversed(out))


def scan_profiles(sizes: Sequence[int], evaluate: Callable[[tuple[int, ...]], tuple[float, tuple[float, ...]]],
                  threshold: float, workers: int = 1, fast: bool = False):
    """Find the first profile index tuple with ``evaluate(...)[0] < threshold``.

    Returns ``((indices, alpha, regrets), global_index)`` or ``None``.  ``fast`` returns
    whichever accepting profile a worker meets first.
    """
    total = math.prod(sizes)
    n_blocks = -(-total // SCAN_BLOCK)
    lock = threading.Lock()
    state = {"best": total, "hit": None}

    def run(worker: int) -> None:
        for block in range(worker, n_blocks, workers):
            start = block * SCAN_BLOCK
            if start >= state["best"] or (fast and state["hit"] is not None):
                return
            for gi in range(start, min(start + SCAN_BLOCK, total)):
                if gi >= state["best"]:
                    return
                idx = _unravel(gi, sizes)
                alpha, regrets = evaluate(idx)
                if alpha < threshold:
                    with lock:
                        if gi < state["best"]:
                            state["best"] = gi
                            state["hit"] = (idx, alpha, regrets)
                    return

    if workers <= 1:
        run(0)
    else:
        with ThreadPoolExecutor(workers) as pool:
            list(pool.map(run, range(workers)))
    if state["hit"] is None:
        return None
    return state["hit"], state["best"]


class GuaranteeEvaluator:
    """Evaluates ``delta + max_i regret_i`` with grid best responses.

    Best-response values depend only on the other players' strategies and
    are cached under that key, so a scan reuses them across profiles.
    """

    def __init__(self, g: LipschitzGame, delta: float, l: int | None = None):
        if not delta > 0:
            raise ValueError("delta must be positive")
        self.game = g
        self.delta = float(delta)
        self.l = l if l is not None else l_for_regret(g.lipschitz_lambda, g.norm_exponent, g.gamma, delta)
        self._grids: dict[int, np.ndarray] = {}
        self._best: dict[tuple, float] = {}
        self._lock = threading.Lock()

    def grid_size(self) -> int:
        return max(count_k_uniform(s.n, self.l) for s in self.game.spaces)

    def _grid(self, player: int) -> np.ndarray:
        with self._lock:
            grid = self._grids.get(player)
            if grid is None:
                space = self.game.spaces[player]
                grid = k_uniform_weights(space.n, self.l) @ space.vertices
                self._grids[player] = grid
        return grid

    def best_value(self, player: int, points: Sequence[np.ndarray], key=None) -> float:
        if key is not None:
            cached = self._best.get((player, key))
            if cached is not None:
                return cached
        value = float(self.game.deviation_values(player, self._grid(player), points).max())
        if key is not None:
            self._best[(player, key)] = value
        return value

    def evaluate(self, points: Sequence[np.ndarray], keys=None) -> tuple[float, tuple[float, ...]]:
        regrets = []
        for i in range(self.game.players):
            key = None if keys is None else keys[:i] + keys[i + 1 :]
            own = float(self.game.utilities[i](points))
            regrets.append(max(0.0, self.best_value(i, points, key) - own))
        return self.delta + max(regrets), tuple(regrets)


def evaluate_guarantee(g: LipschitzGame, profile, delta: float, l: int | None = None) -> float:
    """Upper estimate of the profile's epsilon, within ``delta`` of the true value."""
    return GuaranteeEvaluator(g, delta, l).evaluate(g.points(profile))[0]


def find_equilibrium(g: LipschitzGame, epsilon: float, k_override: int | None = None, *, workers: int = 1,
                     fast: bool = False, budget: int = DEFAULT_BUDGET, player_exponent: int = 2,
                     l_override: int | None = None) -> LipschitzVerdict:
    """Return a certified ``3 * epsilon`` equilibrium or prove none is exact."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    t0 = time.perf_counter()
    k = k_override if k_override is not None else k_for_lipschitz(
        g.players, g.lipschitz_lambda, g.norm_exponent, g.gamma, epsilon, player_exponent)
    if k < 1:
        raise ValueError("k must be >= 1")
    evaluator = GuaranteeEvaluator(g, epsilon, l_override)
    sizes = [count_k_uniform(s.n, k) for s in g.spaces]
    check_budget(sizes, evaluator.grid_size(), budget)
    weights = [k_uniform_weights(s.n, k) for s in g.spaces]
    points = [w @ s.vertices for w, s in zip(weights, g.spaces)]

    def evaluate(idx):
        return evaluator.evaluate([points[i][j] for i, j in enumerate(idx)], idx)

    found = scan_profiles(sizes, evaluate, 2 * epsilon, workers, fast)
    if found is None:
        return NoExactEquilibrium(k, math.prod(sizes))
    (idx, alpha, regrets), gi = found
    profile = tuple(MixedStrategy(weights[i][j]) for i, j in enumerate(idx))
    info = {"k": k, "l": evaluator.l, "index": gi}
    result = ApproxResult(profile, regrets, alpha, "lipschitz", (time.perf_counter() - t0) * 1000, info)
    return Equilibrium(result, k, gi + 1)


def bimatrix_as_lipschitz(game: BimatrixGame, d_row: float = 0.0, d_col: float = 0.0) -> LipschitzGame:
    """View a bimatrix game (optionally minus ``d * x.x`` penalties) as a Lipschitz game.

    Vertices are unit vectors, so points are mixed strategies; the
    declared constant is valid for the joint L2 norm.
    """
    n = game.n
    R, C = game.R, game.C

    def row(pts):
        x, y = pts
        return float(x @ R @ y - d_row * (x @ x))

    def col(pts):
        x, y = pts
        return float(x @ C @ y - d_col * (y @ y))

    def row_batch(cands, pts):
        return cands @ (R @ pts[COL]) - d_row * np.einsum("ij,ij->i", cands, cands)

    def col_batch(cands, pts):
        return cands @ (C.T @ pts[ROW]) - d_col * np.einsum("ij,ij->i", cands, cands)

    lam = math.sqrt(2 * n) + 2 * max(d_row, d_col)
    spaces = (np.eye(n), np.eye(n))
    return LipschitzGame(spaces, (row, col), lam, 2.0, 1.0, (row_batch, col_batch))


def exact_bimatrix_regrets(game: BimatrixGame, x, y, d_row: float = 0.0, d_col: float = 0.0) -> tuple[float, float]:
    """Exact regrets in a bimatrix game with optional ``d * x.x`` penalties."""
    x, y = as_probs(x), as_probs(y)
    out = []
    for player, own, d in ((ROW, x, d_row), (COL, y, d_col)):
        payoffs = game.payoff_vector(player, y if player == ROW else x)
        br = best_response("inner", payoffs, np.zeros(game.n), d).probs
        out.append(max(0.0, float(br @ payoffs - d * br @ br - (own @ payoffs - d * own @ own))))
    return tuple(out)
