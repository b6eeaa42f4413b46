"""Brute-force reference solvers used to certify the fast routines."""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import BimatrixGame, ConvexStrategySpace, LipschitzGame, MixedStrategy, NormKind, as_probs
from .uniform import CountVector, count_k_uniform, k_uniform_counts, unrank, worker_range

VERIFY_TOL = 1e-9
EXHAUSTIVE_MAX_N = 20


def _scan_slice(value_fn, space, l, start, stop, batch):
    counts = k_uniform_counts(space.n, l)[start:stop]
    points = (counts / l) @ space.vertices
    if batch:
        values = np.asarray(value_fn(points), dtype=float)
    else:
        values = np.fromiter((value_fn(pt) for pt in points), dtype=float, count=len(points))
    if values.size == 0:
        return None
    j = int(np.argmax(values))
    return start + j, float(values[j])


def grid_best_response(value_fn: Callable, space: ConvexStrategySpace, l: int, workers: int = 1,
                       batch: bool = False) -> tuple[CountVector, float]:
    """Maximize ``value_fn`` over the l-uniform points of ``space``.

    ``value_fn`` receives a point of the space (a row array of points when
    ``batch`` is set).  Ties go to the earliest point in enumeration order,
    independent of ``workers``.
    """
    if l < 1:
        raise ValueError("l must be >= 1")
    total = count_k_uniform(space.n, l)
    ranges = [worker_range(total, w, workers) for w in range(workers)]
    if workers == 1:
        parts = [_scan_slice(value_fn, space, l, *ranges[0], batch)]
    else:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda r: _scan_slice(value_fn, space, l, *r, batch), ranges))
    best_index, best_value = None, -math.inf
    for part in parts:
        if part is not None and part[1] > best_value:
            best_index, best_value = part
    return CountVector(unrank(space.n, l, best_index), l), best_value


def _separable_terms(norm: NormKind, a: np.ndarray, p: np.ndarray, d: float, l: int) -> np.ndarray:
    c = np.arange(l + 1) / l
    x, base = c[None, :], p[:, None]
    if norm is NormKind.L1:
        pen = np.abs(x - base)
    elif norm is NormKind.L2SQ:
        pen = (x - base) ** 2
    else:
        pen = np.broadcast_to(x**2, (a.size, l + 1))
    return a[:, None] * x - d * pen


def grid_max_biased(norm, payoffs, base, d: float, l: int) -> float:
    """Exact maximum of the biased utility over all l-uniform strategies.

    Equal to the brute-force grid scan but polynomial in ``l``: a knapsack
    recursion over coordinates for the separable penalties, and a scan over
    every attainable L-inf radius with an integer greedy fill otherwise.
    """
    norm = NormKind.parse(norm)
    a = np.asarray(payoffs, dtype=float)
    p = np.zeros_like(a) if norm is NormKind.INNER else as_probs(base)
    if norm is NormKind.LINF:
        return _grid_max_linf(a, p, d, l)
    terms = _separable_terms(norm, a, p, d, l)
    # best[m]: optimum of the coordinates processed so far using total count m
    best = terms[-1].copy()
    idx = np.arange(l + 1)
    for h in terms[-2::-1]:
        used = idx[:, None] - idx[None, :]  # [m, c] -> m - c
        cand = np.where(used >= 0, h[None, :] + best[np.clip(used, 0, l)], -np.inf)
        best = cand.max(axis=1)
    return float(best[l])


def _grid_max_linf(a: np.ndarray, p: np.ndarray, d: float, l: int) -> float:
    grid = np.arange(l + 1) / l
    radii = np.unique(np.abs(grid[None, :] - p[:, None]))
    lo = np.clip(np.ceil((p[None, :] - radii[:, None]) * l - 1e-9), 0, l)
    hi = np.clip(np.floor((p[None, :] + radii[:, None]) * l + 1e-9), 0, l)
    ok = (lo.sum(axis=1) <= l) & (hi.sum(axis=1) >= l) & np.all(lo <= hi, axis=1)
    lo, hi, radii = lo[ok], hi[ok], radii[ok]
    order = np.argsort(-a, kind="stable")
    cap = (hi - lo)[:, order]
    room = l - lo.sum(axis=1)
    fill = np.clip(room[:, None] - (np.cumsum(cap, axis=1) - cap), 0, cap)
    values = (lo @ a + fill @ a[order]) / l - d * radii
    return float(values.max())


def exhaustive_quadratic_br(payoffs, base, d: float) -> MixedStrategy:
    """Best response to a squared-distance penalty by trying every support."""
    a = np.asarray(payoffs, dtype=float)
    p = as_probs(base)
    n = a.size
    if n > EXHAUSTIVE_MAX_N:
        raise ValueError(f"support enumeration is limited to n <= {EXHAUSTIVE_MAX_N}, got {n}")
    if not d > 0:
        raise ValueError("d must be positive")
    alpha = a + 2 * d * p
    best, best_util = None, -math.inf
    for size in range(1, n + 1):
        for support in itertools.combinations(range(n), size):
            s = list(support)
            lam = (alpha[s].sum() - 2 * d) / size
            xs = (alpha[s] - lam) / (2 * d)
            if xs.min() < -1e-12:
                continue
            x = np.zeros(n)
            x[s] = np.maximum(xs, 0.0)
            x /= x.sum()
            util = float(x @ a - d * ((x - p) @ (x - p)))
            if math.isfinite(util) and util > best_util:
                best, best_util = x, util
    return MixedStrategy(best)


@dataclass(frozen=True)
class EquilibriumCheck:
    holds: bool
    player: int | None
    gap: float
    regrets: tuple[float, ...]


def _profile_utility(game, profile, player: int) -> float:
    if isinstance(game, LipschitzGame):
        return game.utility(profile, player)
    if isinstance(game, BimatrixGame):
        return game.bilinear(profile[0], profile[1], player)
    return float(game.utility(profile[0], profile[1], player))


def verify_epsilon_equilibrium(game, profile, epsilon: float, br_values) -> EquilibriumCheck:
    """Check every player's regret against the supplied best-response values.

    On failure the reported player is the one with the largest regret (the
    lowest index on ties) and ``gap`` is that regret.
    """
    regrets = tuple(max(0.0, float(v) - _profile_utility(game, profile, i)) for i, v in enumerate(br_values))
    worst = max(range(len(regrets)), key=lambda i: (regrets[i], -i))
    if regrets[worst] <= epsilon + VERIFY_TOL:
        return EquilibriumCheck(True, None, regrets[worst], regrets)
    return EquilibriumCheck(False, worst, regrets[worst], regrets)
