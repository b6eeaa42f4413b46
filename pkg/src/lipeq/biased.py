"""Combinatorial best responses for distance-biased utilities.

Every routine here maximizes ``x . payoffs - d * dist(x, base)`` over the
simplex, where ``payoffs`` is the vector of pure-strategy payoffs against a
fixed opponent strategy.  Ties are always broken toward lower indices.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import BimatrixGame, MixedStrategy, NormKind, as_probs

FEAS_TOL = 1e-12


@dataclass(frozen=True)
class ScoredStrategy:
    index: int
    alpha: float


@dataclass(frozen=True)
class KktSolution:
    support_size: int
    multiplier: float
    strategy: MixedStrategy
    utility: float


@dataclass(frozen=True)
class LinfPartition:
    top: tuple[int, ...]
    middle: tuple[int, ...]
    low: tuple[int, ...]
    p_max: float
    low_mass: float


def _inputs(payoffs, base) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(payoffs, dtype=float).ravel()
    b = as_probs(base).ravel()
    if a.shape != b.shape:
        raise ValueError(f"payoffs have {a.size} entries but base has {b.size}")
    return a, b


def _strategy(x: np.ndarray) -> MixedStrategy:
    x = np.where(x < 0, 0.0, x)
    return MixedStrategy(x / x.sum())


def pure_best_response(payoffs) -> MixedStrategy:
    a = np.asarray(payoffs, dtype=float).ravel()
    return MixedStrategy.pure(a.size, int(np.argmax(a)))


def best_response_l1(payoffs, base, d: float) -> MixedStrategy:
    """Shift each base mass to the top strategy iff the gain exceeds ``2d``."""
    a, p = _inputs(payoffs, base)
    if d < 0:
        raise ValueError("d must be nonnegative")
    b = int(np.argmax(a))
    keep = a[b] - a - 2 * d <= 0
    keep[b] = True
    x = np.where(keep, p, 0.0)
    # adding the moved mass (not 1 - rest) keeps x bit-identical to p when nothing moves
    x[b] = p[b] + math.fsum(p[~keep])
    return MixedStrategy(x)


def alpha_scores(payoffs, base, d: float) -> list[ScoredStrategy]:
    """Shifted payoffs ``payoffs + 2d * base``, sorted descending (stable)."""
    a, p = _inputs(payoffs, base)
    alpha = a + 2 * d * p
    order = np.argsort(-alpha, kind="stable")
    return [ScoredStrategy(int(i), float(alpha[i])) for i in order]


def quadratic_candidates(payoffs, base, d: float) -> list[KktSolution | None]:
    """Closed-form stationary point for every prefix of the alpha order.

    Entry ``k - 1`` belongs to the prefix of size ``k`` and is ``None`` when
    that candidate is infeasible.
    """
    if not d > 0:
        raise ValueError("the quadratic best response needs d > 0")
    scored = alpha_scores(payoffs, base, d)
    n = len(scored)
    idx = np.array([s.index for s in scored])
    alpha = np.array([s.alpha for s in scored])
    prefix = np.cumsum(alpha)
    out: list[KktSolution | None] = []
    for k in range(1, n + 1):
        lam = (prefix[k - 1] - 2 * d) / k
        xs = (alpha[:k] - lam) / (2 * d)
        if xs.min() < -FEAS_TOL:
            out.append(None)
            continue
        x = np.zeros(n)
        x[idx[:k]] = xs
        strat = _strategy(x)
        q = strat.probs
        util = float(q @ (alpha[np.argsort(idx)]) - d * (q @ q))
        out.append(KktSolution(k, float(lam), strat, util))
    return out


def best_response_quadratic(payoffs, base, d: float) -> MixedStrategy:
    """Exact maximizer of ``x . payoffs - d * |x - base|_2^2`` (pass a zero base for INNER)."""
    best = None
    for cand in quadratic_candidates(payoffs, base, d):
        if cand is not None and (best is None or cand.utility > best.utility + FEAS_TOL):
            best = cand
    return best.strategy


def linf_partition(payoffs, base, d: float) -> LinfPartition:
    a, p = _inputs(payoffs, base)
    order = np.argsort(-a, kind="stable")
    top_payoff = a[order[0]]
    gap = top_payoff - a[order]
    top = tuple(int(i) for i, g in zip(order, gap) if a[i] == top_payoff)
    middle = tuple(int(i) for i, g in zip(order, gap) if a[i] != top_payoff and g - d < 0)
    low = tuple(int(i) for i, g in zip(order, gap) if g - d > 0)
    p_max = float(max((p[i] for i in low), default=0.0))
    return LinfPartition(top, middle, low, p_max, float(sum(p[i] for i in low)))


def best_response_linf_partition(payoffs, base, d: float) -> MixedStrategy:
    """Three-case redistribution of the low-payoff base mass.

    Exact for ``n <= 3`` but not in general; :func:`best_response_linf` is
    the exact routine.
    """
    a, p = _inputs(payoffs, base)
    part = linf_partition(a, p, d)
    if not part.low:
        return MixedStrategy(p)
    x = p.copy()
    x[list(part.low)] = 0.0
    h, mass, pm = part.top, part.low_mass, part.p_max
    hm = h + part.middle
    if mass <= len(h) * pm:
        x[list(h)] += mass / len(h)
    elif mass < len(hm) * pm:
        k = int(np.floor((mass - len(h) * pm) / pm))
        filled = len(h) + k
        x[list(hm[:filled])] += pm
        x[hm[filled]] += mass - filled * pm
    else:
        x[list(hm)] += mass / len(hm)
    return _strategy(x)


def _linf_fill(a: np.ndarray, p: np.ndarray, order: np.ndarray, ts: np.ndarray):
    """Greedy optimum of ``x . a`` within the L-inf ball of each radius in ``ts``."""
    lo = np.maximum(p[None, :] - ts[:, None], 0.0)
    hi = np.minimum(p[None, :] + ts[:, None], 1.0)
    cap = (hi - lo)[:, order]
    room = 1.0 - lo.sum(axis=1)
    before = np.cumsum(cap, axis=1) - cap
    fill = np.clip(room[:, None] - before, 0.0, cap)
    value = lo @ a + fill @ a[order]
    return value, lo, fill


def best_response_linf(payoffs, base, d: float) -> MixedStrategy:
    """Exact maximizer of ``x . payoffs - d * |x - base|_inf``.

    For a radius ``t`` the best point in the ball is a greedy fill, and its
    value is piecewise linear in ``t``.  The breakpoints are where a bound
    ``p_i - t`` or ``p_i + t`` hits 0 or 1, and where the remaining mass
    exactly exhausts a prefix of the greedy order.  All are evaluated and
    the best (smallest on ties) radius wins.
    """
    a, p = _inputs(payoffs, base)
    if d < 0:
        raise ValueError("d must be nonnegative")
    order = np.argsort(-a, kind="stable")
    knots = np.unique(np.clip(np.concatenate([[0.0, 1.0], p, 1.0 - p]), 0.0, 1.0))
    # inside a knot interval capacities and remaining mass are affine in t
    t0, t1 = knots[:-1], knots[1:]

    def excess(ts):
        lo = np.maximum(p[None, :] - ts[:, None], 0.0)
        hi = np.minimum(p[None, :] + ts[:, None], 1.0)
        return np.cumsum((hi - lo)[:, order], axis=1) - (1.0 - lo.sum(axis=1))[:, None]

    e0, e1 = excess(t0), excess(t1)
    denom = e0 - e1
    with np.errstate(divide="ignore", invalid="ignore"):
        frac = np.where(denom != 0, e0 / denom, np.nan)
    cross = (t0[:, None] + frac * (t1 - t0)[:, None])[(frac > 0) & (frac < 1)]
    ts = np.unique(np.concatenate([knots, cross]))
    value, _, _ = _linf_fill(a, p, order, ts)
    score = value - d * ts
    best = np.flatnonzero(score >= score.max() - FEAS_TOL)[0]
    _, lo, fill = _linf_fill(a, p, order, ts[best : best + 1])
    x = lo[0].copy()
    x[order] += fill[0]
    return _strategy(x)


def is_base_dominant(norm, d: float, n: int | None = None) -> bool:
    """Sufficient condition for the base strategy to be a best response to everything.

    For LINF the threshold grows with ``n`` (it is ``max(1, n // 2)``), so
    ``n`` is required once ``d >= 1``.
    """
    norm = NormKind.parse(norm)
    if norm is NormKind.L1:
        return d >= 0.5
    if norm is NormKind.LINF:
        if d < 1:
            return False
        if n is None:
            raise ValueError("the L-inf dominance threshold depends on n")
        return d >= max(1, n // 2)
    return False


def best_response(norm, payoffs, base, d: float) -> MixedStrategy:
    """Dispatch to the exact best response for ``norm``; ``d = 0`` is the pure best response."""
    norm = NormKind.parse(norm)
    a, p = _inputs(payoffs, base)
    if d < 0:
        raise ValueError("d must be nonnegative")
    if d == 0:
        return pure_best_response(a)
    if norm is NormKind.L1:
        return best_response_l1(a, p, d)
    if norm is NormKind.L2SQ:
        return best_response_quadratic(a, p, d)
    if norm is NormKind.INNER:
        return best_response_quadratic(a, np.zeros_like(a), d)
    return best_response_linf(a, p, d)


def wsne_quality(game: BimatrixGame, x, y) -> float:
    """Largest payoff shortfall of any supported pure strategy of either player."""
    x, y = as_probs(x), as_probs(y)
    row = game.R @ y
    col = game.C.T @ x
    gaps = [0.0]
    gaps += list(row.max() - row[x > FEAS_TOL])
    gaps += list(col.max() - col[y > FEAS_TOL])
    return float(max(gaps))
