"""k-uniform strategies and the grid-size selectors built on them.

A k-uniform strategy over ``n`` vertices puts weight ``c_j / k`` on vertex
``j`` for a composition ``c`` of ``k`` into ``n`` nonnegative parts.  The
compositions are always produced in lexicographically decreasing order, and
any contiguous slice of that order can be produced directly, which is what
the parallel scans use to split work.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from .core import ConvexStrategySpace, MixedStrategy

# Relative slack absorbed before taking a ceiling, so 8 / 0.1**2 gives 800.
_CEIL_SLACK = 1e-12


class InfeasibleParameter(ValueError):
    """Raised when a selector would exceed its cap."""


@dataclass(frozen=True)
class CountVector:
    counts: tuple[int, ...]
    k: int

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if any(c < 0 for c in counts):
            raise ValueError("counts must be nonnegative")
        if sum(counts) != self.k:
            raise ValueError(f"counts sum to {sum(counts)}, expected k={self.k}")
        object.__setattr__(self, "counts", counts)

    @property
    def n(self) -> int:
        return len(self.counts)

    def weights(self) -> np.ndarray:
        if self.k == 0:
            raise ValueError("k = 0 has no strategy")
        return np.asarray(self.counts, dtype=float) / self.k

    def to_strategy(self) -> MixedStrategy:
        return MixedStrategy(self.weights())

    def to_point(self, space: ConvexStrategySpace) -> np.ndarray:
        return space.point(self.weights())


def count_k_uniform(n: int, k: int) -> int:
    """Number of compositions of ``k`` into ``n`` nonnegative parts."""
    if n < 1 or k < 0:
        raise ValueError("need n >= 1 and k >= 0")
    return math.comb(n + k - 1, n - 1)


def unrank(n: int, k: int, index: int) -> tuple[int, ...]:
    """The composition at position ``index`` of the decreasing order."""
    total = count_k_uniform(n, k)
    if not 0 <= index < total:
        raise IndexError(f"index {index} outside [0, {total})")
    out = []
    remaining = k
    for parts in range(n, 1, -1):
        for first in range(remaining, -1, -1):
            block = math.comb(remaining - first + parts - 2, parts - 2)
            if index < block:
                out.append(first)
                remaining -= first
                break
            index -= block
    out.append(remaining)
    return tuple(out)


def _successor(c: list[int]) -> bool:
    n = len(c)
    for i in range(n - 2, -1, -1):
        if c[i] > 0:
            c[i] -= 1
            c[i + 1] = sum(c[i + 1 :]) + 1
            for j in range(i + 2, n):
                c[j] = 0
            return True
    return False


def worker_range(total: int, worker: int, workers: int) -> tuple[int, int]:
    """Contiguous slice ``[start, stop)`` of ``total`` items owned by ``worker``."""
    if workers < 1 or not 0 <= worker < workers:
        raise ValueError(f"invalid worker {worker} of {workers}")
    return total * worker // workers, total * (worker + 1) // workers


def enumerate_k_uniform(n: int, k: int, worker: int = 0, workers: int = 1) -> Iterator[CountVector]:
    """Yield compositions of ``k`` into ``n`` parts in decreasing lexicographic order.

    With ``workers > 1`` only the contiguous slice owned by ``worker`` is
    produced; concatenating the slices of workers ``0..workers-1`` gives the
    full stream.
    """
    start, stop = worker_range(count_k_uniform(n, k), worker, workers)
    if start >= stop:
        return
    c = list(unrank(n, k, start))
    for _ in range(stop - start):
        yield CountVector(tuple(c), k)
        _successor(c)


@lru_cache(maxsize=64)
def _k_uniform_counts(n: int, k: int) -> np.ndarray:
    if n == 1:
        out = np.array([[k]], dtype=np.int64)
    else:
        out = np.concatenate(
            [
                np.column_stack([np.full(count_k_uniform(n - 1, k - first), first, dtype=np.int64),
                                 _k_uniform_counts(n - 1, k - first)])
                for first in range(k, -1, -1)
            ]
        )
    out.setflags(write=False)
    return out


def k_uniform_counts(n: int, k: int) -> np.ndarray:
    """All compositions as a read-only ``(count, n)`` integer array, in stream order."""
    count_k_uniform(n, k)
    return _k_uniform_counts(n, k)


def k_uniform_weights(n: int, k: int) -> np.ndarray:
    """All k-uniform weight vectors as rows, in stream order."""
    if k < 1:
        raise ValueError("k must be >= 1 for strategies")
    return k_uniform_counts(n, k) / k


def _positive(**values: float) -> None:
    for name, v in values.items():
        if not (v > 0 and math.isfinite(v)):
            raise ValueError(f"{name} must be positive and finite, got {v!r}")


def _ceil(x: float) -> int:
    return max(1, math.ceil(x * (1 - _CEIL_SLACK)))


def k_for_lipschitz(players: int, lipschitz_lambda: float, p: float, gamma: float, epsilon: float,
                    player_exponent: int = 2) -> int:
    """Uniformity ``k`` for the Lipschitz-game search.

    ``player_exponent`` selects between the ``M**2`` factor (default, the
    larger and therefore safe choice) and a single ``M``.
    """
    _positive(players=players, lipschitz_lambda=lipschitz_lambda, p=p, gamma=gamma, epsilon=epsilon)
    if player_exponent not in (1, 2):
        raise ValueError("player_exponent must be 1 or 2")
    return _ceil(16 * players**player_exponent * lipschitz_lambda**2 * p * gamma**2 / epsilon**2)


def l_for_regret(lipschitz_lambda: float, p: float, gamma: float, delta: float) -> int:
    """Grid size whose best point is within ``delta`` of the true maximum."""
    _positive(lipschitz_lambda=lipschitz_lambda, p=p, gamma=gamma, delta=delta)
    return _ceil(4 * lipschitz_lambda**2 * p * gamma**2 / delta**2)


def l_for_penalty_br(lipschitz_lambda: float, p: float, epsilon: float) -> int:
    """Grid size for an epsilon-best response in a penalty game."""
    _positive(lipschitz_lambda=lipschitz_lambda, p=p, epsilon=epsilon)
    return _ceil(17 * lipschitz_lambda**2 * math.sqrt(p) / epsilon**2)


def penalty_failure_bound(k: int, n: int, lipschitz_lambda: float, p: float, epsilon: float) -> float:
    """Failure probability bound of a k-sample profile; ``< 1`` means one succeeds."""
    return 2 * (
        4 * math.exp(-k * epsilon**2 / 8)
        + 8 * lipschitz_lambda * math.sqrt(p) / (epsilon * math.sqrt(k))
        + n * math.exp(-k * epsilon**2 / 2)
    )


def k_for_penalty(n: int, lipschitz_lambda: float, p: float, epsilon: float, cap: int = 10**9) -> int:
    """Smallest ``k >= 1`` with ``penalty_failure_bound(k) < 1``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    _positive(lipschitz_lambda=lipschitz_lambda, p=p, epsilon=epsilon)

    def ok(k: int) -> bool:
        return penalty_failure_bound(k, n, lipschitz_lambda, p, epsilon) < 1

    hi = 1
    while not ok(hi):
        if hi >= cap:
            raise InfeasibleParameter(f"k would exceed the cap {cap}; epsilon={epsilon!r} is infeasibly small")
        hi = min(2 * hi, cap)
    lo = hi // 2  # ok(lo) is False or lo == 0
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi
