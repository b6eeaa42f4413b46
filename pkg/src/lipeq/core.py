"""Game representations, strategies, penalties and regret evaluation.

Players of two-player games are indexed ``ROW = 0`` and ``COL = 1``.  All
types are immutable once built; numpy arrays stored on them are flagged
read-only.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

ROW = 0
COL = 1

PROB_TOL = 1e-12


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def player_index(player) -> int:
    """Map ``"row"``/``"col"`` (or 0/1) to a player index."""
    if player in (ROW, "row", "r"):
        return ROW
    if player in (COL, "col", "c", "column"):
        return COL
    raise ValueError(f"unknown player {player!r}")


@dataclass(frozen=True)
class MixedStrategy:
    """A point of the probability simplex."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.array(self.probs, dtype=float).ravel()
        if probs.size == 0:
            raise ValueError("empty strategy")
        if not np.all(np.isfinite(probs)):
            raise ValueError("strategy has non-finite entries")
        if probs.min() < 0:
            raise ValueError(f"negative probability {probs.min()!r}")
        if abs(probs.sum() - 1.0) > PROB_TOL:
            raise ValueError(f"probabilities sum to {probs.sum()!r}, not 1")
        object.__setattr__(self, "probs", _frozen(probs))

    @classmethod
    def pure(cls, n: int, i: int) -> MixedStrategy:
        e = np.zeros(n)
        e[i] = 1.0
        return cls(e)

    @classmethod
    def uniform(cls, n: int) -> MixedStrategy:
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def normalized(cls, weights) -> MixedStrategy:
        """Build from nonnegative weights, rescaling them to sum to one."""
        w = np.asarray(weights, dtype=float)
        total = w.sum()
        if total <= 0:
            raise ValueError("cannot normalize weights with zero total")
        return cls(w / total)

    @property
    def n(self) -> int:
        return self.probs.size

    def __len__(self) -> int:
        return self.probs.size

    def __array__(self, dtype=None, copy=None):
        return self.probs if dtype is None else self.probs.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, MixedStrategy):
            return NotImplemented
        return np.array_equal(self.probs, other.probs)

    def __hash__(self):
        return hash(self.probs.tobytes())

    def tolist(self) -> list[float]:
        return self.probs.tolist()


def as_probs(x) -> np.ndarray:
    """Return the probability vector of a strategy or array-like."""
    if isinstance(x, MixedStrategy):
        return x.probs
    return np.asarray(x, dtype=float)


@dataclass(frozen=True)
class ConvexStrategySpace:
    """Convex hull of ``n`` vertices in ``d``-dimensional space."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[0] < 1:
            raise ValueError("vertices must be a non-empty (n, d) array")
        object.__setattr__(self, "vertices", _frozen(v))

    @classmethod
    def simplex(cls, n: int) -> ConvexStrategySpace:
        return cls(np.eye(n))

    @property
    def n(self) -> int:
        return self.vertices.shape[0]

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    def point(self, weights) -> np.ndarray:
        """Map convex weights over the vertices to a point of the space."""
        return as_probs(weights) @ self.vertices


@dataclass(frozen=True)
class BimatrixGame:
    R: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        R = np.array(self.R, dtype=float)
        C = np.array(self.C, dtype=float)
        for name, M in (("R", R), ("C", C)):
            if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
                raise ValueError(f"{name} must be a non-empty square matrix, got shape {M.shape}")
            bad = np.argwhere(~((M >= 0) & (M <= 1)))
            if bad.size:
                i, j = bad[0]
                raise ValueError(f"{name}[{i}][{j}] = {M[i, j]!r} is outside [0, 1]")
        if R.shape != C.shape:
            raise ValueError(f"R has shape {R.shape} but C has shape {C.shape}")
        object.__setattr__(self, "R", _frozen(R))
        object.__setattr__(self, "C", _frozen(C))

    @property
    def n(self) -> int:
        return self.R.shape[0]

    def payoff_vector(self, player: int, opponent) -> np.ndarray:
        """Pure-strategy payoffs of ``player`` against the opponent's strategy."""
        s = as_probs(opponent)
        return self.R @ s if player == ROW else self.C.T @ s

    def bilinear(self, x, y, player: int) -> float:
        M = self.R if player == ROW else self.C
        return float(as_probs(x) @ M @ as_probs(y))


class NormKind(enum.Enum):
    L1 = "l1"
    L2SQ = "l2sq"
    LINF = "linf"
    INNER = "inner"

    @classmethod
    def parse(cls, tag) -> NormKind:
        if isinstance(tag, NormKind):
            return tag
        try:
            return cls(str(tag).lower())
        except ValueError:
            raise ValueError(f"unknown norm {tag!r}; expected one of l1, l2sq, linf, inner") from None


def penalty_value(x, base, norm: NormKind) -> float:
    """Distance penalty of ``x`` from ``base`` (``x.x`` for INNER, base ignored)."""
    x = as_probs(x)
    norm = NormKind.parse(norm)
    if norm is NormKind.INNER:
        return float(x @ x)
    base = as_probs(base)
    if x.shape != base.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {base.shape}")
    diff = x - base
    if norm is NormKind.L1:
        return float(np.abs(diff).sum())
    if norm is NormKind.L2SQ:
        return float(diff @ diff)
    return float(np.abs(diff).max())


@dataclass(frozen=True)
class DistanceBiasedGame:
    game: BimatrixGame
    base_row: MixedStrategy
    base_col: MixedStrategy
    norm_row: NormKind
    norm_col: NormKind
    d_row: float
    d_col: float

    def __post_init__(self):
        for name in ("base_row", "base_col"):
            b = getattr(self, name)
            if not isinstance(b, MixedStrategy):
                b = MixedStrategy(b)
                object.__setattr__(self, name, b)
            if b.n != self.game.n:
                raise ValueError(f"{name} has {b.n} entries, game has n={self.game.n}")
        object.__setattr__(self, "norm_row", NormKind.parse(self.norm_row))
        object.__setattr__(self, "norm_col", NormKind.parse(self.norm_col))
        for name in ("d_row", "d_col"):
            d = float(getattr(self, name))
            if not (d >= 0 and math.isfinite(d)):
                raise ValueError(f"{name} must be a nonnegative finite number, got {d!r}")
            object.__setattr__(self, name, d)

    @property
    def n(self) -> int:
        return self.game.n

    def norm(self, player: int) -> NormKind:
        return self.norm_row if player == ROW else self.norm_col

    def weight(self, player: int) -> float:
        return self.d_row if player == ROW else self.d_col

    def base(self, player: int) -> np.ndarray:
        """Effective base strategy; the zero vector under INNER."""
        if self.norm(player) is NormKind.INNER:
            return np.zeros(self.n)
        return (self.base_row if player == ROW else self.base_col).probs

    def utility(self, x, y, player) -> float:
        return utility_biased(self, x, y, player)


def utility_biased(g: DistanceBiasedGame, x, y, player) -> float:
    player = player_index(player)
    x, y = as_probs(x), as_probs(y)
    if x.shape != (g.n,) or y.shape != (g.n,):
        raise ValueError(f"strategies must have {g.n} entries")
    own = x if player == ROW else y
    return g.game.bilinear(x, y, player) - g.weight(player) * penalty_value(own, g.base(player), g.norm(player))


@dataclass(frozen=True)
class PenaltySpec:
    """A black-box penalty with its declared Lipschitz data."""

    evaluator: Callable[[np.ndarray], float]
    lipschitz_lambda: float
    norm_exponent: float = 2.0
    description: str = ""

    def __post_init__(self):
        lam, p = float(self.lipschitz_lambda), float(self.norm_exponent)
        if not (lam > 0 and math.isfinite(lam)):
            raise ValueError(f"lipschitz_lambda must be positive and finite, got {lam!r}")
        if not (p >= 2 and math.isfinite(p)):
            raise ValueError(f"norm_exponent must be a finite number >= 2, got {p!r}")
        object.__setattr__(self, "lipschitz_lambda", lam)
        object.__setattr__(self, "norm_exponent", p)

    def __call__(self, x) -> float:
        return float(self.evaluator(as_probs(x)))

    def values(self, points: np.ndarray) -> np.ndarray:
        """Penalty of every row of ``points``; uses the evaluator's ``batch`` method when present."""
        batch = getattr(self.evaluator, "batch", None)
        if batch is not None:
            return np.asarray(batch(points), dtype=float)
        return np.fromiter((self.evaluator(row) for row in points), dtype=float, count=len(points))

    @classmethod
    def zero(cls, lipschitz_lambda: float = 1e-6) -> PenaltySpec:
        """The identically zero penalty (Lipschitz for any positive constant)."""
        return cls(ZeroPenalty(), lipschitz_lambda, 2.0, "zero")

    @classmethod
    def from_norm(cls, norm, base, d: float, p: float = 2.0) -> PenaltySpec:
        """Wrap ``d * penalty_value(x, base, norm)`` with a valid Lipschitz constant.

        The constant is taken w.r.t. the L_p norm on the simplex, using
        ``||v||_q <= n^(1/q - 1/p) ||v||_p`` for ``q <= p``.
        """
        norm = NormKind.parse(norm)
        base = np.zeros_like(as_probs(base)) if norm is NormKind.INNER else as_probs(base).copy()
        n = base.size
        if norm is NormKind.L1:
            lam = d * n ** (1 - 1 / p)
        elif norm is NormKind.LINF:
            lam = d
        else:
            # |a.a - b.b| <= |a - b|_2 |a + b|_2, and |a + b|_2 <= 2 sqrt(2) on simplex differences
            scale = 2.0 if norm is NormKind.INNER else 2.0 * math.sqrt(2.0)
            lam = scale * d * n ** (0.5 - 1 / p)
        lam = max(lam, 1e-6)
        return cls(NormPenalty(norm, _frozen(base), float(d)), lam, p, f"{d!r}*{norm.value}")


@dataclass(frozen=True)
class ZeroPenalty:
    def __call__(self, x) -> float:
        return 0.0

    def batch(self, points: np.ndarray) -> np.ndarray:
        return np.zeros(len(points))


@dataclass(frozen=True)
class NormPenalty:
    norm: NormKind
    base: np.ndarray = field(repr=False)
    d: float

    def __call__(self, x) -> float:
        return self.d * penalty_value(x, self.base, self.norm)

    def batch(self, points: np.ndarray) -> np.ndarray:
        if self.norm is NormKind.INNER:
            return self.d * np.einsum("ij,ij->i", points, points)
        diff = points - self.base
        if self.norm is NormKind.L1:
            return self.d * np.abs(diff).sum(axis=1)
        if self.norm is NormKind.L2SQ:
            return self.d * np.einsum("ij,ij->i", diff, diff)
        return self.d * np.abs(diff).max(axis=1)


@dataclass(frozen=True)
class PenaltyGame:
    game: BimatrixGame
    penalty_row: PenaltySpec
    penalty_col: PenaltySpec

    @property
    def n(self) -> int:
        return self.game.n

    def penalty(self, player: int) -> PenaltySpec:
        return self.penalty_row if player == ROW else self.penalty_col

    def utility(self, x, y, player) -> float:
        return utility_penalty(self, x, y, player)

    @classmethod
    def from_biased(cls, g: DistanceBiasedGame, p: float = 2.0) -> PenaltyGame:
        return cls(
            g.game,
            PenaltySpec.from_norm(g.norm_row, g.base(ROW), g.d_row, p),
            PenaltySpec.from_norm(g.norm_col, g.base(COL), g.d_col, p),
        )


def utility_penalty(g: PenaltyGame, x, y, player) -> float:
    player = player_index(player)
    x, y = as_probs(x), as_probs(y)
    if x.shape != (g.n,) or y.shape != (g.n,):
        raise ValueError(f"strategies must have {g.n} entries")
    own = x if player == ROW else y
    return g.game.bilinear(x, y, player) - g.penalty(player)(own)


# A utility maps a profile (one point per player) to a payoff.
Utility = Callable[[Sequence[np.ndarray]], float]
# Vectorized form: (player's candidate points as rows, profile) -> payoffs.
BatchUtility = Callable[[np.ndarray, Sequence[np.ndarray]], np.ndarray]


@dataclass(frozen=True)
class LipschitzGame:
    """An M-player game over vertex spaces with lambda_p-Lipschitz utilities.

    ``utilities[i]`` receives the full profile as points (not vertex
    weights).  The optional ``batch_utilities[i]`` evaluates player ``i``'s
    payoff for many of its own candidate points at once; when absent the
    scalar utility is looped.  Utilities must be deterministic and safe to
    call from several threads.
    """

    spaces: tuple[ConvexStrategySpace, ...]
    utilities: tuple[Utility, ...]
    lipschitz_lambda: float
    norm_exponent: float
    gamma: float
    batch_utilities: tuple[BatchUtility, ...] | None = None

    def __post_init__(self):
        spaces = tuple(s if isinstance(s, ConvexStrategySpace) else ConvexStrategySpace(s) for s in self.spaces)
        object.__setattr__(self, "spaces", spaces)
        object.__setattr__(self, "utilities", tuple(self.utilities))
        if len(spaces) < 1:
            raise ValueError("a game needs at least one player")
        if len(self.utilities) != len(spaces):
            raise ValueError(f"{len(spaces)} spaces but {len(self.utilities)} utilities")
        if self.batch_utilities is not None:
            object.__setattr__(self, "batch_utilities", tuple(self.batch_utilities))
            if len(self.batch_utilities) != len(spaces):
                raise ValueError("batch_utilities must have one entry per player")
        lam, p, gamma = float(self.lipschitz_lambda), float(self.norm_exponent), float(self.gamma)
        if not (lam > 0 and math.isfinite(lam)):
            raise ValueError(f"lipschitz_lambda must be positive, got {lam!r}")
        if not (p >= 2 and math.isfinite(p)):
            raise ValueError(f"norm_exponent must be >= 2, got {p!r}")
        if not (gamma > 0 and math.isfinite(gamma)):
            raise ValueError(f"gamma must be positive, got {gamma!r}")
        for i, s in enumerate(spaces):
            vnorm = float(np.max(np.sum(np.abs(s.vertices) ** p, axis=1) ** (1 / p)))
            if vnorm > gamma * (1 + 1e-12):
                raise ValueError(f"player {i} has a vertex of {p:g}-norm {vnorm!r} > gamma = {gamma!r}")
        object.__setattr__(self, "lipschitz_lambda", lam)
        object.__setattr__(self, "norm_exponent", p)
        object.__setattr__(self, "gamma", gamma)

    @property
    def players(self) -> int:
        return len(self.spaces)

    def points(self, profile) -> list[np.ndarray]:
        """Map a profile of vertex weights to a profile of points."""
        return [s.point(w) for s, w in zip(self.spaces, profile)]

    def utility(self, profile, player: int) -> float:
        return float(self.utilities[player](self.points(profile)))

    def deviation_values(self, player: int, candidates: np.ndarray, points: Sequence[np.ndarray]) -> np.ndarray:
        """Payoffs of ``player`` for each row of ``candidates`` (points), others fixed."""
        if self.batch_utilities is not None:
            return np.asarray(self.batch_utilities[player](candidates, points), dtype=float)
        f = self.utilities[player]
        pts = list(points)
        out = np.empty(len(candidates))
        for j, c in enumerate(candidates):
            pts[player] = c
            out[j] = f(pts)
        return out


@dataclass(frozen=True)
class ApproxResult:
    """A strategy profile with its regrets and certified guarantee."""

    profile: tuple[MixedStrategy, ...]
    regrets: tuple[float, ...]
    guarantee: float
    method: str
    runtime_ms: float = 0.0
    info: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(
            self, "profile", tuple(s if isinstance(s, MixedStrategy) else MixedStrategy(s) for s in self.profile)
        )
        object.__setattr__(self, "regrets", tuple(float(r) for r in self.regrets))
        if any(r < 0 for r in self.regrets):
            raise ValueError("regrets must be nonnegative")

    @property
    def max_regret(self) -> float:
        return max(self.regrets) if self.regrets else 0.0


def regret(utility: Callable, profile, player: int, best_response_value: float) -> float:
    """Clamped regret ``max(0, best - utility(profile, player))``."""
    return max(0.0, float(best_response_value) - float(utility(profile, player)))
