"""Game documents, random ensembles, the benchmark harness and the ``lipeq`` command.

Documents are JSON.  Floats are written with 17 significant digits so every
value survives a write/read cycle unchanged.  Exit codes: 0 success, 1 error,
2 no exact equilibrium exists, 3 a verified profile fails its epsilon.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .approx import base_algorithm, best_response_for, measure_regrets
from .core import (COL, ROW, ApproxResult, BimatrixGame, DistanceBiasedGame, LipschitzGame, MixedStrategy, NormKind,
                   PenaltyGame, PenaltySpec, player_index, utility_biased)
from .lipschitz import (BudgetExceeded, Equilibrium, GuaranteeEvaluator, NoExactEquilibrium, bimatrix_as_lipschitz,
                        exact_bimatrix_regrets, find_equilibrium)
from .oracle import exhaustive_quadratic_br, grid_max_biased, verify_epsilon_equilibrium
from .penalty import approx_best_response_penalty, exact_best_response_penalty, qptas
from .rng import SplitMix64

CSV_HEADER = ("seed", "n", "norm_row", "norm_col", "d_row", "d_col", "delta", "row_regret", "col_regret",
              "guarantee", "analytic_bound", "runtime_ms")
EXIT_OK, EXIT_ERROR, EXIT_NO_EQUILIBRIUM, EXIT_VERIFY_FAILED = 0, 1, 2, 3
BUILTIN_UTILITIES = ("bilinear", "bilinear_minus_inner")


class GameFileError(ValueError):
    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: {reason}" if path else reason)
        self.path = path
        self.reason = reason


# -- writing ---------------------------------------------------------------

def _format_float(v: float) -> str:
    if not math.isfinite(v):
        raise ValueError(f"cannot serialize non-finite number {v!r}")
    return format(v, ".17g")


def _dump(obj: Any, indent: int = 0) -> str:
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, MixedStrategy):
        obj = obj.probs
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_dump(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if all(not isinstance(v, (list, tuple, dict, np.ndarray)) for v in obj):
            return "[" + ", ".join(_dump(v) for v in obj) + "]"
        return "[\n" + ",\n".join(inner + _dump(v, indent + 1) for v in obj) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return _dump(obj) + "\n"


def serialize_result(result, include_timing: bool = False) -> str:
    """Document for an :class:`ApproxResult` or a search verdict."""
    if isinstance(result, NoExactEquilibrium):
        doc = {"status": "no_exact_equilibrium", "k_used": result.k_used, "profiles_checked": result.profiles_checked}
        return dumps(doc)
    doc: dict[str, Any] = {"status": "equilibrium"}
    if isinstance(result, Equilibrium):
        doc["k_used"] = result.k_used
        doc["profiles_checked"] = result.profiles_checked
        result = result.result
    doc.update(method=result.method, profile=[s.probs for s in result.profile], regrets=list(result.regrets),
               guarantee=result.guarantee)
    doc["info"] = {k: (list(v) if isinstance(v, tuple) else v) for k, v in result.info.items()}
    if include_timing:
        doc["runtime_ms"] = result.runtime_ms
    return dumps(doc)


def parse_result(document):
    doc = json.loads(document) if isinstance(document, str) else document
    if doc.get("status") == "no_exact_equilibrium":
        return NoExactEquilibrium(int(doc["k_used"]), int(doc["profiles_checked"]))
    result = ApproxResult(tuple(MixedStrategy(p) for p in doc["profile"]), tuple(doc["regrets"]),
                          float(doc["guarantee"]), doc["method"], float(doc.get("runtime_ms", 0.0)),
                          dict(doc.get("info", {})))
    if "k_used" in doc:
        return Equilibrium(result, int(doc["k_used"]), int(doc["profiles_checked"]))
    return result


def game_to_document(g: DistanceBiasedGame) -> dict:
    return {
        "type": "biased",
        "R": g.game.R, "C": g.game.C,
        "base_row": g.base_row.probs, "base_col": g.base_col.probs,
        "norm_row": g.norm_row.value, "norm_col": g.norm_col.value,
        "d_row": g.d_row, "d_col": g.d_col,
    }


# -- reading ---------------------------------------------------------------

def _field(doc: dict, key: str, path: str = ""):
    if not isinstance(doc, dict):
        raise GameFileError(path, "expected an object")
    if key not in doc:
        raise GameFileError(f"{path}.{key}" if path else key, "missing field")
    return doc[key]


def _number(v, path: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise GameFileError(path, f"expected a number, got {v!r}")
    if not math.isfinite(v):
        raise GameFileError(path, "number is not finite")
    return float(v)


def _vector(v, path: str) -> np.ndarray:
    if not isinstance(v, list) or not v:
        raise GameFileError(path, "expected a non-empty array of numbers")
    return np.array([_number(x, f"{path}[{i}]") for i, x in enumerate(v)])


def _matrix(v, path: str, unit: bool = True) -> np.ndarray:
    if not isinstance(v, list) or not v:
        raise GameFileError(path, "expected a non-empty array of rows")
    rows = [_vector(r, f"{path}[{i}]") for i, r in enumerate(v)]
    for i, r in enumerate(rows):
        if r.size != rows[0].size:
            raise GameFileError(f"{path}[{i}]", f"row has {r.size} entries, expected {rows[0].size}")
        if unit:
            for j, x in enumerate(r):
                if not 0 <= x <= 1:
                    raise GameFileError(f"{path}[{i}][{j}]", f"payoff {x!r} is outside [0, 1]")
    return np.array(rows)


def _strategy(v, path: str) -> MixedStrategy:
    try:
        return MixedStrategy(_vector(v, path))
    except GameFileError:
        raise
    except ValueError as e:
        raise GameFileError(path, str(e)) from None


def _norm(v, path: str) -> NormKind:
    try:
        return NormKind.parse(v)
    except ValueError as e:
        raise GameFileError(path, str(e)) from None


def _bimatrix(doc: dict) -> BimatrixGame:
    R = _matrix(_field(doc, "R"), "R")
    C = _matrix(_field(doc, "C"), "C")
    try:
        return BimatrixGame(R, C)
    except ValueError as e:
        raise GameFileError("R", str(e)) from None


def _penalty_spec(doc, path: str, n: int) -> PenaltySpec:
    kind = _field(doc, "norm", path)
    p = _number(doc.get("p", 2.0), f"{path}.p")
    if kind == "zero":
        return PenaltySpec.zero(_number(doc.get("lambda", 1e-6), f"{path}.lambda"))
    norm = _norm(kind, f"{path}.norm")
    d = _number(_field(doc, "d", path), f"{path}.d")
    base = np.zeros(n) if norm is NormKind.INNER else _strategy(_field(doc, "base", path), f"{path}.base").probs
    if base.size != n:
        raise GameFileError(f"{path}.base", f"expected {n} entries")
    try:
        spec = PenaltySpec.from_norm(norm, base, d, p)
        if "lambda" in doc:
            spec = PenaltySpec(spec.evaluator, _number(doc["lambda"], f"{path}.lambda"), p, spec.description)
        return spec
    except ValueError as e:
        raise GameFileError(path, str(e)) from None


def parse_game(document):
    """Build a game from a JSON document (text or already-decoded object)."""
    try:
        doc = json.loads(document) if isinstance(document, (str, bytes)) else document
    except json.JSONDecodeError as e:
        raise GameFileError("", f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from None
    kind = _field(doc, "type")
    game = _bimatrix(doc)
    n = game.n
    if kind == "biased":
        base_row = _strategy(_field(doc, "base_row"), "base_row")
        base_col = _strategy(_field(doc, "base_col"), "base_col")
        for name, b in (("base_row", base_row), ("base_col", base_col)):
            if b.n != n:
                raise GameFileError(name, f"expected {n} entries, got {b.n}")
        d_row = _number(_field(doc, "d_row"), "d_row")
        d_col = _number(_field(doc, "d_col"), "d_col")
        for name, d in (("d_row", d_row), ("d_col", d_col)):
            if d < 0:
                raise GameFileError(name, "weight must be nonnegative")
        return DistanceBiasedGame(game, base_row, base_col, _norm(_field(doc, "norm_row"), "norm_row"),
                                  _norm(_field(doc, "norm_col"), "norm_col"), d_row, d_col)
    if kind == "penalty":
        return PenaltyGame(game, _penalty_spec(_field(doc, "penalty_row"), "penalty_row", n),
                           _penalty_spec(_field(doc, "penalty_col"), "penalty_col", n))
    if kind == "lipschitz":
        return _lipschitz_game(doc, game)
    raise GameFileError("type", f"unknown game type {kind!r}; expected biased, penalty or lipschitz")


def _lipschitz_game(doc: dict, game: BimatrixGame) -> LipschitzGame:
    utility = _field(doc, "utility")
    if utility not in BUILTIN_UTILITIES:
        raise GameFileError("utility", f"unknown builtin {utility!r}; expected one of {', '.join(BUILTIN_UTILITIES)}")
    d_row = _number(doc.get("d_row", 0.0), "d_row") if utility == "bilinear_minus_inner" else 0.0
    d_col = _number(doc.get("d_col", 0.0), "d_col") if utility == "bilinear_minus_inner" else 0.0
    template = bimatrix_as_lipschitz(game, d_row, d_col)
    if "vertices" in doc:
        vertices = _field(doc, "vertices")
        if not isinstance(vertices, list) or len(vertices) != 2:
            raise GameFileError("vertices", "expected one vertex list per player")
        spaces = []
        for i, v in enumerate(vertices):
            m = _matrix(v, f"vertices[{i}]", unit=False)
            if m.shape[1] != game.n:
                raise GameFileError(f"vertices[{i}]", f"vertices must have dimension {game.n}")
            spaces.append(m)
    else:
        spaces = [s.vertices for s in template.spaces]
    lam = _number(doc.get("lambda", template.lipschitz_lambda), "lambda")
    p = _number(doc.get("p", template.norm_exponent), "p")
    gamma = _number(doc.get("gamma", template.gamma), "gamma")
    try:
        return LipschitzGame(spaces, template.utilities, lam, p, gamma, template.batch_utilities)
    except ValueError as e:
        raise GameFileError("gamma" if "gamma" in str(e) else "lambda", str(e)) from None


def _is_simplex_game(g: LipschitzGame) -> bool:
    return all(s.vertices.shape[0] == s.vertices.shape[1] and np.array_equal(s.vertices, np.eye(s.n))
               for s in g.spaces)


# -- random ensembles -----------------------------------------------------

def generate_random_game(n: int, norm_row, norm_col, d_row: float, d_col: float, seed: int,
                         plant_q: bool = False) -> DistanceBiasedGame:
    """Random biased game from a SplitMix64 stream seeded by ``seed``.

    Draw order: R row-major, C row-major, base_row, base_col (each base from
    ``n`` exponential draws, normalized).  With ``plant_q`` a further draw
    picks an index and a mass in (1/2, 1) that is mixed into base_col, so its
    largest entry exceeds 1/2.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = SplitMix64(seed)
    R = np.array([rng.random() for _ in range(n * n)]).reshape(n, n)
    C = np.array([rng.random() for _ in range(n * n)]).reshape(n, n)
    p = MixedStrategy.normalized(rng.simplex(n))
    q = np.array(rng.simplex(n))
    if plant_q:
        k = rng.next_u64() % n
        mass = 0.5 + 0.5 * rng.random_open()
        q = (1 - mass) * q
        q[k] += mass
    return DistanceBiasedGame(BimatrixGame(R, C), p, MixedStrategy.normalized(q), norm_row, norm_col, d_row, d_col)


@dataclass(frozen=True)
class Range:
    lo: float
    hi: float
    integer: bool = False

    @classmethod
    def parse(cls, text, integer: bool = False) -> Range:
        if isinstance(text, Range):
            return text
        if isinstance(text, (int, float)):
            return cls(text, text, integer)
        parts = str(text).split(":")
        conv = int if integer else float
        if len(parts) == 1:
            v = conv(parts[0])
            return cls(v, v, integer)
        if len(parts) != 2:
            raise ValueError(f"bad range {text!r}; use VALUE or LO:HI")
        lo, hi = conv(parts[0]), conv(parts[1])
        if lo > hi:
            raise ValueError(f"empty range {text!r}")
        return cls(lo, hi, integer)

    def draw(self, rng: SplitMix64):
        """Integers uniformly in ``[lo, hi]``; reals uniformly in the open interval ``(lo, hi)``."""
        if self.lo == self.hi:
            return self.lo
        if self.integer:
            return int(self.lo + rng.next_u64() % (self.hi - self.lo + 1))
        return self.lo + (self.hi - self.lo) * rng.random_open()


# Separates the parameter stream of a trial from its game stream.
_PARAM_SALT = 0x5DEECE66D


@dataclass(frozen=True)
class Trial:
    seed: int
    n: int
    norm_row: NormKind
    norm_col: NormKind
    d_row: float
    d_col: float
    plant_q: bool

    def game(self) -> DistanceBiasedGame:
        return generate_random_game(self.n, self.norm_row, self.norm_col, self.d_row, self.d_col, self.seed,
                                    self.plant_q)


def make_trials(norm_row, norm_col, n, trials: int, d_row, d_col, seed: int, plant_q: bool = False) -> list[Trial]:
    """Trial ``t`` uses seed ``seed + t``; ``plant_q`` plants a heavy base_col entry in odd trials."""
    n_range, dr, dc = Range.parse(n, integer=True), Range.parse(d_row), Range.parse(d_col)
    out = []
    for t in range(trials):
        s = seed + t
        rng = SplitMix64(s ^ _PARAM_SALT)
        out.append(Trial(s, int(n_range.draw(rng)), NormKind.parse(norm_row), NormKind.parse(norm_col),
                         float(dr.draw(rng)), float(dc.draw(rng)), plant_q and t % 2 == 1))
    return out


def run_trial(trial: Trial, timing: bool = False) -> dict:
    g = trial.game()
    res = base_algorithm(g)
    return {
        "seed": trial.seed, "n": trial.n, "norm_row": trial.norm_row.value, "norm_col": trial.norm_col.value,
        "d_row": trial.d_row, "d_col": trial.d_col, "delta": res.info["delta"],
        "row_regret": res.regrets[0], "col_regret": res.regrets[1], "guarantee": res.guarantee,
        "analytic_bound": res.info["analytic_bound"], "runtime_ms": res.runtime_ms if timing else 0.0,
        "path": res.info["path"],
    }


def _run_trial_untimed(trial: Trial) -> dict:
    return run_trial(trial, False)


def _run_trial_timed(trial: Trial) -> dict:
    return run_trial(trial, True)


def benchmark_rows(trials: list[Trial], workers: int = 1, timing: bool = False) -> list[dict]:
    fn = _run_trial_timed if timing else _run_trial_untimed
    if workers <= 1:
        return [fn(t) for t in trials]
    with ProcessPoolExecutor(workers) as pool:
        return list(pool.map(fn, trials, chunksize=max(1, len(trials) // (4 * workers))))


def _cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def rows_to_csv(rows: list[dict]) -> str:
    """Per-trial rows followed by ``max`` and ``mean`` summary rows."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(_cell(r[c]) for c in CSV_HEADER)
    stats = ("row_regret", "col_regret", "guarantee", "analytic_bound", "runtime_ms")
    for label, agg in (("max", max), ("mean", lambda xs: math.fsum(xs) / len(xs))):
        cells = {c: "" for c in CSV_HEADER}
        cells["seed"] = label
        if rows:
            for c in stats:
                cells[c] = _cell(float(agg([r[c] for r in rows])))
        w.writerow(cells[c] for c in CSV_HEADER)
    return buf.getvalue()


def run_benchmark(norm, n, trials: int, d_row, d_col, seed: int, out=None, *, norm_col=None, workers: int = 1,
                  timing: bool = False, plant_q: bool = False) -> str:
    """Run the base algorithm on a seeded ensemble and return (and optionally write) the CSV."""
    ts = make_trials(norm, norm_col if norm_col is not None else norm, n, trials, d_row, d_col, seed, plant_q)
    text = rows_to_csv(benchmark_rows(ts, workers, timing))
    if out is not None:
        if hasattr(out, "write"):
            out.write(text)
        else:
            Path(out).write_text(text)
    return text


# -- commands ---------------------------------------------------------------

def _read_document(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise GameFileError("", f"cannot read {path}: {e.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise GameFileError("", f"{path}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from None


def _read_game(path: str):
    return parse_game(_read_document(path))


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_solve(args) -> int:
    g = _read_game(args.game)
    if args.method == "base":
        if not isinstance(g, DistanceBiasedGame):
            raise ValueError("method base needs a biased game")
        result = base_algorithm(g)
    elif args.method == "qptas":
        if isinstance(g, DistanceBiasedGame):
            g = PenaltyGame.from_biased(g)
        if not isinstance(g, PenaltyGame):
            raise ValueError("method qptas needs a penalty or biased game")
        result = qptas(g, args.epsilon, args.k, workers=args.workers, fast=args.fast)
    else:
        if not isinstance(g, LipschitzGame):
            raise ValueError("method lipschitz needs a lipschitz game")
        result = find_equilibrium(g, args.epsilon, args.k, workers=args.workers, fast=args.fast)
    _emit(serialize_result(result, args.timing), args.out)
    return EXIT_NO_EQUILIBRIUM if isinstance(result, NoExactEquilibrium) else EXIT_OK


def _parse_against(text: str, n: int) -> MixedStrategy:
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise ValueError(f"--against must be comma-separated numbers, got {text!r}") from None
    if len(values) != n:
        raise ValueError(f"--against has {len(values)} entries, game has n={n}")
    return MixedStrategy(values)


def _cmd_best_response(args) -> int:
    g = _read_game(args.game)
    player = player_index(args.player)
    opponent = _parse_against(args.against, g.n if not isinstance(g, LipschitzGame) else g.spaces[1 - player].n)
    doc: dict[str, Any] = {"player": "row" if player == ROW else "col"}
    if isinstance(g, DistanceBiasedGame):
        br = best_response_for(g, player, opponent)
        profile = (br, opponent) if player == ROW else (opponent, br)
        doc.update(strategy=br.probs, value=utility_biased(g, *profile, player))
        if args.oracle:
            payoffs = g.game.payoff_vector(player, opponent)
            norm, base, d = g.norm(player), g.base(player), g.weight(player)
            doc["oracle_grid_l"] = args.l
            doc["oracle_grid_value"] = grid_max_biased(norm, payoffs, base, d, args.l)
            if norm in (NormKind.L2SQ, NormKind.INNER) and d > 0 and g.n <= 20:
                ex = exhaustive_quadratic_br(payoffs, base, d)
                doc["oracle_support_strategy"] = ex.probs
    elif isinstance(g, PenaltyGame):
        br, value = approx_best_response_penalty(g, player, opponent, args.epsilon)
        doc.update(strategy=br.probs, value=value, epsilon=args.epsilon)
        if args.oracle:
            exact = exact_best_response_penalty(g, player, opponent)
            if exact is not None:
                doc.update(oracle_strategy=exact[0].probs, oracle_value=exact[1])
    else:
        raise ValueError("best-response supports biased and penalty games")
    _emit(dumps(doc), args.out)
    return EXIT_OK


def exact_regrets(g, profile) -> tuple[tuple[float, ...], bool]:
    """Regrets of a two-player profile and whether they are exact rather than grid estimates."""
    x, y = profile[0], profile[1]
    if isinstance(g, DistanceBiasedGame):
        return measure_regrets(g, x, y), True
    if isinstance(g, PenaltyGame):
        values, exact = [], True
        for player, opp in ((ROW, y), (COL, x)):
            br = exact_best_response_penalty(g, player, opp)
            if br is None:
                exact = False
                br = approx_best_response_penalty(g, player, opp, 0.01)
            values.append(br[1])
        return verify_epsilon_equilibrium(g, (x, y), 0.0, values).regrets, exact
    raise ValueError("exact regrets need a biased or penalty game")


def _lipschitz_regrets(doc: dict, g: LipschitzGame, profile, epsilon: float) -> tuple[tuple[float, ...], bool]:
    if "vertices" not in doc:
        d = (doc.get("d_row", 0.0), doc.get("d_col", 0.0)) if doc["utility"] == "bilinear_minus_inner" else (0, 0)
        return exact_bimatrix_regrets(_bimatrix(doc), profile[0], profile[1], *d), True
    ev = GuaranteeEvaluator(g, max(epsilon / 4, 1e-3))
    return ev.evaluate(g.points(profile))[1], False


def _cmd_verify(args) -> int:
    game_doc = _read_document(args.game)
    g = parse_game(game_doc)
    try:
        doc = json.loads(Path(args.profile).read_text())
        profile = tuple(MixedStrategy(p) for p in _field(doc, "profile"))
    except (OSError, json.JSONDecodeError, ValueError) as e:
        raise ValueError(f"cannot read profile {args.profile}: {e}") from None
    if isinstance(g, LipschitzGame):
        regrets, exact = _lipschitz_regrets(game_doc, g, profile, args.epsilon)
    else:
        regrets, exact = exact_regrets(g, profile)
    holds = max(regrets) <= args.epsilon + 1e-9
    worst = max(range(len(regrets)), key=lambda i: (regrets[i], -i))
    out = {"holds": holds, "epsilon": args.epsilon, "regrets": list(regrets), "exact": exact}
    if not holds:
        out.update(player=worst, gap=regrets[worst])
    _emit(dumps(out), args.out)
    return EXIT_OK if holds else EXIT_VERIFY_FAILED


def _cmd_gen(args) -> int:
    g = generate_random_game(args.n, args.norm_row or args.norm, args.norm_col or args.norm, args.d_row, args.d_col,
                             args.seed, args.plant_q)
    _emit(dumps(game_to_document(g)), args.out)
    return EXIT_OK


def _cmd_bench(args) -> int:
    text = run_benchmark(args.norm_row or args.norm, args.n, args.trials, args.d_row, args.d_col, args.seed,
                         norm_col=args.norm_col or args.norm, workers=args.workers, timing=args.timing,
                         plant_q=args.plant_q)
    _emit(text, args.csv)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lipeq", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    norms = [k.value for k in NormKind]

    p = sub.add_parser("solve", help="compute an approximate equilibrium")
    p.add_argument("--game", required=True)
    p.add_argument("--method", choices=("base", "qptas", "lipschitz"), default="base")
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--k", type=int, default=None, help="override the uniformity k")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--fast", action="store_true", help="accept any passing profile instead of the first")
    p.add_argument("--timing", action="store_true", help="include runtime_ms in the output")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("best-response", help="best response against a fixed opponent strategy")
    p.add_argument("--game", required=True)
    p.add_argument("--player", choices=("row", "col"), required=True)
    p.add_argument("--against", required=True, help='opponent strategy, e.g. "0.5,0.5"')
    p.add_argument("--oracle", action="store_true", help="also report brute-force oracle values")
    p.add_argument("--l", type=int, default=300, help="grid size for the oracle")
    p.add_argument("--epsilon", type=float, default=0.05, help="tolerance for penalty games")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_best_response)

    p = sub.add_parser("verify", help="check a profile's regrets against epsilon")
    p.add_argument("--game", required=True)
    p.add_argument("--profile", required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("gen", help="write a seeded random biased game")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--norm", choices=norms, default="l1")
    p.add_argument("--norm-row", choices=norms)
    p.add_argument("--norm-col", choices=norms)
    p.add_argument("--d-row", type=float, default=0.25)
    p.add_argument("--d-col", type=float, default=0.25)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--plant-q", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("bench", help="run the base algorithm on a random ensemble, write CSV")
    p.add_argument("--norm", choices=norms, default="l1")
    p.add_argument("--norm-row", choices=norms)
    p.add_argument("--norm-col", choices=norms)
    p.add_argument("--n", default="2:25", help="N or LO:HI")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--d-row", default="0:0.5", help="X or LO:HI (open interval)")
    p.add_argument("--d-col", default="0:0.5", help="X or LO:HI (open interval)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timing", action="store_true")
    p.add_argument("--plant-q", action="store_true", help="heavy base_col entry in odd trials")
    p.add_argument("--csv")
    p.set_defaults(func=_cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, BudgetExceeded, OSError) as e:
        print(f"lipeq: error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
