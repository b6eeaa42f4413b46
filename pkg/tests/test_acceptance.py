"""Acceptance criteria, one recorded PASS/FAIL line each.

Every computation lives in a cached ``compute_*`` helper so the determinism
criterion can compare a cached run against a fresh one and against a
different worker count.
"""
import csv
import functools
import hashlib
import io
import time

import numpy as np
import pytest

from lipeq.approx import base_algorithm, best_response_for
from lipeq.biased import best_response, linf_partition, quadratic_candidates, wsne_quality
from lipeq.cli import benchmark_rows, exact_regrets, make_trials, rows_to_csv, serialize_result
from lipeq.core import COL, ROW, BimatrixGame, NormKind, PenaltyGame, PenaltySpec, penalty_value, utility_biased
from lipeq.cli import generate_random_game
from lipeq.lipschitz import (BudgetExceeded, Equilibrium, bimatrix_as_lipschitz, exact_bimatrix_regrets,
                             find_equilibrium)
from lipeq.oracle import exhaustive_quadratic_br, grid_max_biased
from lipeq.penalty import qptas
from lipeq.rng import SplitMix64

pytestmark = pytest.mark.acceptance

TOL = 1e-9
TRIALS = 1000

ENSEMBLES = {
    "L1": dict(norm="l1", d_row="0:0.5", d_col="0:0.5", plant_q=False),
    "L2SQ": dict(norm="l2sq", d_row="1", d_col="1", plant_q=True),
    "LINF": dict(norm="linf", d_row="0:1", d_col="0:1", plant_q=False),
    "INNER_HEAVY": dict(norm="inner", d_row="0:1", d_col="0.5:1", plant_q=False),
    "INNER_LIGHT": dict(norm="inner", d_row="0:1", d_col="0:0.5", plant_q=False),
    "L1_DOMINANT": dict(norm="l1", d_row="0.5:1", d_col="0:1", plant_q=False),
}


def sha(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()[:16]


# -- benchmark ensembles (criteria 1-4, 8) ------------------------------------

def run_ensemble(name: str, workers: int):
    spec = ENSEMBLES[name]
    trials = make_trials(spec["norm"], spec["norm"], "2:25", TRIALS, spec["d_row"], spec["d_col"], 0, spec["plant_q"])
    t0 = time.perf_counter()
    rows = benchmark_rows(trials, workers)
    return trials, rows, rows_to_csv(rows), time.perf_counter() - t0


@functools.cache
def ensemble(name: str, workers: int = 1):
    return run_ensemble(name, workers)


def max_guarantee(rows):
    return max(r["guarantee"] for r in rows)


def bound_check(criterion, label, names_bounds, budget_s):
    parts, ok = [], True
    for name, bound in names_bounds:
        _, rows, text, secs = ensemble(name)
        parsed = [r for r in csv.DictReader(io.StringIO(text)) if r["seed"] not in ("max", "mean")]
        worst = max(float(r["guarantee"]) for r in parsed)
        ok &= len(parsed) == TRIALS and worst <= bound + TOL and worst == max_guarantee(rows)
        parts.append(f"{name}: max guarantee {worst:.6f} <= {bound:.6f} ({secs:.1f}s, budget {budget_s}s)")
    criterion(label, ok, "; ".join(parts))
    return ok


def test_criterion_1_l1_bound(criterion):
    assert bound_check(criterion, "1 L1 bound 2/3", [("L1", 2 / 3)], 10)


def test_criterion_2_l2sq_bound(criterion):
    _, rows, _, _ = ensemble("L2SQ")
    row_ok = all(r["row_regret"] <= r["delta"] + TOL for r in rows)
    planted = {r["delta"] for r in rows}
    ok = bound_check(lambda *a: None, "", [("L2SQ", 5 / 7)], 30)
    worst = max_guarantee(rows)
    detail = (f"max guarantee {worst:.6f} <= {5 / 7:.6f}; row regret <= delta on all {len(rows)}; "
              f"delta branches seen {sorted(round(d, 6) for d in planted)}")
    assert criterion("2 L2SQ bound 5/7", ok and row_ok and len(planted) == 2, detail)


def test_criterion_3_linf_bound(criterion):
    assert bound_check(criterion, "3 LINF bound 2/3", [("LINF", 2 / 3)], 10)


def test_criterion_4_inner_bounds(criterion):
    assert bound_check(criterion, "4 INNER bounds 13/21 and 3/5",
                       [("INNER_HEAVY", 13 / 21), ("INNER_LIGHT", 3 / 5)], 10)


# -- best-response oracle equivalence (criterion 5) ---------------------------

def draw_instance(seed: int, n_hi: int, d_lo: float, d_hi: float, plant: bool = False):
    rng = SplitMix64(seed)
    n = 2 + rng.next_u64() % (n_hi - 1)
    a = np.array([rng.random() for _ in range(n)])
    p = np.array(rng.simplex(n))
    if seed % 5 == 4:
        p = np.zeros(n)
        p[rng.next_u64() % n] = 1.0
    if plant:
        k = rng.next_u64() % n
        mass = 0.5 + 0.5 * rng.random_open()
        p = (1 - mass) * p
        p[k] += mass
    d = d_lo + (d_hi - d_lo) * rng.random_open()
    return a, p / p.sum(), d


def biased_value(norm, x, a, p, d):
    return float(np.asarray(x) @ a - d * penalty_value(x, p, norm))


@functools.cache
def compute_oracle_equivalence():
    failures, worst_gap, worst_enum, outputs = [], 0.0, 0.0, []
    t0 = time.perf_counter()
    for norm in NormKind:
        for seed in range(TRIALS):
            a, p, d = draw_instance(seed, 6, 0.0, 1.5)
            base = np.zeros_like(p) if norm is NormKind.INNER else p
            x = best_response(norm, a, base, d)
            outputs.append(repr(x.tolist()))
            value = biased_value(norm, x.probs, a, base, d)
            grid = grid_max_biased(norm, a, base, d, 300)
            worst_gap = max(worst_gap, grid - value)
            if value < grid - 1e-12:
                failures.append((norm.value, seed, "grid"))
            if norm in (NormKind.L2SQ, NormKind.INNER):
                ex = exhaustive_quadratic_br(a, base, d).probs
                diff = abs(value - biased_value(norm, ex, a, base, d))
                worst_enum = max(worst_enum, diff)
                if diff > TOL:
                    failures.append((norm.value, seed, "enumeration"))
    return failures, worst_gap, worst_enum, sha("\n".join(outputs)), time.perf_counter() - t0


def test_criterion_5_oracle_equivalence(criterion):
    failures, gap, enum, _, secs = compute_oracle_equivalence()
    detail = (f"{len(failures)} failures over {4 * TRIALS} instances; max grid excess {gap:.2e}; "
              f"max enumeration gap {enum:.2e} ({secs:.1f}s, budget 60s)")
    assert criterion("5 best-response oracle equivalence", not failures, detail), failures[:5]


# -- structural lemma suite (criterion 6) --------------------------------------

def quadratic(a, p, d):
    return best_response(NormKind.L2SQ, a, p, d).probs


def check_prefix(seed):
    a, p, d = draw_instance(seed, 8, 0.0, 2.0, plant=seed % 2 == 1)
    x = quadratic(a, p, d)
    order = np.argsort(-(a + 2 * d * p), kind="stable")
    on = x[order] > 0
    return not np.any(on[1:] & ~on[:-1]), x.tolist()


def check_pure(seed):
    a, _, d = draw_instance(seed, 8, 0.5, 2.0)
    y = best_response(NormKind.INNER, a, np.zeros_like(a), d).probs
    return int(np.count_nonzero(y)) >= 2, y.tolist()


def check_ymax(seed, d_lo=0.5, d_hi=2.0):
    a, _, d = draw_instance(seed, 8, d_lo, d_hi)
    y = best_response(NormKind.INNER, a, np.zeros_like(a), d).probs
    return y.max() <= 0.75 + 1e-12, (y.tolist(), d)


def check_inner_square(seed):
    a, _, d = draw_instance(seed, 8, 0.5, 1.0)
    y = best_response(NormKind.INNER, a, np.zeros_like(a), d).probs
    return d * (y @ y) <= 5 / 8 + 1e-12, y.tolist()


def check_monotone(seed):
    a, p, _ = draw_instance(seed, 8, 0.0, 1.0, plant=seed % 2 == 1)
    cands = quadratic_candidates(a, p, 1.0)
    alpha = sorted(a + 2 * p, reverse=True)
    ok = True
    for k in range(1, len(cands)):
        lo, hi = cands[k - 1], cands[k]
        if lo is not None and hi is not None and alpha[k] > 1:
            ok &= hi.utility > lo.utility
    return ok, [c.utility if c else None for c in cands]


def check_positive(seed):
    a, q, _ = draw_instance(seed, 8, 0.0, 1.0, plant=True)
    y = quadratic(a, q, 1.0)
    return bool(y[int(np.argmax(q))] > 0), y.tolist()


def check_heavy_base(seed):
    a, q, _ = draw_instance(seed, 8, 0.0, 1.0, plant=True)
    y = quadratic(a, q, 1.0)
    k = int(np.argmax(q))
    return y @ y - 2 * y @ q <= 1 - 2 * q[k] + TOL, y.tolist()


def check_heavy_base_regret(seed):
    n = 2 + seed % 11
    g = generate_random_game(n, "l2sq", "l2sq", 1.0, 1.0, seed, plant_q=True)
    res = base_algorithm(g)
    return res.regrets[1] <= 2 - 2 * res.info["delta"] + TOL, list(res.regrets)


def check_linf(seed):
    a, p, d = draw_instance(seed, 8, 0.0, 1.5)
    x = best_response(NormKind.LINF, a, p, d).probs
    part = linf_partition(a, p, d)
    ok = True
    if part.low:
        ok = bool(np.all(x[list(part.low)] <= 1e-12) and np.abs(x - p).max() >= part.p_max - 1e-12)
    return ok, x.tolist()


def check_dominance(seed):
    n = 2 + seed % 9
    if seed % 2:
        lo = max(1, n // 2)
        d_row, d_col, norm = lo + (seed % 7) / 7, (lo + 0.5) if seed % 4 == 1 else 0.3, "linf"
    else:
        d_row, d_col, norm = 0.5 + (seed % 7) / 7, 0.6 if seed % 4 == 0 else 0.2, "l1"
    g = generate_random_game(n, norm, norm, d_row, d_col, seed)
    res = base_algorithm(g)
    ok = res.method == "dominance" and res.regrets == (0.0, 0.0)
    x, y = res.profile
    for player, opp in ((ROW, y), (COL, x)):
        grid = grid_max_biased(g.norm(player), g.game.payoff_vector(player, opp), g.base(player), g.weight(player), 40)
        ok &= utility_biased(g, x, y, player) >= grid - 1e-12
    return ok, [s.tolist() for s in res.profile]


LEMMAS = {
    "prefix support": check_prefix,
    "no pure response (INNER, d>1/2)": check_pure,
    "max probability <= 3/4 (INNER, d>1/2)": check_ymax,
    "prefix extension monotone (d=1)": check_monotone,
    "heavy base index played (d=1)": check_positive,
    "heavy base inequality (d=1)": check_heavy_base,
    "LINF low set unplayed and radius >= p_max": check_linf,
    "dominance gives zero regrets": check_dominance,
}

CORRECTED = {
    "max probability <= 3/4 for d in [1, 2)": functools.partial(check_ymax, d_lo=1.0, d_hi=2.0),
    "d * y.y <= 5/8 for d in (1/2, 1)": check_inner_square,
    "column regret <= 2 - 2 delta on heavy bases": check_heavy_base_regret,
}


def run_checks(checks):
    out, digest = {}, []
    for name, fn in checks.items():
        bad = []
        for seed in range(TRIALS):
            ok, payload = fn(seed)
            digest.append(repr(payload))
            if not ok:
                bad.append(seed)
        out[name] = bad
    return out, sha("\n".join(digest))


@functools.cache
def compute_lemmas():
    return run_checks(LEMMAS)


@functools.cache
def compute_corrected():
    return run_checks(CORRECTED)


def test_criterion_6_structural_lemmas(criterion):
    results, _ = compute_lemmas()
    corrected, _ = compute_corrected()
    parts = [f"{name}: {len(bad)}/{TRIALS} violations" + (f" (first seed {bad[0]})" if bad else "")
             for name, bad in results.items()]
    parts += [f"[corrected] {name}: {len(bad)}/{TRIALS}" for name, bad in corrected.items()]
    ok = not any(results.values())
    criterion("6 structural lemma suite", ok, "; ".join(parts))
    assert ok, "; ".join(p for p in parts if not p.endswith(": 0/1000 violations"))


def test_corrected_lemma_variants_hold():
    corrected, _ = compute_corrected()
    assert not any(corrected.values()), corrected


# -- Lipschitz search and QPTAS soundness (criterion 7) ------------------------

EPS = 0.3
K_DESK = 12


def desk_game(seed: int) -> BimatrixGame:
    rng = SplitMix64(seed)
    n = 2 + seed % 2
    R = np.array([rng.random() for _ in range(n * n)]).reshape(n, n)
    C = np.array([rng.random() for _ in range(n * n)]).reshape(n, n)
    return BimatrixGame(R, C)


@functools.cache
def compute_desk(workers: int = 1):
    outputs, worst, verdicts = [], 0.0, []
    t0 = time.perf_counter()
    for seed in range(20):
        game = desk_game(seed)
        lip = find_equilibrium(bimatrix_as_lipschitz(game), EPS, K_DESK, workers=workers)
        zero = PenaltyGame(game, PenaltySpec.zero(), PenaltySpec.zero())
        qp = qptas(zero, EPS, K_DESK, workers=workers)
        for verdict, regrets_of in ((lip, lambda v: exact_bimatrix_regrets(game, *v.result.profile)),
                                    (qp, lambda v: exact_regrets(zero, v.result.profile)[0])):
            verdicts.append(isinstance(verdict, Equilibrium))
            outputs.append(serialize_result(verdict))
            if isinstance(verdict, Equilibrium):
                worst = max(worst, max(regrets_of(verdict)))
    return outputs, worst, all(verdicts), time.perf_counter() - t0


def budget_guard_triggers() -> bool:
    zero10 = np.zeros((10, 10))
    try:
        find_equilibrium(bimatrix_as_lipschitz(BimatrixGame(zero10, zero10)), 0.01)
        return False
    except BudgetExceeded:
        pass
    spec = PenaltySpec.from_norm("l1", np.full(10, 0.1), 1.0)
    try:
        qptas(PenaltyGame(BimatrixGame(zero10, zero10), spec, spec), 0.01)
        return False
    except BudgetExceeded:
        return True


def test_criterion_7_lipschitz_and_qptas(criterion):
    _, worst, all_found, secs = compute_desk()
    guard = budget_guard_triggers()
    ok = all_found and worst <= 3 * EPS + TOL and guard
    detail = (f"20 games x 2 methods, k={K_DESK}: max exact regret {worst:.4f} <= {3 * EPS}; "
              f"no NoExactEquilibrium: {all_found}; budget guard at n=10, eps=0.01: {guard} ({secs:.1f}s, budget 300s)")
    assert criterion("7 Lipschitz/QPTAS soundness", ok, detail)


# -- WSNE bound (criterion 8) --------------------------------------------------

def dominance_wsne(name: str):
    trials, rows, _, _ = ensemble(name)
    worst_excess, count = -np.inf, 0
    for trial, row in zip(trials, rows):
        if row["path"] != "dominance":
            continue
        count += 1
        x, y = base_algorithm(trial.game()).profile
        worst_excess = max(worst_excess, wsne_quality(trial.game().game, x, y) - 2 * max(trial.d_row, trial.d_col))
    return count, worst_excess


def test_criterion_8_wsne_bound(criterion):
    literal_count, literal_excess = dominance_wsne("L1")
    count, excess = dominance_wsne("L1_DOMINANT")
    ok = literal_excess <= TOL and count > 0 and excess <= TOL
    detail = (f"criterion-1 ensemble: {literal_count} dominance paths (d < 1/2 never dominant); "
              f"d_row in (1/2, 1) ensemble: {count} dominance paths, max wsne - 2 max(d) = {excess:.3e}")
    assert criterion("8 WSNE bound on dominance equilibria", ok, detail)


# -- determinism (criterion 9) -------------------------------------------------

def test_criterion_9_determinism(criterion):
    mismatches = []
    for name in ("L1", "L2SQ", "LINF", "INNER_HEAVY", "INNER_LIGHT"):
        first = ensemble(name)[2]
        if run_ensemble(name, 4)[2] != first or run_ensemble(name, 1)[2] != first:
            mismatches.append(name)
    if compute_oracle_equivalence()[3] != compute_oracle_equivalence.__wrapped__()[3]:
        mismatches.append("oracle equivalence")
    if compute_lemmas()[1] != compute_lemmas.__wrapped__()[1]:
        mismatches.append("lemma suite")
    desk = compute_desk(1)[0]
    if compute_desk(4)[0] != desk or compute_desk.__wrapped__(1)[0] != desk:
        mismatches.append("lipschitz/qptas")
    detail = ("benchmark CSVs for criteria 1-4 and serialized verdicts for criterion 7 compared across workers "
              "{1, 4} and a rerun; criteria 5-6 are single-threaded and compared across two runs by digest; "
              f"mismatches: {mismatches or 'none'}")
    assert criterion("9 determinism", not mismatches, detail)


def test_column_response_used_by_dominance_check_is_exact():
    g = generate_random_game(4, "l1", "l1", 0.7, 0.1, 3)
    res = base_algorithm(g)
    assert res.profile[1] == best_response_for(g, COL, res.profile[0])
