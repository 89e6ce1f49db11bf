"""The ten acceptance criteria, one test each.

Each test records a one-line PASS/FAIL summary; the lines are printed at the end
of the pytest run and also when this file is executed directly.
"""

from __future__ import annotations

import functools
import math
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import mpmath
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import A, B, FIB, Q, S_EXPECTED, T_EXPECTED, s53_eigenvalues  # noqa: E402
from toraldyn.equidistribution import (  # noqa: E402
    birkhoff_report, conjugacy_defect, correlation_matrix, decay_residuals, loglinear_slope, straighten,
)
from toraldyn.exact_linalg import IntMatrix, commutator_is_zero, is_totally_irreducible, kronecker  # noqa: E402
from toraldyn.relation_analyzer import (  # noqa: E402
    MUST_COMMUTE, NO_CONCLUSION, compare_weak_stable, gcd_criterion, principal_angles, rational_invariant_search,
)
from toraldyn.schmidt_game import GameConfig, make_bob, play_game, verify_nondense  # noqa: E402
from toraldyn.spectral import decompose, stable_split  # noqa: E402

RESULTS: dict[int, str] = {}


def _record(n: int, ok: bool, detail: str) -> bool:
    RESULTS[n] = f"ACCEPTANCE {n}: {'PASS' if ok else 'FAIL'} {detail}"
    print(RESULTS[n])
    return ok


def criterion_1():
    t0 = time.perf_counter()
    q2 = Q @ Q
    S, T = kronecker(A, q2), kronecker(B, q2)
    ok = S.tolist() == S_EXPECTED and T.tolist() == T_EXPECTED
    ok &= not commutator_is_zero(S, T)
    ti = [is_totally_irreducible(m, 12) for m in (S, T)]
    ok &= all(t.certified for t in ti)
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 1.0
    return ok, f"matrices match, S T != T S, total irreducibility {[t.status for t in ti]}, {elapsed:.2f}s"


def criterion_2():
    S, T = IntMatrix(S_EXPECTED), IntMatrix(T_EXPECTED)
    sdS, sdT = decompose(S, 128), decompose(T, 128)
    with mpmath.workprec(256):
        want = sorted(mpmath.mpf(str(e.evalf(80))) for e in s53_eigenvalues())
        got = sorted(mpmath.re(r.value) for r in sdS.eigenvalues)
        err = max(abs(a - b) for a, b in zip(got, want))
    ws = compare_weak_stable(sdS, sdT)
    dims = (len(stable_split(sdS).weak_stable_basis()), len(stable_split(sdT).weak_stable_basis()))
    with sdS.workprec():
        r2 = mpmath.sqrt(2)
        span = [[-r2, 0, 1, 0], [0, -r2, 0, 1]]
        span_angle = max(max(principal_angles(stable_split(sd).weak_stable_basis(), span)) for sd in (sdS, sdT))
    between = max(ws.angles)
    tol = mpmath.mpf("1e-10")
    ok = err < mpmath.mpf("1e-20") and dims == (2, 2) and between < tol and span_angle < tol
    return ok, (f"eigenvalue error {mpmath.nstr(err, 3)}, dims {dims}, angle between {mpmath.nstr(between, 3)}, "
                f"angle to reference span {mpmath.nstr(span_angle, 3)}")


SD_FIB = decompose(FIB, 128)
BETAS = (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))
BOBS = ("random", "adversarial")


@functools.lru_cache(maxsize=None)
def fibonacci_games(count: int = 100, rounds: int = 40):
    rng = random.Random(2024)
    games = []
    t0 = time.perf_counter()
    for i in range(count):
        base = tuple(Fraction(rng.randrange(1, 997), 997) for _ in range(2))
        direction = (1, 0) if i % 2 == 0 else (1, 1)
        cfg = GameConfig(FIB, SD_FIB, base, direction, Fraction(1, 10), BETAS[i % 3])
        games.append(play_game(cfg, make_bob(BOBS[(i // 3) % 2]), rounds, seed=i))
    return games, time.perf_counter() - t0


def criterion_3():
    games, elapsed = fibonacci_games()
    lam = SD_FIB.blocks[0].modulus
    guarantee = 1 / (6 * lam) - mpmath.mpf("1e-9")
    problems = [p for g in games for p in g.check_invariants()]
    lows = [min(r.dist0_value for r in g.strategy_rounds) for g in games]
    full = all(len(g.strategy_rounds) == 40 for g in games)
    ok = not problems and full and min(lows) >= guarantee and elapsed < 30
    return ok, (f"{len(games)} games, {len(problems)} invariant violations, min dist0 {mpmath.nstr(min(lows), 6)} "
                f">= {mpmath.nstr(guarantee, 6)}, {elapsed:.1f}s")


def criterion_4():
    games, _ = fibonacci_games()
    sd = decompose(FIB, 256)
    floors = [verify_nondense(g.final_point, FIB, sd, 200)[0] for g in games[:20]]
    ok = min(floors) >= mpmath.mpf("1e-4")
    return ok, f"20 final points, smallest orbit distance to 0 over 200 steps {mpmath.nstr(min(floors), 6)}"


def criterion_5():
    defects = {name: conjugacy_defect(m, samples=100, n_max=50, seed=1)
               for name, m in (("F", FIB), ("S", IntMatrix(S_EXPECTED)), ("T", IntMatrix(T_EXPECTED)))}
    ok = all(v < mpmath.mpf("1e-8") for v in defects.values())
    return ok, "sup defect " + ", ".join(f"{k} {mpmath.nstr(v, 3)}" for k, v in defects.items())


def criterion_6():
    sys_ = straighten(FIB, SD_FIB, [1, 0])
    res = decay_residuals(sys_, n_max=40)
    slope = loglinear_slope(range(5, 41), res[5:41])
    bound = float(mpmath.log(sys_.eta / sys_.lam)) + 0.05
    return slope <= bound, f"slope {slope:.4f} <= {bound:.4f}"


def criterion_7():
    t0 = time.perf_counter()
    sys_ = straighten(FIB, SD_FIB, [1, 0])
    bound = -math.log(float(sys_.lam)) / 2 + 0.1
    gaps = list(range(2, 13))
    ok = True
    parts = []
    for name in ("cos:1,0", "sin:1,1"):
        res = correlation_matrix(sys_, [Fraction(1, 7), Fraction(2, 9)], name, 24, quadrature_points=4096)
        slope = loglinear_slope(gaps, res.max_by_gap(gaps))
        ok &= slope <= bound and res.disagreement < 1e-6
        parts.append(f"{name} slope {slope:.3f} disagreement {res.disagreement:.1e} ({res.points} points)")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 120
    return ok, "; ".join(parts) + f"; bound {bound:.3f}, {elapsed:.1f}s"


def criterion_8():
    with mpmath.workprec(200):
        x0 = [mpmath.sqrt(2) - 1, mpmath.sqrt(3) - 1]
    rep = birkhoff_report(FIB, x0, 10**5, 3)
    fixed = birkhoff_report(FIB, [0, 0], 10**5, 3)
    exact_one = all(v == 1 for v in fixed.character_averages.values())
    ok = rep.max_deviation <= 0.02 and exact_one
    return ok, f"max deviation {rep.max_deviation:.4f} <= 0.02, fixed point averages all 1: {exact_one}"


def criterion_9():
    S, T = IntMatrix(S_EXPECTED), IntMatrix(T_EXPECTED)
    dims = sorted(w.dimension for w in rational_invariant_search(S, T))
    ok = set(dims) == {2, 4} and all(d % dims[0] == 0 for d in dims)
    return ok, f"witness dimensions {dims}"


def criterion_10():
    a, b = gcd_criterion(4, 2), gcd_criterion(5, 2)
    ok = a.conclusion == NO_CONCLUSION and b.conclusion == MUST_COMMUTE
    return ok, f"(4,2): gcd {a.gcd}, no conclusion; (5,2): gcd {b.gcd}, must commute"


CRITERIA = {n: globals()[f"criterion_{n}"] for n in range(1, 11)}


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_acceptance(n):
    ok, detail = CRITERIA[n]()
    assert _record(n, ok, detail), RESULTS[n]


if __name__ == "__main__":
    failed = 0
    for n, fn in CRITERIA.items():
        failed += not _record(n, *fn())
    sys.exit(1 if failed else 0)
