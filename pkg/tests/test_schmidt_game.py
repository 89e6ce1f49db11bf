from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import CAT, FIB
from toraldyn.errors import BoxTooSmall, GuaranteeViolated, InsideWeakStable
from toraldyn.exact_linalg import IntMatrix
from toraldyn.schmidt_game import (
    Ball, GameConfig, SegmentGame, alice_strategy, dist0, make_bob, play_game, segment_dist0, verify_nondense,
)
from toraldyn.spectral import decompose

SD_FIB = decompose(FIB, 128)


def brute_dist0(p0, p1, scale, samples=4001, box=3):
    """Dense grid over the segment and over integer translates, in orthonormal eigen coordinates."""
    _, vecs = np.linalg.eigh(np.array([[1.0, 1.0], [1.0, 0.0]]))
    p0, p1 = np.array([float(x) for x in p0]), np.array([float(x) for x in p1])
    ts = np.linspace(0.0, 1.0, samples)
    pts = p0[None, :] + ts[:, None] * (p1 - p0)[None, :]
    r = np.arange(-box, box + 1)
    shifts = np.stack(np.meshgrid(r, r, indexing="ij"), axis=-1).reshape(-1, 2)
    allpts = pts[:, None, :] + shifts[None, :, :]
    coords = allpts @ vecs
    return scale * np.min(np.max(np.abs(coords), axis=2))


rationals = st.fractions(min_value=-2, max_value=2, max_denominator=64)


@given(rationals, rationals, rationals, rationals)
@settings(max_examples=30)
def test_segment_dist0_matches_dense_grid(a, b, c, d):
    p0, p1 = [a, b], [a + c / 8, b + d / 8]
    got = float(segment_dist0(p0, p1, SD_FIB).value)
    want = brute_dist0(p0, p1, float(SD_FIB.scale))
    step = float(SD_FIB.scale) * max(abs(float(c)), abs(float(d))) / 8 / 4000
    assert got <= want + 1e-9
    assert got >= want - step - 1e-9


def test_dist0_of_lattice_point_and_half():
    assert dist0([3, -2], SD_FIB) == 0
    assert dist0(([Fraction(-1, 2), 0], [Fraction(1, 2), 0]), SD_FIB) == 0
    half = float(dist0([Fraction(1, 2), Fraction(1, 2)], SD_FIB))
    assert half == pytest.approx(brute_dist0([0.5, 0.5], [0.5, 0.5], float(SD_FIB.scale), samples=1))


def test_box_too_small():
    # the closest lattice point to this long segment is two cells away
    p0 = [Fraction(2, 5), Fraction(-2, 5)]
    p1 = [p0[0] + 3, p0[1] + 1]
    assert segment_dist0(p0, p1, SD_FIB).translate == (-2, 0)
    with pytest.raises(BoxTooSmall):
        segment_dist0(p0, p1, SD_FIB, lattice_box=1, max_box=1)


def _cfg(beta=Fraction(1, 2), x=(Fraction(1, 7), Fraction(2, 9)), w=(1, 0), radius=Fraction(1, 10), m=FIB, sd=SD_FIB):
    return GameConfig(m, sd, x, w, radius, beta)


def test_ball_thirds_and_containment():
    b = Ball(Fraction(1), Fraction(3))
    thirds = b.thirds()
    assert [t.center for t in thirds] == [-1, 1, 3]
    assert all(t.radius == 1 and b.contains(t) for t in thirds)
    assert not thirds[0].contains(b)


def test_alice_avoids_centered_lattice_point():
    # the image of the middle third meets 0, so Alice takes an outer third
    game = SegmentGame(_cfg(x=(0, 0)))
    B = Ball(Fraction(0), Fraction(1, 20))
    A, k, idx, values = alice_strategy(game, B)
    assert values[1] == 0
    assert idx in (1, 3) and A == B.thirds()[idx - 1]
    assert values[idx - 1] == max(values) >= 1 / (6 * game.lam)


def test_alice_takes_the_farthest_third():
    game = SegmentGame(_cfg(x=(Fraction(1, 2), Fraction(1, 2)), w=(1, 1)))
    B = Ball(Fraction(0), Fraction(1, 1000))
    _, k, idx, values = alice_strategy(game, B)
    assert values[idx - 1] == max(values) and min(values) > 0
    assert game.diameter(B, k) < 1 <= game.diameter(B, k + 1)


def test_guarantee_violation_is_raised():
    game = SegmentGame(_cfg())
    with pytest.raises(GuaranteeViolated):
        alice_strategy(game, Ball(Fraction(0), Fraction(1, 100)), eps=-10)


@pytest.mark.parametrize("bob", ["random", "stationary", "adversarial"])
@pytest.mark.parametrize("beta", [Fraction(1, 4), Fraction(3, 4)])
def test_games_keep_invariants(bob, beta):
    tr = play_game(_cfg(beta=beta), make_bob(bob), rounds=25, seed=3)
    assert tr.check_invariants() == []
    assert len(tr.strategy_rounds) == 25
    assert all(g >= 0 for g in tr.k_sequence_gaps)
    assert max(tr.k_sequence_gaps) <= tr.gap_bound()
    assert min(r.dist0_value for r in tr.strategy_rounds) >= 1 / (6 * tr.lam) - 1e-9


def test_games_on_cat_map_with_diagonal_direction():
    sd = decompose(CAT, 128)
    tr = play_game(_cfg(m=CAT, sd=sd, w=(1, 1)), make_bob("adversarial"), rounds=20, seed=11)
    assert tr.check_invariants() == []


def test_game_is_deterministic():
    a = play_game(_cfg(), make_bob("random"), rounds=15, seed=5)
    b = play_game(_cfg(), make_bob("random"), rounds=15, seed=5)
    c = play_game(_cfg(), make_bob("random"), rounds=15, seed=6)
    assert a.rounds == b.rounds and a.final_point == b.final_point
    assert a.final_point != c.final_point


def test_zero_rounds():
    tr = play_game(_cfg(), make_bob("random"), rounds=0)
    assert tr.rounds == [] and tr.final_param == 0
    with pytest.raises(ValueError):
        play_game(_cfg(), make_bob("random"), rounds=-1)


def test_preprocessing_shrinks_large_ball():
    tr = play_game(_cfg(radius=Fraction(3)), make_bob("stationary"), rounds=3)
    assert tr.preprocessing_rounds > 0
    assert all(r.phase == "preprocess" for r in tr.rounds[: tr.preprocessing_rounds])
    assert tr.check_invariants() == []


def test_invariant_checker_catches_tampering():
    tr = play_game(_cfg(), make_bob("random"), rounds=5, seed=1)
    r = tr.rounds[-1]
    from dataclasses import replace
    tr.rounds[-1] = replace(r, dist0_value=mpmath.mpf(0), B=Ball(r.B.center, r.B.radius * 2))
    problems = tr.check_invariants()
    assert any("dist0" in p for p in problems)
    assert any("radius(B)" in p for p in problems)


def test_config_validation():
    with pytest.raises(ValueError):
        _cfg(beta=Fraction(1))
    with pytest.raises(ValueError):
        GameConfig(FIB, SD_FIB, (0, 0), (1, 0), Fraction(1, 10), Fraction(1, 2), alpha=Fraction(1, 4))
    with pytest.raises(ValueError):
        _cfg(radius=0)
    with pytest.raises(ValueError):
        make_bob("lazy")
    m = IntMatrix([[2, 1, 0], [1, 1, 0], [0, 0, 1]])
    with pytest.raises(InsideWeakStable):
        GameConfig(m, decompose(m), (0, 0, 0), (0, 0, 1), Fraction(1, 10), Fraction(1, 2))


def test_final_point_stays_away_from_zero():
    tr = play_game(_cfg(), make_bob("adversarial"), rounds=40, seed=7)
    low, step = verify_nondense(tr.final_point, FIB, SD_FIB, 150)
    assert low >= 1e-4
    assert 0 <= step <= 150


def test_verify_nondense_of_fixed_point():
    assert verify_nondense([0, 0], FIB, SD_FIB, 10) == (0, 0)
    low, step = verify_nondense([Fraction(1, 5), Fraction(2, 5)], FIB, SD_FIB, 30)
    assert low > 0
    with pytest.raises(ValueError):
        verify_nondense([0, 0], FIB, SD_FIB, 0)
