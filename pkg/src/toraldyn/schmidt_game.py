"""Schmidt games on a line segment with Alice playing the trisection strategy.

The segment is ``x + t*w`` for a rational base point ``x`` and a rational
direction ``w``; balls are intervals in the parameter ``t`` with exact rational
centers and radii.  Because ``x``, ``w`` and all centers are rational, every
image ``T^k(x + t w)`` is computed exactly, and floating point only enters when
a distance is measured in the eigen-aligned norm.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .errors import BoxTooSmall, GuaranteeViolated
from .exact_linalg import IntMatrix
from .spectral import (
    CONJUGATE_PAIR,
    SpectralDecomposition,
    dominating_data,
    mp_to_fraction,
    sup_norm,
)

ALPHA = Fraction(1, 3)
EPSILON = mpmath.mpf("1e-9")


def _frac_vec(v) -> list[Fraction]:
    out = []
    for x in v:
        if isinstance(x, (mpmath.mpf,)):
            out.append(mp_to_fraction(x))
        elif isinstance(x, float):
            out.append(Fraction(x))
        else:
            out.append(Fraction(x))
    return out


def _round_half_up(x: Fraction) -> int:
    return math.floor(x + Fraction(1, 2))


# ---------------------------------------------------------------------------
# distance to the lattice


@dataclass(frozen=True)
class Dist0Result:
    value: mpmath.mpf
    t: mpmath.mpf
    translate: tuple


def _candidate_ts(u, v):
    """Breakpoints of t -> max_i |u_i + t v_i| on [0, 1] (1-dimensional blocks only)."""
    ts = [0, 1]
    n = len(u)
    for i in range(n):
        if v[i] != 0:
            ts.append(-u[i] / v[i])
        for j in range(i + 1, n):
            if v[i] != v[j]:
                ts.append((u[j] - u[i]) / (v[i] - v[j]))
            if v[i] != -v[j]:
                ts.append(-(u[i] + u[j]) / (v[i] + v[j]))
    return [t for t in ts if 0 <= t <= 1]


def _golden_min(h, lo, hi, iters):
    invphi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c = b - (b - a) * invphi
    d = a + (b - a) * invphi
    fc, fd = h(c), h(d)
    for _ in range(iters):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - (b - a) * invphi
            fc = h(c)
        else:
            a, c, fc = c, d, fd
            d = a + (b - a) * invphi
            fd = h(d)
    best = min([(h(lo), lo), (h(hi), hi), (fc, c), (fd, d)], key=lambda p: p[0])
    return best


def _screen(sd: SpectralDecomposition, c0, c1, box: int):
    """Float estimate of the minimum over each lattice translate in the box."""
    d = sd.dim
    pf = np.array([[float(sd.basis_change[i, j]) for j in range(d)] for i in range(d)])
    rng = np.arange(-box, box + 1)
    grid = np.stack(np.meshgrid(*([rng] * d), indexing="ij"), axis=-1).reshape(-1, d)
    u = np.array([float(x) for x in c0])[None, :] + grid @ pf.T
    v = np.array([float(b - a) for a, b in zip(c0, c1)])
    blocks = [list(b.columns) for b in sd.blocks]

    if all(len(cs) == 1 for cs in blocks):
        ts = [np.zeros(len(grid)), np.ones(len(grid))]
        with np.errstate(divide="ignore", invalid="ignore"):
            for i in range(d):
                if v[i] != 0:
                    ts.append(-u[:, i] / v[i])
                for j in range(i + 1, d):
                    if v[i] != v[j]:
                        ts.append((u[:, j] - u[:, i]) / (v[i] - v[j]))
                    if v[i] != -v[j]:
                        ts.append(-(u[:, i] + u[:, j]) / (v[i] + v[j]))
        t = np.clip(np.stack(ts, axis=1), 0.0, 1.0)
        pts = u[:, None, :] + t[:, :, None] * v[None, None, :]
        vals = np.max(np.abs(pts), axis=2)
        return grid, np.min(vals, axis=1)
    out = []
    for k in range(len(grid)):
        uk = u[k]
        hk = lambda t: max(float(np.linalg.norm(uk[cs] + t * v[cs])) for cs in blocks)
        out.append(_golden_min(hk, 0.0, 1.0, 80)[0])
    return grid, np.array(out)


def _exact_min(sd: SpectralDecomposition, u, v):
    """Minimum over t in [0, 1] of the block-max norm of u + t v (coordinates, unscaled)."""
    blocks = sd.blocks

    def h(t):
        return max(mpmath.sqrt(mpmath.fsum((u[c] + t * v[c]) ** 2 for c in b.columns)) for b in blocks)

    if all(b.kind != CONJUGATE_PAIR for b in blocks):
        best = None
        for t in _candidate_ts(u, v):
            val = h(t)
            if best is None or val < best[0]:
                best = (val, t)
        return best
    return _golden_min(h, mpmath.mpf(0), mpmath.mpf(1), int(sd.work_bits * 1.5))


def segment_dist0(p0: Sequence, p1: Sequence, sd: SpectralDecomposition, lattice_box: int = 1,
                  max_box: int = 8) -> Dist0Result:
    """inf over the segment [p0, p1] and n in Z^d of the norm of (point + n).

    Lattice translates within ``lattice_box`` of the reduced segment are searched;
    if the best one sits on the boundary of the box the box is doubled, up to
    ``max_box``, after which :class:`BoxTooSmall` is raised.
    """
    p0, p1 = _frac_vec(p0), _frac_vec(p1)
    d = sd.dim
    shift = [_round_half_up(x) for x in p0]
    q0 = [a - s for a, s in zip(p0, shift)]
    q1 = [a - s for a, s in zip(p1, shift)]
    with sd.workprec():
        c0 = sd.coordinates(q0)
        c1 = sd.coordinates(q1)
        v = [b - a for a, b in zip(c0, c1)]
        box = lattice_box
        while True:
            grid, vals = _screen(sd, c0, c1, box)
            floor_val = float(np.min(vals))
            picks = np.nonzero(vals <= floor_val + 1e-6 * (1 + floor_val))[0]
            best = None
            for k in picks:
                n = [int(x) for x in grid[k]]
                u = [c0[i] + mpmath.fsum(sd.basis_change[i, j] * n[j] for j in range(d)) for i in range(d)]
                val, t = _exact_min(sd, u, v)
                if best is None or val < best[0]:
                    best = (val, t, n)
            if max(abs(x) for x in best[2]) < box:
                break
            if box >= max_box:
                raise BoxTooSmall(f"minimizing lattice point on the boundary of a box of size {box}")
            box *= 2
        val, t, n = best
        return Dist0Result(sd.scale * val, mpmath.mpf(t), tuple(ni - si for ni, si in zip(n, shift)))


def dist0(points, sd: SpectralDecomposition, lattice_box: int = 1) -> mpmath.mpf:
    """Distance to the lattice of a point or of a segment given as a pair of endpoints."""
    if len(points) == 2 and isinstance(points[0], (list, tuple)):
        p0, p1 = points
    else:
        p0 = p1 = points
    return segment_dist0(p0, p1, sd, lattice_box).value


# ---------------------------------------------------------------------------
# game data


@dataclass(frozen=True)
class Ball:
    center: Fraction
    radius: Fraction

    def contains(self, other: "Ball") -> bool:
        return abs(other.center - self.center) + other.radius <= self.radius

    def thirds(self) -> list["Ball"]:
        r = self.radius / 3
        return [Ball(self.center - 2 * r, r), Ball(self.center, r), Ball(self.center + 2 * r, r)]


@dataclass(frozen=True)
class GameConfig:
    matrix: IntMatrix
    sd: SpectralDecomposition
    base_point: tuple
    direction: tuple
    radius: Fraction
    beta: Fraction
    alpha: Fraction = ALPHA

    def __post_init__(self):
        object.__setattr__(self, "base_point", tuple(_frac_vec(self.base_point)))
        object.__setattr__(self, "direction", tuple(_frac_vec(self.direction)))
        object.__setattr__(self, "radius", Fraction(self.radius))
        object.__setattr__(self, "beta", Fraction(self.beta))
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        if not (0 < self.alpha < 1 and 0 < self.beta < 1):
            raise ValueError("alpha and beta must lie in (0, 1)")
        if self.alpha != ALPHA:
            raise ValueError("the trisection strategy needs alpha = 1/3")
        if self.radius <= 0:
            raise ValueError("initial radius must be positive")
        if len(self.base_point) != self.matrix.dim or len(self.direction) != self.matrix.dim:
            raise ValueError("base point and direction must have the matrix dimension")
        # raises InsideWeakStable when the direction is not eventually expanded
        dominating_data(self.sd, self.direction)


@dataclass(frozen=True)
class RoundRecord:
    index: int
    phase: str
    B_prev: Ball
    A: Ball
    B: Ball
    k: int | None
    chosen_third: int
    dist0_value: mpmath.mpf | None
    third_values: tuple
    diameter: mpmath.mpf | None
    diameter_next: mpmath.mpf | None


@dataclass
class GameTranscript:
    config: GameConfig
    bob: str
    seed: int
    lam: mpmath.mpf
    k_I: int
    B0: Ball
    preprocessing_rounds: int
    rounds: list = field(default_factory=list)
    final_param: Fraction | None = None
    final_point: tuple | None = None
    final_radius: Fraction | None = None

    @property
    def strategy_rounds(self) -> list[RoundRecord]:
        return [r for r in self.rounds if r.phase == "strategy"]

    @property
    def k_sequence(self) -> list[int]:
        return [r.k for r in self.strategy_rounds]

    @property
    def k_sequence_gaps(self) -> list[int]:
        ks = self.k_sequence
        return [b - a for a, b in zip(ks, ks[1:])]

    def gap_bound(self) -> int:
        """ceil(log_lambda(1/(alpha*beta))) + 2."""
        ab = self.config.alpha * self.config.beta
        return int(mpmath.ceil(mpmath.log(mpmath.mpf(ab.denominator) / ab.numerator) / mpmath.log(self.lam))) + 2

    def check_invariants(self, eps=EPSILON) -> list[str]:
        """Every violated transcript invariant, as human-readable strings."""
        cfg = self.config
        problems = []
        prev = self.B0
        guarantee = 1 / (6 * self.lam) - eps
        last_k = None
        for r in self.rounds:
            if r.B_prev != prev:
                problems.append(f"round {r.index}: B_prev is not the previous B")
            if r.A.radius != cfg.alpha * r.B_prev.radius:
                problems.append(f"round {r.index}: radius(A) != alpha * radius(B_prev)")
            if r.B.radius != cfg.beta * r.A.radius:
                problems.append(f"round {r.index}: radius(B) != beta * radius(A)")
            if not r.B_prev.contains(r.A):
                problems.append(f"round {r.index}: A not inside B_prev")
            if not r.A.contains(r.B):
                problems.append(f"round {r.index}: B not inside A")
            if r.phase == "strategy":
                if last_k is not None and r.k < last_k:
                    problems.append(f"round {r.index}: k decreased")
                last_k = r.k
                if not (r.diameter >= (1 - eps) / self.lam and r.diameter < 1):
                    problems.append(f"round {r.index}: diameter {mpmath.nstr(r.diameter, 10)} outside [1/lambda, 1)")
                if r.diameter_next < 1:
                    problems.append(f"round {r.index}: k is not maximal")
                if r.dist0_value < guarantee:
                    problems.append(f"round {r.index}: dist0 {mpmath.nstr(r.dist0_value, 10)} below 1/(6 lambda)")
            prev = r.B
        return problems


# ---------------------------------------------------------------------------
# engine


class SegmentGame:
    """Exact orbit bookkeeping for a segment x + t w under powers of T."""

    def __init__(self, cfg: GameConfig, lattice_box: int = 1):
        self.cfg = cfg
        self.sd = cfg.sd
        self.T = cfg.matrix
        self.lattice_box = lattice_box
        dd = dominating_data(cfg.sd, cfg.direction)
        self.lam = dd.lam
        self.k_I = dd.k_I
        self._X = [list(cfg.base_point)]
        self._W = [list(cfg.direction)]
        self._normW = []

    def _extend(self, k: int):
        while len(self._X) <= k:
            self._X.append(self.T.apply(self._X[-1]))
            self._W.append(self.T.apply(self._W[-1]))

    def norm_w(self, k: int):
        while len(self._normW) <= k:
            j = len(self._normW)
            self._extend(j)
            self._normW.append(sup_norm(self.sd, self._W[j]))
        return self._normW[k]

    def diameter(self, ball: Ball, k: int):
        with self.sd.workprec():
            return 2 * mpmath.mpf(ball.radius.numerator) / ball.radius.denominator * self.norm_w(k)

    def k_for(self, ball: Ball) -> int:
        """Largest k (searched from k_I upward) with diam(T^k ball) < 1."""
        k = self.k_I
        while self.diameter(ball, k + 1) < 1:
            k += 1
        return k

    def image(self, ball: Ball, k: int):
        self._extend(k)
        x, w = self._X[k], self._W[k]
        lo, hi = ball.center - ball.radius, ball.center + ball.radius
        return [a + lo * b for a, b in zip(x, w)], [a + hi * b for a, b in zip(x, w)]

    def point(self, t: Fraction) -> list[Fraction]:
        return [a + t * b for a, b in zip(self.cfg.base_point, self.cfg.direction)]

    def dist0_of(self, ball: Ball, k: int) -> Dist0Result:
        p0, p1 = self.image(ball, k)
        return segment_dist0(p0, p1, self.sd, self.lattice_box)


def alice_strategy(game: SegmentGame, B: Ball, eps=EPSILON):
    """Choose the third of B whose k-th image lies farthest from the lattice.

    Returns (A, k, chosen_third, values) with chosen_third in {1, 2, 3}; ties go
    to the smaller index.  Raises GuaranteeViolated when even the best third is
    closer than 1/(6 lambda) - eps.
    """
    k = game.k_for(B)
    thirds = B.thirds()
    values = [game.dist0_of(third, k).value for third in thirds]
    idx = max(range(3), key=lambda i: (values[i], -i))
    if values[idx] < 1 / (6 * game.lam) - eps:
        raise GuaranteeViolated(
            f"no third reaches 1/(6 lambda) = {mpmath.nstr(1 / (6 * game.lam), 12)}; values "
            + ", ".join(mpmath.nstr(v, 12) for v in values)
        )
    return thirds[idx], k, idx + 1, values


# ---------------------------------------------------------------------------
# Bob


def _allowed(A: Ball, radius: Fraction):
    slack = A.radius - radius
    return A.center - slack, A.center + slack


class BobStrategy:
    name = "abstract"

    def choose(self, game: SegmentGame, A: Ball, radius: Fraction, rng: random.Random) -> Fraction:
        raise NotImplementedError


class RandomBob(BobStrategy):
    """Uniform center on a dyadic grid of the admissible interval."""

    name = "random"

    def choose(self, game, A, radius, rng):
        lo, hi = _allowed(A, radius)
        j = rng.randrange(2**32 + 1)
        return lo + (hi - lo) * Fraction(j, 2**32)


class StationaryBob(BobStrategy):
    name = "stationary"

    def choose(self, game, A, radius, rng):
        return A.center


class ZeroSeekingBob(BobStrategy):
    """Adversary: centers its ball where the image of A comes closest to the lattice.

    The image is taken at the k Alice will use next, so the lattice point lands
    in the middle of her next trisection whenever the admissible interval allows.
    """

    name = "adversarial"

    def choose(self, game, A, radius, rng):
        k = game.k_for(Ball(A.center, radius))
        res = game.dist0_of(A, k)
        t = mp_to_fraction(res.t)
        target = A.center - A.radius + 2 * A.radius * t
        grid = radius / 2**20
        target = round(target / grid) * grid
        lo, hi = _allowed(A, radius)
        return min(max(target, lo), hi)


BOBS = {"random": RandomBob, "stationary": StationaryBob, "adversarial": ZeroSeekingBob}


def make_bob(name: str) -> BobStrategy:
    try:
        return BOBS[name]()
    except KeyError:
        raise ValueError(f"unknown Bob strategy {name!r}; choose from {sorted(BOBS)}") from None


# ---------------------------------------------------------------------------
# playing


def play_game(cfg: GameConfig, bob: BobStrategy, rounds: int, seed: int = 0,
              lattice_box: int = 1, max_preprocessing: int = 10_000) -> GameTranscript:
    """Play ``rounds`` strategy rounds after the preprocessing shrink."""
    if rounds < 0:
        raise ValueError("rounds must be >= 0")
    rng = random.Random(seed)
    game = SegmentGame(cfg, lattice_box)
    B = Ball(Fraction(0), cfg.radius)
    tr = GameTranscript(cfg, bob.name, seed, game.lam, game.k_I, B, 0)
    index = 0

    def bob_move(A: Ball) -> Ball:
        r = cfg.beta * A.radius
        return Ball(bob.choose(game, A, r, rng), r)

    if rounds > 0:
        while game.diameter(B, game.k_I) >= 1 / game.lam:
            if tr.preprocessing_rounds >= max_preprocessing:
                raise RuntimeError("preprocessing did not shrink the initial ball")
            A = B.thirds()[1]
            newB = bob_move(A)
            index += 1
            tr.rounds.append(RoundRecord(index, "preprocess", B, A, newB, None, 2, None, (), None, None))
            tr.preprocessing_rounds += 1
            B = newB

    for _ in range(rounds):
        A, k, chosen, values = alice_strategy(game, B)
        newB = bob_move(A)
        index += 1
        tr.rounds.append(
            RoundRecord(
                index, "strategy", B, A, newB, k, chosen, values[chosen - 1], tuple(values),
                game.diameter(B, k), game.diameter(B, k + 1),
            )
        )
        B = newB

    tr.final_param = B.center
    tr.final_radius = B.radius
    tr.final_point = tuple(game.point(B.center))
    return tr


def verify_nondense(z: Sequence, T: IntMatrix, sd: SpectralDecomposition, horizon: int,
                    lattice_box: int = 1):
    """min over 0 <= k <= horizon of dist0(T^k z), with the orbit computed exactly.

    Returns (min_distance, argmin_step).  Inputs given as floats or mpf are
    converted to the binary rationals they represent.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    x = _frac_vec(z)
    best = None
    for k in range(horizon + 1):
        x = [a - _round_half_up(a) for a in x]
        val = segment_dist0(x, x, sd, lattice_box).value
        if best is None or val < best[0]:
            best = (val, k)
        x = T.apply(x)
    return best
