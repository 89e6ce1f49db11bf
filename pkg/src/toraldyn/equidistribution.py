"""Birkhoff averages, the straightened extension of S and its decay estimates.

The compact group K is stored blockwise: a sign for each real eigenline and a
rotation angle for each conjugate-pair plane.  Every element we ever touch is
``k_S^n k_0``, so products are exact sign flips and angle additions.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
import numpy as np

from .errors import QuadratureUnstable
from .exact_linalg import IntMatrix, char_poly
from .spectral import (
    CONJUGATE_PAIR,
    SpectralDecomposition,
    decompose,
    dominating_data,
    mp_to_fraction,
    mpvec,
    sup_norm,
)


def _two_pi():
    return 2 * mpmath.pi


def _reduce(v) -> list:
    """Representative in [-1/2, 1/2)^d."""
    return [x - mpmath.floor(x + mpmath.mpf(0.5)) for x in v]


def torus_distance(a, b) -> mpmath.mpf:
    """Sup-norm distance on R^d / Z^d in standard coordinates."""
    return max(abs(x) for x in _reduce([x - y for x, y in zip(a, b)]))


# ---------------------------------------------------------------------------
# straightening


@dataclass(frozen=True)
class StraightenedSystem:
    S: IntMatrix
    sd: SpectralDecomposition
    k_S: tuple
    k_S_matrix: mpmath.matrix
    S_pos: mpmath.matrix
    direction: tuple | None
    w_lambda: tuple | None
    lam: mpmath.mpf | None
    eta: mpmath.mpf | None
    w_input: tuple | None = None

    @property
    def dim(self) -> int:
        return self.S.dim

    def identity(self) -> tuple:
        return tuple(mpmath.mpf(0) if b.kind == CONJUGATE_PAIR else 1 for b in self.sd.blocks)

    def k_mul(self, k1, k2) -> tuple:
        out = []
        for b, a, c in zip(self.sd.blocks, k1, k2):
            out.append(mpmath.fmod(a + c, _two_pi()) if b.kind == CONJUGATE_PAIR else a * c)
        return tuple(out)

    def k_inv(self, k) -> tuple:
        return tuple(
            mpmath.fmod(_two_pi() - a, _two_pi()) if b.kind == CONJUGATE_PAIR else a
            for b, a in zip(self.sd.blocks, k)
        )

    def k_apply(self, k, v) -> list:
        """The linear map of k applied to a vector in standard coordinates."""
        sd = self.sd
        with sd.workprec():
            c = sd.coordinates(v)
            out = list(c)
            for b, a in zip(sd.blocks, k):
                if b.kind == CONJUGATE_PAIR:
                    i0, i1 = b.columns
                    cs, sn = mpmath.cos(a), mpmath.sin(a)
                    out[i0] = cs * c[i0] - sn * c[i1]
                    out[i1] = sn * c[i0] + cs * c[i1]
                else:
                    (i0,) = b.columns
                    out[i0] = a * c[i0]
            return sd.from_coordinates(out)

    def s_pos_apply(self, v) -> list:
        with self.sd.workprec():
            v = mpvec(v)
            m = self.S_pos
            return [mpmath.fsum(m[i, j] * v[j] for j in range(self.dim)) for i in range(self.dim)]

    def invariant_residuals(self) -> dict:
        """Sizes of the defects in the defining identities (all should be tiny)."""
        sd = self.sd
        with sd.workprec():
            s = mpmath.matrix(self.S.tolist())
            comm = mpmath.mnorm(self.k_S_matrix * s - s * self.k_S_matrix, 1)
            ev = mpmath.eig(self.S_pos, left=False, right=False)
            imag = max(abs(mpmath.im(z)) for z in ev)
            min_real = min(mpmath.re(z) for z in ev)
            out = {"commutator": comm, "eig_imag": imag, "eig_min_real": min_real}
            if self.w_lambda is not None:
                img = self.s_pos_apply(self.w_lambda)
                out["eigenvector"] = max(abs(a - self.lam * b) for a, b in zip(img, self.w_lambda))
            return out


def straighten(S: IntMatrix, sd: SpectralDecomposition, w: Sequence | None = None) -> StraightenedSystem:
    """Build k_S and S_pos = k_S S; the dominating data is filled in when w is given."""
    d = S.dim
    with sd.workprec():
        k = []
        for b in sd.blocks:
            if b.kind == CONJUGATE_PAIR:
                # S acts on the plane as modulus * R(-theta); k_S rotates by +theta
                r = sd.restricted_matrix(b.index)
                k.append(mpmath.fmod(mpmath.atan2(-r[1, 0], r[0, 0]) + _two_pi(), _two_pi()))
            else:
                k.append(-1 if b.eigenvalue.real < 0 else 1)
        k = tuple(k)
        shell = StraightenedSystem(S, sd, k, None, None, None, None, None, None)
        kmat = mpmath.matrix(d, d)
        for j in range(d):
            col = shell.k_apply(k, [int(i == j) for i in range(d)])
            for i in range(d):
                kmat[i, j] = col[i]
        s_pos = kmat * mpmath.matrix(S.tolist())
        direction = w_lambda = lam = eta = None
        if w is not None:
            dd = dominating_data(sd, w)
            direction, w_lambda, lam, eta = dd.direction_w, dd.w_lambda, dd.lam, dd.eta
    w_input = None if w is None else tuple(w)
    return StraightenedSystem(S, sd, k, kmat, s_pos, direction, w_lambda, lam, eta, w_input)


# ---------------------------------------------------------------------------
# the extended system


@dataclass(frozen=True)
class ExtendedPoint:
    """(k, x) in K x R^d; as a point of X it stands for the coset (k, x) Gamma."""

    k: tuple
    x: tuple


def group_mul(sys: StraightenedSystem, p: ExtendedPoint, q: ExtendedPoint) -> ExtendedPoint:
    """(k1, x)(k2, y) = (k1 k2, x + k1 y) in K semidirect R^d."""
    y = sys.k_apply(p.k, q.x)
    with sys.sd.workprec():
        return ExtendedPoint(sys.k_mul(p.k, q.k), tuple(a + b for a, b in zip(p.x, y)))


def reduce_point(sys: StraightenedSystem, p: ExtendedPoint) -> ExtendedPoint:
    """Canonical representative of (k, x) Gamma: k^-1 x lies in [-1/2, 1/2)^d.

    Right multiplication by (1, n) moves x by k n, so x is reduced modulo k Z^d.
    """
    with sys.sd.workprec():
        y = sys.k_apply(sys.k_inv(p.k), p.x)
        shift = [mpmath.floor(a + mpmath.mpf(0.5)) for a in y]
        if any(shift):
            ks = sys.k_apply(p.k, shift)
            return ExtendedPoint(p.k, tuple(a - b for a, b in zip(p.x, ks)))
        return p


def extended_step(sys: StraightenedSystem, p: ExtendedPoint) -> ExtendedPoint:
    """S~ (k, x) Gamma = (k_S k, S_pos x) Gamma."""
    q = ExtendedPoint(sys.k_mul(sys.k_S, p.k), tuple(sys.s_pos_apply(p.x)))
    return reduce_point(sys, q)


def factor_map(sys: StraightenedSystem, p: ExtendedPoint) -> list:
    """Theta(k, x) = k^-1 x mod Z^d, as a representative in [-1/2, 1/2)^d."""
    with sys.sd.workprec():
        return _reduce(sys.k_apply(sys.k_inv(p.k), p.x))


def random_extended_point(sys: StraightenedSystem, rng: random.Random) -> ExtendedPoint:
    with sys.sd.workprec():
        k = []
        for b in sys.sd.blocks:
            if b.kind == CONJUGATE_PAIR:
                k.append(mpmath.mpf(rng.getrandbits(64)) / 2**64 * _two_pi())
            else:
                k.append(rng.choice((-1, 1)))
        x = tuple(mpmath.mpf(rng.getrandbits(64)) / 2**64 - mpmath.mpf(0.5) for _ in range(sys.dim))
        return reduce_point(sys, ExtendedPoint(tuple(k), x))


def conjugacy_defect(S: IntMatrix, samples: int = 100, n_max: int = 50, seed: int = 0,
                     precision_bits: int = 128) -> mpmath.mpf:
    """sup over random extended points p and n <= n_max of dist(Theta(S~^n p), S^n Theta(p)).

    Both sides lose about n log2(lambda) bits, so the decomposition is redone with
    that many guard bits on top of the requested precision.
    """
    lam = max(abs(z) for z in np.roots([float(c) for c in reversed(char_poly(S).coeffs)]))
    guard = int(math.ceil(n_max * math.log2(max(lam, 1.0)))) + 64
    sd = decompose(S, precision_bits + guard)
    sys = straighten(S, sd)
    rng = random.Random(seed)
    worst = mpmath.mpf(0)
    with sd.workprec():
        for _ in range(samples):
            p = random_extended_point(sys, rng)
            y = factor_map(sys, p)
            for _n in range(n_max):
                p = extended_step(sys, p)
                y = _reduce(S.apply(y))
                worst = max(worst, torus_distance(factor_map(sys, p), y))
    return worst


# ---------------------------------------------------------------------------
# Birkhoff averages


@dataclass(frozen=True)
class BirkhoffReport:
    point: tuple
    N: int
    cutoff: int
    character_averages: dict
    max_deviation: float

    @property
    def threshold(self) -> float:
        """3/sqrt(N): deviations below this are consistent with equidistribution."""
        return 3 / math.sqrt(self.N)

    @property
    def empirical_verdict(self) -> str:
        if self.max_deviation <= self.threshold:
            return "consistent with equidistribution (empirical)"
        return "not consistent with equidistribution at this N (empirical)"


def _as_fraction(v) -> Fraction:
    return v if isinstance(v, Fraction) else mp_to_fraction(mpmath.mpf(v))


def _common_denominator(x: Sequence[Fraction]) -> tuple[list[int], int]:
    q = math.lcm(*(f.denominator for f in x))
    return [f.numerator * (q // f.denominator) % q for f in x], q


def exact_orbit(T: IntMatrix, x0: Sequence, N: int) -> np.ndarray:
    """T^n x0 mod 1 for n < N as floats, iterating exactly on residues mod q.

    Floats and mpf inputs are taken as the binary rationals they represent.
    """
    x = [_as_fraction(v) for v in x0]
    res, q = _common_denominator(x)
    rows = T.rows
    out = np.empty((N, len(res)))
    for n in range(N):
        out[n] = [r / q for r in res]
        res = [sum(a * b for a, b in zip(row, res)) % q for row in rows]
    return out


def frequencies(d: int, cutoff: int, nonzero: bool = True) -> list[tuple]:
    ms = itertools.product(range(-cutoff, cutoff + 1), repeat=d)
    return [m for m in ms if not nonzero or any(m)]


def birkhoff_report(T: IntMatrix, x0: Sequence, N: int, M: int) -> BirkhoffReport:
    """Averages of exp(2 pi i <m, T^n x0>) over n < N for 0 < |m|_inf <= M."""
    if N < 1 or M < 1:
        raise ValueError("N and M must be positive")
    orbit = exact_orbit(T, x0, N)
    ms = frequencies(T.dim, M)
    phases = orbit @ np.array(ms, dtype=float).T
    avgs = np.exp(2j * np.pi * phases).mean(axis=0)
    table = {tuple([0] * T.dim): complex(1.0)}
    table.update({m: complex(a) for m, a in zip(ms, avgs)})
    return BirkhoffReport(tuple(x0), N, M, table, float(np.max(np.abs(avgs))))


def foliation_check(T: IntMatrix, x0: Sequence, v: Sequence, Ns: Sequence[int], M: int = 3) -> list[float]:
    """max_m |avg(x0) - avg(x0 + v)| for each N in Ns."""
    shifted = [_as_fraction(a) + _as_fraction(b) for a, b in zip(x0, v)]
    out = []
    for n in Ns:
        a = birkhoff_report(T, x0, n, M).character_averages
        b = birkhoff_report(T, shifted, n, M).character_averages
        out.append(max(abs(a[m] - b[m]) for m in a))
    return out


# ---------------------------------------------------------------------------
# decay estimates


def _require_direction(sys: StraightenedSystem):
    if sys.w_lambda is None:
        raise ValueError("the straightened system was built without a direction w")


def _coefficient_along(sys: StraightenedSystem, v_a) -> mpmath.mpf:
    """c with v_a = c w_lambda; raises ValueError when v_a is not on that line."""
    with sys.sd.workprec():
        v = mpvec(v_a)
        w = list(sys.w_lambda)
        j = max(range(sys.dim), key=lambda i: abs(w[i]))
        c = v[j] / w[j]
        if c == 0:
            raise ValueError("v_a must be nonzero")
        off = max(abs(a - c * b) for a, b in zip(v, w))
        if off > mpmath.mpf(2) ** (-sys.sd.precision_bits // 2) * (1 + abs(c)):
            raise ValueError("v_a does not lie on the line spanned by w_lambda")
        return c


def tn_sequence(sys: StraightenedSystem, v_a, n_max: int) -> list:
    """t_n = c lambda^-n for n = 0..n_max, where v_a = c w_lambda."""
    _require_direction(sys)
    c = _coefficient_along(sys, v_a)
    with sys.sd.workprec():
        return [c / sys.lam**n for n in range(n_max + 1)]


def decay_residuals(sys: StraightenedSystem, v_a=None, n_max: int = 40) -> list:
    """||S_pos^n t_n w - v_a|| for n = 0..n_max (eigen-aligned sup norm)."""
    _require_direction(sys)
    v_a = sys.w_lambda if v_a is None else v_a
    ts = tn_sequence(sys, v_a, n_max)
    out = []
    with sys.sd.workprec():
        v_a = mpvec(v_a)
        u = list(sys.direction)
        for n in range(n_max + 1):
            out.append(sup_norm(sys.sd, [ts[n] * a - b for a, b in zip(u, v_a)]))
            u = sys.s_pos_apply(u)
    return out


def loglinear_slope(xs, ys) -> float:
    """Least-squares slope of log(y) against x."""
    return float(np.polyfit(np.asarray(xs, dtype=float), np.log(np.asarray(ys, dtype=float)), 1)[0])


# ---------------------------------------------------------------------------
# Lipschitz test functions on the torus (pulled back to X through Theta)


@dataclass(frozen=True)
class Observable:
    name: str
    lipschitz: float
    fn: Callable[[np.ndarray], np.ndarray]

    def __call__(self, y: np.ndarray) -> np.ndarray:
        return self.fn(y)


def _character(m: tuple, kind: str) -> Observable:
    mv = np.array(m, dtype=float)
    trig = np.cos if kind == "cos" else np.sin
    name = f"{kind}:" + ",".join(str(a) for a in m)
    return Observable(name, 2 * math.pi * float(np.linalg.norm(mv)), lambda y: trig(2 * np.pi * (y @ mv)))


def _bump_lipschitz(r: float) -> float:
    # g(x) = exp(1 - 1/(1 - x^2)) with x = rho/r and |g'(x)| = 2x g / (1 - x^2)^2;
    # the maximum sits at the critical point of log|g'| in u = x^2
    crit = mpmath.findroot(lambda u: 1 / (2 * u) - 1 / (1 - u) ** 2 + 2 / (1 - u), 0.3)
    x = mpmath.sqrt(crit)
    return float(2 * x * mpmath.exp(1 - 1 / (1 - crit)) / (1 - crit) ** 2 / r)


def _bump(r: float = 0.25) -> Observable:
    def fn(y):
        z = y - np.floor(y + 0.5)
        s = np.sum(z * z, axis=-1) / (r * r)
        out = np.zeros_like(s)
        inside = s < 1
        out[inside] = np.exp(1 - 1 / (1 - s[inside]))
        return out

    return Observable("bump", _bump_lipschitz(r), fn)


def observables(d: int) -> dict[str, Observable]:
    """cos/sin of characters with |m|_inf <= 2 (one of each +-m pair) and a smooth bump at 0."""
    out = {}
    for m in frequencies(d, 2):
        if m > tuple(-a for a in m):
            for kind in ("cos", "sin"):
                ob = _character(m, kind)
                out[ob.name] = ob
    out["bump"] = _bump()
    return out


def get_observable(d: int, name: str) -> Observable:
    table = observables(d)
    if name not in table:
        raise ValueError(f"unknown test function {name!r}; available: {', '.join(sorted(table))}")
    return table[name]


# ---------------------------------------------------------------------------
# correlations of f_n(phi) = g(S~^n (1, w_{phi + t_n}) x) - g(S~^n (1, w_phi) x)


@dataclass(frozen=True)
class CorrelationResult:
    matrix: np.ndarray
    n_values: tuple
    points: int
    disagreement: float

    def max_by_gap(self, gaps) -> list[float]:
        c = np.abs(self.matrix)
        n = len(self.n_values)
        return [float(max(c[i, i + g] for i in range(n - g))) for g in gaps]


def _as_extended(sys: StraightenedSystem, x) -> ExtendedPoint:
    if isinstance(x, ExtendedPoint):
        return x
    with sys.sd.workprec():
        return reduce_point(sys, ExtendedPoint(sys.identity(), tuple(mpvec(x))))


def segment_images(sys: StraightenedSystem, x, n_values) -> tuple[np.ndarray, np.ndarray]:
    """base_n = Theta(S~^n x) and dir_n with Theta(S~^n (1, w_phi) x) = base_n + phi dir_n."""
    _require_direction(sys)
    p = _as_extended(sys, x)
    u = list(sys.direction)
    bases, dirs = [], []
    wanted = set(n_values)
    with sys.sd.workprec():
        for n in range(max(n_values) + 1):
            if n in wanted:
                bases.append([float(a) for a in factor_map(sys, p)])
                dirs.append([float(a) for a in sys.k_apply(sys.k_inv(p.k), u)])
            p = extended_step(sys, p)
            u = sys.s_pos_apply(u)
    return np.array(bases), np.array(dirs)


def _midpoint_gram(values: Callable[[np.ndarray], np.ndarray], points: int, chunk: int = 1 << 16) -> np.ndarray:
    acc = None
    for start in range(0, points, chunk):
        j = np.arange(start, min(points, start + chunk), dtype=float)
        phi = -0.5 + (j + 0.5) / points
        f = values(phi)
        g = f @ f.T
        acc = g if acc is None else acc + g
    return acc / points


def correlation_matrix(sys: StraightenedSystem, x, test_fn: Observable | str, n_max: int,
                       quadrature_points: int = 4096, tol: float = 1e-6, max_points: int = 1 << 24,
                       v_a=None) -> CorrelationResult:
    """c_nm = int_{-1/2}^{1/2} f_n(phi) f_m(phi) dphi for 1 <= n, m <= n_max.

    Composite midpoint rule; the point count doubles from ``quadrature_points``
    until two successive counts agree to ``tol``, and the Richardson-extrapolated
    matrix is returned.
    """
    if quadrature_points < 1024:
        raise ValueError("quadrature_points must be at least 1024")
    if isinstance(test_fn, str):
        test_fn = get_observable(sys.dim, test_fn)
    n_values = tuple(range(1, n_max + 1))
    v_a = sys.w_lambda if v_a is None else v_a
    ts = tn_sequence(sys, v_a, n_max)
    t = np.array([float(ts[n]) for n in n_values])
    base, dirs = segment_images(sys, x, n_values)

    def values(phi):
        moved = base[:, None, :] + phi[None, :, None] * dirs[:, None, :]
        shifted = moved + (t[:, None] * dirs)[:, None, :]
        return test_fn(shifted) - test_fn(moved)

    n = quadrature_points
    coarse = _midpoint_gram(values, n)
    while True:
        fine = _midpoint_gram(values, 2 * n)
        gap = float(np.max(np.abs(fine - coarse)))
        if gap < tol:
            return CorrelationResult((4 * fine - coarse) / 3, n_values, 2 * n, gap)
        n *= 2
        if 2 * n > max_points:
            raise QuadratureUnstable(f"midpoint sums still differ by {gap:.3g} at {n} points")
        coarse = fine


# ---------------------------------------------------------------------------
# Cesaro averages of f_n at sampled phi


@dataclass(frozen=True)
class CesaroSample:
    phi: float
    averages: tuple

    @property
    def decreasing(self) -> bool:
        return all(a > b for a, b in zip(self.averages, self.averages[1:]))


def _normalized_shift(sys: StraightenedSystem, c, N: int) -> np.ndarray:
    """c lambda^-n S^n w~ for n < N, iterated blockwise in eigen coordinates."""
    sd = sys.sd
    with sd.workprec():
        coords = sd.coordinates(sys.direction)
        blocks = [(b.columns, sd.restricted_matrix(b.index) / sys.lam) for b in sd.blocks]
        out = np.empty((N, sys.dim))
        for n in range(N):
            out[n] = [float(c * a) for a in sd.from_coordinates(coords)]
            nxt = list(coords)
            for cols, r in blocks:
                for i, ci in enumerate(cols):
                    nxt[ci] = mpmath.fsum(r[i, j] * coords[cj] for j, cj in enumerate(cols))
            coords = nxt
    return out


def cesaro_check(sys: StraightenedSystem, x0: Sequence, test_fn: Observable | str,
                 Ns: Sequence[int] = (100, 1000, 10000), samples: int = 64, seed: int = 0,
                 v_a=None) -> list[CesaroSample]:
    """|1/N sum_{n<N} f_n(phi)| at seeded phi samples, using exact orbits.

    Points x0 + phi w~ are taken rational (x0 and the input direction must be
    rational), so S^n of them is computed without rounding; only the bounded
    shift t_n S^n w~ is evaluated in floating point.
    """
    _require_direction(sys)
    if isinstance(test_fn, str):
        test_fn = get_observable(sys.dim, test_fn)
    if sys.w_input is None:
        raise ValueError("the straightened system was built without a direction w")
    w_raw = [Fraction(a) for a in sys.w_input]
    x0 = [Fraction(a) for a in x0]
    v_a = sys.w_lambda if v_a is None else v_a
    c = _coefficient_along(sys, v_a)
    N = max(Ns)
    shift = _normalized_shift(sys, c, N)
    with sys.sd.workprec():
        wnorm = sup_norm(sys.sd, w_raw)
    rng = random.Random(seed)
    out = []
    for _ in range(samples):
        u = Fraction(rng.getrandbits(40), 2**40) - Fraction(1, 2)
        u = mp_to_fraction(mpmath.mpf(u.numerator) / u.denominator / wnorm)
        start = [a + u * b for a, b in zip(x0, w_raw)]
        orbit = exact_orbit(sys.S, start, N)
        f = test_fn(orbit + shift) - test_fn(orbit)
        sums = np.cumsum(f)
        out.append(CesaroSample(float(u * mp_to_fraction(wnorm)), tuple(abs(float(sums[n - 1])) / n for n in Ns)))
    return out
