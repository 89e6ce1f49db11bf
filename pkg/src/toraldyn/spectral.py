"""High-precision spectral data of toral automorphisms.

A :class:`SpectralDecomposition` splits R^d into real generalized eigenspaces
(eigenlines, and the real planes of conjugate pairs), and carries the norm
used throughout the package: coordinates are taken in the eigenbasis, each
block is measured with its own Euclidean norm (so a matrix acts on a block as
modulus times a rotation and block norms grow exactly by the modulus), and the
norm of a vector is the maximum over blocks, scaled so that every nonzero
integer vector has norm exactly ``LATTICE_MIN_NORM`` at its shortest.  With
that scaling a ball of radius 2 embeds isometrically into the torus.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

from .errors import (
    AmbiguousDominance,
    DefectiveMatrix,
    InsideWeakStable,
    NotUnimodular,
    PrecisionExhausted,
    UnresolvedModulus,
)
from .exact_linalg import IntMatrix, RatPolynomial, char_poly, poly_gcd
from .roots import CertifiedRoot, certified_roots

REAL_POSITIVE = "real_positive"
REAL_NEGATIVE = "real_negative"
CONJUGATE_PAIR = "conjugate_pair"

LATTICE_MIN_NORM = 8


def to_mpf(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    if isinstance(x, (mpmath.mpf, mpmath.mpc)):
        return x
    if isinstance(x, int):
        return mpmath.mpf(x)
    return mpmath.mpf(x)


def mpvec(v) -> list:
    return [to_mpf(x) for x in v]


def mp_to_fraction(x) -> Fraction:
    """Exact rational value of a binary mpf."""
    man, exp = mpmath.mpf(x).man_exp
    return Fraction(int(man)) * Fraction(2) ** int(exp)


@dataclass(frozen=True)
class GeneralizedEigenspace:
    index: int
    kind: str
    eigenvalue: mpmath.mpc
    radius: mpmath.mpf
    modulus: mpmath.mpf
    basis: tuple
    columns: tuple

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def modulus_interval(self):
        return self.modulus - self.radius, self.modulus + self.radius


@dataclass(frozen=True)
class SpectralDecomposition:
    matrix: IntMatrix
    precision_bits: int
    char_poly: RatPolynomial
    eigenvalues: tuple
    blocks: tuple
    basis: mpmath.matrix
    basis_change: mpmath.matrix
    scale: mpmath.mpf
    condition_number: mpmath.mpf
    central_certified: frozenset = field(default_factory=frozenset)

    @property
    def dim(self) -> int:
        return self.matrix.dim

    @property
    def work_bits(self) -> int:
        return 2 * self.precision_bits

    def workprec(self):
        return mpmath.workprec(self.work_bits)

    def coordinates(self, v) -> list:
        """Eigen-aligned coordinates of a vector (basis_change applied)."""
        with self.workprec():
            v = mpvec(v)
            p = self.basis_change
            return [mpmath.fsum(p[i, j] * v[j] for j in range(self.dim)) for i in range(self.dim)]

    def from_coordinates(self, c) -> list:
        with self.workprec():
            e = self.basis
            return [mpmath.fsum(e[i, j] * c[j] for j in range(self.dim)) for i in range(self.dim)]

    def block_norms(self, coords) -> list:
        """Unscaled Euclidean norm of each block of a coordinate vector."""
        with self.workprec():
            return [mpmath.sqrt(mpmath.fsum(coords[c] ** 2 for c in b.columns)) for b in self.blocks]

    def norm_of_coordinates(self, coords):
        with self.workprec():
            return self.scale * max(self.block_norms(coords))

    def block_component(self, v, index: int) -> list:
        """Projection of v onto one generalized eigenspace along the others."""
        c = self.coordinates(v)
        keep = set(self.blocks[index].columns)
        return self.from_coordinates([c[j] if j in keep else 0 for j in range(self.dim)])

    def restricted_matrix(self, index: int) -> mpmath.matrix:
        """The matrix restricted to one block, written in that block's basis."""
        b = self.blocks[index]
        with self.workprec():
            m = mpmath.matrix(self.matrix.tolist())
            out = mpmath.matrix(b.dim, b.dim)
            for j, col in enumerate(b.columns):
                image = m * self.basis[:, col]
                c = self.basis_change * image
                for i, row in enumerate(b.columns):
                    out[i, j] = c[row]
            return out


def sup_norm(sd: SpectralDecomposition, v) -> mpmath.mpf:
    """Eigen-aligned supremum norm of v, in the scaled normalization."""
    return sd.norm_of_coordinates(sd.coordinates(v))


def _eigenvector(m: mpmath.matrix, nu, d: int, tol):
    """Inverse iteration with a tiny shift; returns a unit vector."""
    shift = nu + (abs(nu) + 1) * tol * mpmath.mpf("1e-3")
    a = m - shift * mpmath.eye(d)
    x = mpmath.matrix([mpmath.mpf(1) + mpmath.mpf(k) / (3 * d + 7) for k in range(d)])
    for _ in range(3):
        x = mpmath.lu_solve(a, x)
        x = x / mpmath.norm(x)
    return x


def _real_basis_for_pair(v):
    """Real basis (a, b) of the plane of a complex eigenvector, with a orthogonal to b and |a| = 1."""
    a = [z.real for z in v]
    b = [z.imag for z in v]
    aa = mpmath.fsum(x * x for x in a)
    bb = mpmath.fsum(x * x for x in b)
    ab = mpmath.fsum(x * y for x, y in zip(a, b))
    theta = mpmath.atan2(-2 * ab, aa - bb) / 2
    c, s = mpmath.cos(theta), mpmath.sin(theta)
    a2 = [c * x - s * y for x, y in zip(a, b)]
    b2 = [s * x + c * y for x, y in zip(a, b)]
    na = mpmath.sqrt(mpmath.fsum(x * x for x in a2))
    return [x / na for x in a2], [y / na for y in b2]


def _lattice_minimum(basis_change: mpmath.matrix, basis: mpmath.matrix, blocks, d: int) -> mpmath.mpf:
    """Shortest nonzero integer vector in the unscaled block-max norm."""
    pf = np.array([[float(basis_change[i, j]) for j in range(d)] for i in range(d)])
    ef = np.array([[float(basis[i, j]) for j in range(d)] for i in range(d)])
    cols = [list(b.columns) for b in blocks]

    def norms(vs):
        c = vs @ pf.T
        return np.max(np.stack([np.linalg.norm(c[:, cs], axis=1) for cs in cols]), axis=0)

    best = float(np.min(norms(np.eye(d))))
    rowsum = float(np.max(np.sum(np.abs(ef), axis=1)))
    radius = int(math.floor(rowsum * best * (1 + 1e-9)))
    best_vec = None
    if radius >= 1:
        if (2 * radius + 1) ** d > 4_000_000:
            raise PrecisionExhausted("lattice enumeration box too large", stage="norm normalization")
        rng = np.arange(-radius, radius + 1)
        grid = np.array(list(itertools.product(rng, repeat=d)), dtype=float)
        grid = grid[np.any(grid != 0, axis=1)]
        vals = norms(grid)
        k = int(np.argmin(vals))
        if vals[k] < best:
            best_vec = [int(x) for x in grid[k]]
    if best_vec is None:
        k = int(np.argmin(norms(np.eye(d))))
        best_vec = [int(i == k) for i in range(d)]
    c = basis_change * mpmath.matrix(best_vec)
    return max(mpmath.sqrt(mpmath.fsum(c[j] ** 2 for j in b.columns)) for b in blocks)


def decompose(m: IntMatrix, precision_bits: int = 128) -> SpectralDecomposition:
    """Eigenvalues with certified radii and real generalized eigenspaces of m."""
    if precision_bits < 64:
        raise ValueError("precision_bits must be >= 64")
    if not m.is_unimodular():
        raise NotUnimodular(f"determinant {m.det()} is not +-1")
    d = m.dim
    poly = char_poly(m)
    work = 2 * precision_bits
    roots = certified_roots(poly.coeffs, work)
    limit = mpmath.mpf(2) ** (-(precision_bits // 2))
    if any(r.radius >= limit for r in roots):
        raise PrecisionExhausted("eigenvalue radii exceed 2^(-precision/2)", stage="decompose")

    with mpmath.workprec(work):
        mm = mpmath.matrix(m.tolist())
        tol = mpmath.mpf(2) ** (-precision_bits)
        used = set()
        raw_blocks = []
        for i, r in enumerate(roots):
            if i in used:
                continue
            used.add(i)
            z = r.value
            if abs(z.imag) <= r.radius:
                nu = mpmath.mpf(z.real)
                v = _eigenvector(mm, nu, d, tol)
                k = max(range(d), key=lambda j: abs(v[j]))
                v = [(v[j] / v[k]).real for j in range(d)]
                nv = mpmath.sqrt(mpmath.fsum(x * x for x in v))
                v = [x / nv for x in v]
                kind = REAL_POSITIVE if nu > 0 else REAL_NEGATIVE
                raw_blocks.append((kind, mpmath.mpc(nu), r.radius, abs(nu), (v,)))
            else:
                j = min(
                    (j for j in range(len(roots)) if j not in used),
                    key=lambda j: abs(roots[j].value - mpmath.conj(z)),
                )
                used.add(j)
                if z.imag < 0:
                    z = mpmath.conj(z)
                v = _eigenvector(mm, z, d, tol)
                a, b = _real_basis_for_pair(list(v))
                raw_blocks.append((CONJUGATE_PAIR, z, r.radius, abs(z), (a, b)))

        raw_blocks.sort(key=lambda t: (-t[3], t[0], -t[1].imag))
        blocks = []
        col = 0
        for idx, (kind, nu, rad, mod, vecs) in enumerate(raw_blocks):
            cols = tuple(range(col, col + len(vecs)))
            col += len(vecs)
            blocks.append(GeneralizedEigenspace(idx, kind, nu, rad, mod, tuple(tuple(v) for v in vecs), cols))
        if col != d:
            raise DefectiveMatrix("generalized eigenspaces do not span R^d")

        e = mpmath.matrix(d, d)
        for b in blocks:
            for vec, c in zip(b.basis, b.columns):
                for i in range(d):
                    e[i, c] = vec[i]
        try:
            p = mpmath.inverse(e)
        except ZeroDivisionError as exc:
            raise DefectiveMatrix("eigenbasis is singular") from exc
        cond = mpmath.mnorm(e, 1) * mpmath.mnorm(p, 1)

        # residual of every eigenpair
        for b in blocks:
            for vec in b.basis:
                x = mpmath.matrix(list(vec))
                img = mm * x
                coords = p * img
                outside = max((abs(coords[j]) for j in range(d) if j not in b.columns), default=0)
                if outside > mpmath.mpf(2) ** (-(precision_bits // 2)):
                    raise DefectiveMatrix(f"eigenspace {b.index} is not invariant to tolerance")

        lam1 = _lattice_minimum(p, e, blocks, d)
        scale = LATTICE_MIN_NORM / lam1

    central = _certify_unit_moduli(poly, roots, blocks, work)
    return SpectralDecomposition(
        matrix=m,
        precision_bits=precision_bits,
        char_poly=poly,
        eigenvalues=tuple(roots),
        blocks=tuple(blocks),
        basis=e,
        basis_change=p,
        scale=scale,
        condition_number=cond,
        central_certified=frozenset(central),
    )


def _certify_unit_moduli(poly, roots, blocks, work) -> set:
    """Blocks whose eigenvalue lies exactly on the unit circle, decided algebraically.

    A root nu with |nu| = 1 is also a root of the reciprocal polynomial, so it is
    a root of g = gcd(p, x^d p(1/x)).  Conversely if nu is a root of g then
    1/conj(nu) is a root of p; when the only root disk it can fall in is nu's
    own, 1/conj(nu) = nu, i.e. |nu| = 1.
    """
    g = poly_gcd(poly, poly.reciprocal())
    if g.degree < 1:
        return set()
    g_roots = certified_roots(g.coeffs, work)
    out = set()
    with mpmath.workprec(2 * work + 64):
        for b in blocks:
            lo, hi = b.modulus_interval
            if not (lo <= 1 <= hi):
                continue
            nu = b.eigenvalue
            own = next(r for r in roots if abs(r.value - nu) <= r.radius or abs(r.value - mpmath.conj(nu)) <= r.radius)
            if not any(abs(gr.value - own.value) <= gr.radius + own.radius for gr in g_roots):
                continue
            w = 1 / mpmath.conj(own.value)
            rw = 2 * own.radius / (abs(own.value) - own.radius) ** 2
            hits = [r for r in roots if abs(r.value - w) <= r.radius + rw]
            if hits == [own]:
                out.add(b.index)
    return out


# ---------------------------------------------------------------------------
# weak stable splitting


@dataclass(frozen=True)
class StableSplit:
    plus: tuple
    zero: tuple
    minus: tuple
    sd: SpectralDecomposition = field(repr=False, compare=False)

    @property
    def zero_minus(self) -> tuple:
        return tuple(sorted(self.zero + self.minus))

    def span(self, indices) -> list:
        return [list(v) for i in indices for v in self.sd.blocks[i].basis]

    @property
    def dims(self) -> tuple:
        dim = lambda idx: sum(self.sd.blocks[i].dim for i in idx)
        return dim(self.plus), dim(self.zero), dim(self.minus)

    def weak_stable_basis(self) -> list:
        return self.span(self.zero_minus)

    def unstable_basis(self) -> list:
        return self.span(self.plus)


def stable_split(sd: SpectralDecomposition) -> StableSplit:
    plus, zero, minus = [], [], []
    with sd.workprec():
        for b in sd.blocks:
            lo, hi = b.modulus_interval
            if lo > 1:
                plus.append(b.index)
            elif hi < 1:
                minus.append(b.index)
            elif b.index in sd.central_certified:
                zero.append(b.index)
            else:
                raise UnresolvedModulus(f"modulus of eigenvalue {mpmath.nstr(b.eigenvalue, 15)} straddles 1")
    return StableSplit(tuple(plus), tuple(zero), tuple(minus), sd)


# ---------------------------------------------------------------------------
# W-dominating data


@dataclass(frozen=True)
class DominatingData:
    direction_w: tuple
    components: tuple
    component_norms: tuple
    lam: mpmath.mpf
    eta: mpmath.mpf | None
    W_max: tuple
    W_lt_max: tuple
    w_lambda: tuple
    w_lt: tuple
    k_I: int
    sd: SpectralDecomposition = field(repr=False, compare=False)

    def spanning_set(self, indices) -> list:
        return [list(v) for i in indices for v in self.sd.blocks[i].basis]


def dominating_data(sd: SpectralDecomposition, w: Sequence) -> DominatingData:
    """Dominating modulus, second modulus and stabilization index for direction w."""
    d = sd.dim
    split = stable_split(sd)
    with sd.workprec():
        w = mpvec(w)
        n = sup_norm(sd, w)
        if n == 0:
            raise InsideWeakStable("zero direction")
        w = [x / n for x in w]
        coords = sd.coordinates(w)
        comps, norms = [], []
        for b in sd.blocks:
            keep = set(b.columns)
            comps.append(tuple(sd.from_coordinates([coords[j] if j in keep else 0 for j in range(d)])))
            norms.append(sd.scale * mpmath.sqrt(mpmath.fsum(coords[j] ** 2 for j in b.columns)))
        threshold = mpmath.mpf(2) ** (-(sd.precision_bits / 4))
        nonzero = [b.index for b in sd.blocks if norms[b.index] > threshold]
        if not any(i in split.plus for i in nonzero):
            raise InsideWeakStable("direction lies in the weak stable subspace")
        top = max(nonzero, key=lambda i: sd.blocks[i].modulus)
        lam = sd.blocks[top].modulus
        lo, hi = sd.blocks[top].modulus_interval
        tied = [b.index for b in sd.blocks if b.modulus_interval[1] >= lo and b.modulus_interval[0] <= hi]
        if any(i not in nonzero for i in tied):
            raise AmbiguousDominance("a block with modulus inseparable from lambda has zero component")
        w_max = tuple(tied)
        w_lt_max = tuple(b.index for b in sd.blocks if b.index not in tied and b.modulus < lam)
        lower = [i for i in nonzero if i in w_lt_max]
        eta = max((sd.blocks[i].modulus for i in lower), default=None)
        w_lambda = [mpmath.fsum(comps[i][k] for i in w_max) for k in range(d)]
        w_lt = [w[k] - w_lambda[k] for k in range(d)]
        n_top = sup_norm(sd, w_lambda)
        n_low = sup_norm(sd, w_lt)
        if eta is None or n_low <= threshold:
            k_i = 0
        else:
            k_i = max(0, int(mpmath.ceil(mpmath.log(n_low / n_top) / mpmath.log(lam / eta))))
            while k_i > 0 and (lam / eta) ** (k_i - 1) * n_top / n_low >= 1:
                k_i -= 1
            while (lam / eta) ** k_i * n_top / n_low < 1:
                k_i += 1
    return DominatingData(
        direction_w=tuple(w),
        components=tuple(comps),
        component_norms=tuple(norms),
        lam=lam,
        eta=eta,
        W_max=w_max,
        W_lt_max=w_lt_max,
        w_lambda=tuple(w_lambda),
        w_lt=tuple(w_lt),
        k_I=k_i,
        sd=sd,
    )


def apply_power(sd: SpectralDecomposition, v, k: int) -> list:
    """m^k v evaluated blockwise in eigen coordinates (k may be negative)."""
    c = sd.coordinates(v)
    with sd.workprec():
        out = [mpmath.mpf(0)] * sd.dim
        for b in sd.blocks:
            if b.kind == CONJUGATE_PAIR:
                r = sd.restricted_matrix(b.index) ** k if k >= 0 else mpmath.inverse(sd.restricted_matrix(b.index)) ** (-k)
                i0, i1 = b.columns
                out[i0] = r[0, 0] * c[i0] + r[0, 1] * c[i1]
                out[i1] = r[1, 0] * c[i0] + r[1, 1] * c[i1]
            else:
                (i0,) = b.columns
                out[i0] = b.eigenvalue.real ** k * c[i0]
        return sd.from_coordinates(out)
