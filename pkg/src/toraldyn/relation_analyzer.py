"""How two toral automorphisms relate: commutation, weak stable subspaces,
common eigenvectors, jointly invariant subspaces and which known case applies.

Floating-point principal angles only propose relationships; anything reported
as an invariant subspace is re-verified in exact arithmetic.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .errors import DimMismatch
from .exact_linalg import (
    IntMatrix,
    RatPolynomial,
    TotalIrreducibility,
    commutator_is_zero,
    is_irreducible,
    is_totally_irreducible,
    kronecker,
    rank,
)
from .numfield import NumberField, rationals
from .spectral import CONJUGATE_PAIR, SpectralDecomposition, decompose, mp_to_fraction, mpvec, stable_split

THETA0 = mpmath.mpf("1e-8")

EQUAL = "Equal"
S_IN_T = "S_in_T"
T_IN_S = "T_in_S"
TRANSVERSE = "Transverse"

THM_WIN = "Thm_win_applies"
THM_MEAS = "Thm_meas_applies"
COMMUTING = "Commuting_BET_case"
OUTSIDE = "Outside_all_known_cases"


# ---------------------------------------------------------------------------
# principal angles


def _orthonormal(vectors) -> list:
    """Modified Gram-Schmidt, run twice for stability."""
    basis = []
    for v in vectors:
        v = mpvec(v)
        for _ in range(2):
            for q in basis:
                c = mpmath.fsum(a * b for a, b in zip(v, q))
                v = [a - c * b for a, b in zip(v, q)]
        n = mpmath.sqrt(mpmath.fsum(a * a for a in v))
        if n == 0:
            raise ValueError("linearly dependent spanning set")
        basis.append([a / n for a in v])
    return basis


def principal_angles(U, V) -> list:
    """Principal angles between span(U) and span(V), smallest first.

    Computed as arcsin of the singular values of the part of the smaller space
    orthogonal to the larger one, which stays accurate for tiny angles.
    """
    qu, qv = _orthonormal(U), _orthonormal(V)
    if len(qu) > len(qv):
        qu, qv = qv, qu
    if not qu:
        return []
    d = len(qu[0])
    resid = mpmath.matrix(d, len(qu))
    for j, u in enumerate(qu):
        r = list(u)
        for q in qv:
            c = mpmath.fsum(a * b for a, b in zip(u, q))
            r = [a - c * b for a, b in zip(r, q)]
        for i in range(d):
            resid[i, j] = r[i]
    sv = mpmath.svd_r(resid, compute_uv=False)
    return sorted(mpmath.asin(min(mpmath.mpf(1), s)) for s in sv)


def _contained(U, V, theta0) -> bool:
    if len(U) > len(V):
        return False
    if not U:
        return True
    return max(principal_angles(U, V)) < theta0


# ---------------------------------------------------------------------------
# weak stable comparison and common eigenvectors


@dataclass(frozen=True)
class WeakStableComparison:
    relation: str
    angles: tuple
    dim_S: int
    dim_T: int
    s_not_in_t: bool
    t_not_in_s: bool


def compare_weak_stable(sdS: SpectralDecomposition, sdT: SpectralDecomposition,
                        theta0=THETA0) -> WeakStableComparison:
    if sdS.dim != sdT.dim:
        raise DimMismatch("matrices of different sizes")
    us = stable_split(sdS).weak_stable_basis()
    ut = stable_split(sdT).weak_stable_basis()
    with mpmath.workprec(min(sdS.work_bits, sdT.work_bits)):
        s_in_t = _contained(us, ut, theta0)
        t_in_s = _contained(ut, us, theta0)
        angles = tuple(principal_angles(us, ut)) if us and ut else ()
    if s_in_t and t_in_s:
        rel = EQUAL
    elif s_in_t:
        rel = S_IN_T
    elif t_in_s:
        rel = T_IN_S
    else:
        rel = TRANSVERSE
    return WeakStableComparison(rel, angles, len(us), len(ut), not s_in_t, not t_in_s)


@dataclass(frozen=True)
class CommonEigenvector:
    vectors: tuple
    nu_S: mpmath.mpc
    nu_T: mpmath.mpc


def common_eigenvectors(sdS: SpectralDecomposition, sdT: SpectralDecomposition,
                        theta0=THETA0) -> list[CommonEigenvector]:
    """Generalized eigenspaces of S and T that coincide (up to theta0)."""
    if sdS.dim != sdT.dim:
        raise DimMismatch("matrices of different sizes")
    out = []
    with mpmath.workprec(min(sdS.work_bits, sdT.work_bits)):
        for bs in sdS.blocks:
            for bt in sdT.blocks:
                if bs.dim == bt.dim and _contained(list(bs.basis), list(bt.basis), theta0):
                    out.append(CommonEigenvector(tuple(tuple(v) for v in bs.basis), bs.eigenvalue, bt.eigenvalue))
    return out


# ---------------------------------------------------------------------------
# gcd criterion


@dataclass(frozen=True)
class GcdCriterion:
    d: int
    dim_ws: int
    gcd: int
    conclusion: str


MUST_COMMUTE = "must commute if the weak stable subspaces are equal and both are totally irreducible"
NO_CONCLUSION = "no conclusion from the gcd criterion"


def gcd_criterion(d: int, dim_ws: int) -> GcdCriterion:
    if not 0 < dim_ws < d:
        raise ValueError("need 0 < dim_ws < d")
    g = math.gcd(d, dim_ws)
    return GcdCriterion(d, dim_ws, g, MUST_COMMUTE if g == 1 else NO_CONCLUSION)


# ---------------------------------------------------------------------------
# jointly invariant subspaces


@dataclass(frozen=True)
class RationalSubspaceWitness:
    """A subspace with a basis that is exact over ``field`` (Q when field.degree == 1).

    Entries are field elements: tuples of Fractions in powers of the generator.
    """

    basis: tuple
    dimension: int
    invariant_under: tuple
    field: NumberField
    blocks: tuple = ()

    @property
    def over_rationals(self) -> bool:
        return self.field.degree == 1

    def numeric_basis(self) -> list:
        return [[self.field.embed(x) for x in v] for v in self.basis]


def _block_polynomial_coeffs(sd: SpectralDecomposition, blocks) -> list:
    """Real coefficients (low to high) of prod (x - nu) over the chosen blocks."""
    coeffs = [mpmath.mpf(1)]
    for i in blocks:
        b = sd.blocks[i]
        nu = b.eigenvalue
        if b.kind == CONJUGATE_PAIR:
            factor = [abs(nu) ** 2, -2 * mpmath.re(nu), mpmath.mpf(1)]
        else:
            factor = [-mpmath.re(nu), mpmath.mpf(1)]
        prod = [mpmath.mpf(0)] * (len(coeffs) + len(factor) - 1)
        for a, x in enumerate(coeffs):
            for c, y in enumerate(factor):
                prod[a + c] += x * y
        coeffs = prod
    return coeffs


def _identify_field(values, denom_bound: int, max_degree: int):
    """Express real algebraic numbers exactly in one number field, or return None."""
    degrees = []
    for v in values:
        found = None
        for deg in range(1, max_degree + 1):
            p = mpmath.findpoly(v, deg, maxcoeff=denom_bound)
            if p:
                found = p
                break
        if found is None:
            return None
        degrees.append(found)
    if all(len(p) == 2 for p in degrees):
        return rationals(), [(Fraction(-p[1], p[0]),) for p in degrees]
    j = max(range(len(values)), key=lambda i: len(degrees[i]))
    minpoly = RatPolynomial(list(reversed(degrees[j]))).monic()
    if is_irreducible(minpoly).verdict != "irreducible":
        return None
    alpha = values[j]
    k = minpoly.degree
    powers = [alpha**i for i in range(k)]
    tol = mpmath.mpf(2) ** (-(mpmath.mp.prec // 2))
    K = NumberField(minpoly, alpha)
    elements = []
    for v in values:
        rel = mpmath.pslq([v] + powers, maxcoeff=denom_bound, maxsteps=20000)
        if rel is None or rel[0] == 0:
            return None
        el = K.element([Fraction(-r, rel[0]) for r in rel[1:]])
        if abs(K.embed(el) - v) > tol * (1 + abs(v)):
            return None
        elements.append(el)
    return K, elements


def _matrix_over(K: NumberField, m: IntMatrix) -> list:
    return [[K.rational(x) for x in row] for row in m.rows]


def _algebraic_witness(S: IntMatrix, T: IntMatrix, sd: SpectralDecomposition, blocks,
                       denom_bound: int) -> RationalSubspaceWitness | None:
    d = S.dim
    dim = sum(sd.blocks[i].dim for i in blocks)
    with sd.workprec():
        coeffs = _block_polynomial_coeffs(sd, blocks)
        ident = _identify_field(coeffs[:-1], denom_bound, d)
    if ident is None:
        return None
    K, gs = ident
    gs = gs + [K.one()]
    # g(S) over K, then ker g(S) is the span of the chosen blocks
    G = [[K.zero() for _ in range(d)] for _ in range(d)]
    power = IntMatrix.identity(d)
    for g in gs:
        for i in range(d):
            for j in range(d):
                if power[i, j]:
                    G[i][j] = K.add(G[i][j], K.mul(g, K.rational(power[i, j])))
        power = power @ S
    basis = K.kernel(G, d)
    if len(basis) != dim:
        return None
    cols = [[v[i] for v in basis] for i in range(d)]
    for M in (S, T):
        image = K.matmul(_matrix_over(K, M), cols)
        if any(not K.is_zero(x) for row in K.matmul(G, image) for x in row):
            return None
    return RationalSubspaceWitness(tuple(tuple(v) for v in basis), dim, ("S", "T"), K, tuple(blocks))


def _rational_witness(S: IntMatrix, T: IntMatrix, sd: SpectralDecomposition, blocks,
                      denom_bound: int) -> RationalSubspaceWitness | None:
    """Row-reduce the numeric span, reconstruct entries by continued fractions, verify exactly."""
    vectors = [v for i in blocks for v in sd.blocks[i].basis]
    k, d = len(vectors), S.dim
    with sd.workprec():
        m = [list(mpvec(v)) for v in vectors]
        tol = mpmath.mpf(2) ** (-(sd.precision_bits // 2))
        r = 0
        for c in range(d):
            p = max(range(r, k), key=lambda i: abs(m[i][c]), default=None)
            if p is None or abs(m[p][c]) < tol:
                continue
            m[r], m[p] = m[p], m[r]
            piv = m[r][c]
            m[r] = [x / piv for x in m[r]]
            for i in range(k):
                if i != r:
                    f = m[i][c]
                    m[i] = [x - f * y for x, y in zip(m[i], m[r])]
            r += 1
            if r == k:
                break
        basis = []
        for row in m[:r]:
            exact = [mp_to_fraction(x).limit_denominator(denom_bound) for x in row]
            if any(abs(mpmath.mpf(q.numerator) / q.denominator - x) > tol for q, x in zip(exact, row)):
                return None
            basis.append(exact)
    if r != k or rank(basis) != k:
        return None
    for M in (S, T):
        image = [M.apply(v) for v in basis]
        if rank(basis + image) != k:
            return None
    Q = rationals()
    return RationalSubspaceWitness(tuple(tuple((x,) for x in v) for v in basis), k, ("S", "T"), Q, tuple(blocks))


def rational_invariant_search(S: IntMatrix, T: IntMatrix, sdS: SpectralDecomposition | None = None,
                              sdT: SpectralDecomposition | None = None, denom_bound: int = 10**6,
                              field: str = "algebraic", theta0=THETA0) -> list[RationalSubspaceWitness]:
    """Nontrivial subspaces invariant under both S and T, each verified exactly.

    Candidates are sums of generalized eigenspaces of S that T maps into
    themselves numerically.  With ``field="rational"`` only subspaces with a
    rational basis are reported.  With ``field="algebraic"`` the candidate is
    ker g(S) for the real factor g of the characteristic polynomial belonging
    to the chosen eigenvalues; the coefficients of g are recognized in a number
    field and the kernel and its T-invariance are checked in that field.
    """
    if S.dim != T.dim:
        raise DimMismatch("matrices of different sizes")
    if field not in ("rational", "algebraic"):
        raise ValueError("field must be 'rational' or 'algebraic'")
    sdS = sdS or decompose(S)
    sdT = sdT or decompose(T)
    build = _algebraic_witness if field == "algebraic" else _rational_witness
    out = []
    n = len(sdS.blocks)
    for size in range(1, n + 1):
        for blocks in itertools.combinations(range(n), size):
            vectors = [v for i in blocks for v in sdS.blocks[i].basis]
            with sdS.workprec():
                images = [T.apply(mpvec(v)) for v in vectors]
                if not _contained(images, vectors, theta0):
                    continue
            w = build(S, T, sdS, blocks, denom_bound)
            if w is not None:
                out.append(w)
    return out


# ---------------------------------------------------------------------------
# the verdict


@dataclass
class RelationVerdict:
    S_total: TotalIrreducibility
    T_total: TotalIrreducibility
    commute: bool
    weak_stable: WeakStableComparison
    common_eigvecs: list
    gcd: GcdCriterion | None
    witnesses: list
    theorem_route: str
    notes: list = field(default_factory=list)

    @property
    def both_totally_irreducible(self) -> bool:
        return self.S_total.status == "certified" and self.T_total.status == "certified"


def theorem_route(both_ti: bool, ws: WeakStableComparison, commute: bool) -> str:
    if both_ti and ws.s_not_in_t:
        return THM_WIN
    if both_ti and ws.t_not_in_s:
        return THM_MEAS
    if commute:
        return COMMUTING
    return OUTSIDE


def full_verdict(S: IntMatrix, T: IntMatrix, precision_bits: int = 128, power_bound: int | None = None,
                 denom_bound: int = 10**6) -> RelationVerdict:
    if S.dim != T.dim:
        raise DimMismatch("matrices of different sizes")
    s_ti = is_totally_irreducible(S, power_bound)
    t_ti = is_totally_irreducible(T, power_bound)
    commute = commutator_is_zero(S, T)
    sdS, sdT = decompose(S, precision_bits), decompose(T, precision_bits)
    ws = compare_weak_stable(sdS, sdT)
    common = common_eigenvectors(sdS, sdT)
    gcd = gcd_criterion(S.dim, ws.dim_S) if 0 < ws.dim_S < S.dim else None
    witnesses = rational_invariant_search(S, T, sdS, sdT, denom_bound)
    both = s_ti.status == "certified" and t_ti.status == "certified"
    notes = []
    if common and not both:
        notes.append("common eigenvectors found but irreducibility is not certified for both matrices")
    if common and both and not commute:
        notes.append("common eigenvector without commutation: numerical inconsistency")
    if both and ws.relation == EQUAL and gcd is not None and gcd.gcd == 1 and not commute:
        notes.append("equal weak stable subspaces with gcd 1 but no commutation: numerical inconsistency")
    route = theorem_route(both, ws, commute)
    return RelationVerdict(s_ti, t_ti, commute, ws, common, gcd, witnesses, route, notes)


# ---------------------------------------------------------------------------
# the worked 4x4 example


@dataclass(frozen=True)
class Example53:
    A: IntMatrix
    B: IntMatrix
    Q: IntMatrix
    Q2: IntMatrix
    S: IntMatrix
    T: IntMatrix
    expected: dict


EXPECTED_S = ((6, 9, 8, 12), (3, 6, 4, 8), (4, 6, 6, 9), (2, 4, 3, 6))
EXPECTED_T = ((6, 15, 8, 20), (3, 6, 4, 8), (4, 10, 6, 15), (2, 4, 3, 6))


def build_example_53() -> Example53:
    A = IntMatrix(((2, 3), (1, 2)))
    B = IntMatrix(((2, 5), (1, 2)))
    Q = IntMatrix(((1, 2), (1, 1)))
    Q2 = Q @ Q
    expected = {
        "Q2": ((3, 4), (2, 3)),
        "S": EXPECTED_S,
        "T": EXPECTED_T,
        "commute": False,
        "weak_stable_relation": EQUAL,
        "weak_stable_dim": 2,
        "weak_stable_span": "span((-sqrt 2, 0, 1, 0), (0, -sqrt 2, 0, 1))",
        "gcd": 2,
        "route": OUTSIDE,
        "witness_dims": {2, 4},
        "power_bound": 12,
    }
    return Example53(A, B, Q, Q2, kronecker(A, Q2), kronecker(B, Q2), expected)


def example_53_eigenvalues() -> list:
    """(2 +- sqrt 3)(1 +- sqrt 2)^2 at the current precision, largest first."""
    r3, r2 = mpmath.sqrt(3), mpmath.sqrt(2)
    vals = [(2 + a * r3) * (1 + b * r2) ** 2 for a in (1, -1) for b in (1, -1)]
    return sorted(vals, reverse=True)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


def verify_example_53(precision_bits: int = 128) -> list[Check]:
    """Recompute every expected fact about the 4x4 example."""
    ex = build_example_53()
    e = ex.expected
    checks = [
        Check("Q^2", ex.Q2.rows == e["Q2"], str(ex.Q2.tolist())),
        Check("S = kronecker(A, Q^2)", ex.S.rows == e["S"], str(ex.S.tolist())),
        Check("T = kronecker(B, Q^2)", ex.T.rows == e["T"], str(ex.T.tolist())),
        Check("S and T do not commute", commutator_is_zero(ex.S, ex.T) == e["commute"], ""),
    ]
    for name, m in (("S", ex.S), ("T", ex.T)):
        ti = is_totally_irreducible(m, e["power_bound"])
        checks.append(Check(f"{name} totally irreducible", ti.status == "certified", f"{ti.status}, bound {ti.power_bound}"))
    sdS, sdT = decompose(ex.S, precision_bits), decompose(ex.T, precision_bits)
    with mpmath.workprec(precision_bits):
        want = example_53_eigenvalues()
        got = sorted((mpmath.re(z.value) for z in sdS.eigenvalues), reverse=True)
        err = max(abs(a - b) for a, b in zip(got, want))
    checks.append(Check("eigenvalues of S", err < mpmath.mpf("1e-20"), f"max error {mpmath.nstr(err, 5)}"))
    ws = compare_weak_stable(sdS, sdT)
    worst = max(ws.angles) if ws.angles else mpmath.mpf(0)
    checks.append(Check("weak stable subspaces equal", ws.relation == e["weak_stable_relation"] and worst < mpmath.mpf("1e-10"),
                        f"{ws.relation}, max angle {mpmath.nstr(worst, 5)}"))
    checks.append(Check("weak stable dimension", ws.dim_S == ws.dim_T == e["weak_stable_dim"], f"{ws.dim_S}, {ws.dim_T}"))
    with sdS.workprec():
        r2 = mpmath.sqrt(2)
        span = [[-r2, 0, 1, 0], [0, -r2, 0, 1]]
        a1 = max(principal_angles(stable_split(sdS).weak_stable_basis(), span))
        a2 = max(principal_angles(stable_split(sdT).weak_stable_basis(), span))
    checks.append(Check("weak stable span", max(a1, a2) < mpmath.mpf("1e-10"), f"max angle {mpmath.nstr(max(a1, a2), 5)}"))
    with mpmath.workprec(256):
        r2 = mpmath.sqrt(2)
        ok = True
        for m in (ex.A, ex.B):
            tr = m.trace()
            disc = mpmath.sqrt(tr * tr - 4 * m.det())
            for lam in ((tr + disc) / 2, (tr - disc) / 2):
                ok &= abs(lam) * (1 + r2) ** 2 > 1 and abs(lam) * (1 - r2) ** 2 < 1
    checks.append(Check("k = 2 separates expanding and contracting products", bool(ok), ""))
    g = gcd_criterion(4, ws.dim_S)
    checks.append(Check("gcd criterion", g.gcd == e["gcd"] and g.conclusion == NO_CONCLUSION, f"gcd {g.gcd}"))
    common = common_eigenvectors(sdS, sdT)
    checks.append(Check("no common eigenvectors", not common, f"{len(common)} found"))
    both = all(c.passed for c in checks if c.name.endswith("totally irreducible"))
    route = theorem_route(both, ws, commutator_is_zero(ex.S, ex.T))
    checks.append(Check("theorem route", route == e["route"], route))
    dims = sorted(w.dimension for w in rational_invariant_search(ex.S, ex.T, sdS, sdT))
    checks.append(Check("jointly invariant dimensions", set(dims) == e["witness_dims"] and all(x % dims[0] == 0 for x in dims),
                        str(dims)))
    return checks
