"""Exact integer/rational matrix algebra and irreducibility certificates.

Everything here works with Python integers and :class:`fractions.Fraction`;
no floating point enters a result except inside the root-subset search of
:func:`is_irreducible`, whose output is always re-checked by exact division.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath

from .errors import DegreeZero, DimMismatch, NotUnimodular
from .roots import certified_roots


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class IntMatrix:
    """Square matrix of arbitrary-precision integers."""

    rows: tuple

    def __init__(self, rows: Iterable[Iterable[int]]):
        rows = tuple(tuple(int(v) for v in r) for r in rows)
        if not rows:
            raise ValueError("matrix must have at least one row")
        d = len(rows)
        for i, r in enumerate(rows):
            if len(r) != d:
                raise DimMismatch(f"row {i} has {len(r)} entries, expected {d}")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def identity(cls, d: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(d)] for i in range(d)])

    @property
    def dim(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def __repr__(self):
        return f"IntMatrix({self.tolist()})"

    def _check(self, other: "IntMatrix"):
        if self.dim != other.dim:
            raise DimMismatch(f"dimensions {self.dim} and {other.dim} differ")

    def __add__(self, other):
        self._check(other)
        return IntMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other):
        self._check(other)
        return IntMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self):
        return IntMatrix([[-a for a in r] for r in self.rows])

    def scale(self, c: int) -> "IntMatrix":
        return IntMatrix([[c * a for a in r] for r in self.rows])

    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            self._check(other)
            cols = list(zip(*other.rows))
            return IntMatrix([[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self.rows])
        return self.apply(other)

    def apply(self, vec: Sequence):
        """Matrix-vector product; entries may be ints, Fractions or mpf."""
        if len(vec) != self.dim:
            raise DimMismatch(f"vector of length {len(vec)} for a {self.dim}x{self.dim} matrix")
        return [sum(a * v for a, v in zip(r, vec)) for r in self.rows]

    def __pow__(self, k: int) -> "IntMatrix":
        if k < 0:
            raise ValueError("negative powers need inverse(); use inverse() ** k")
        result = IntMatrix.identity(self.dim)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def transpose(self) -> "IntMatrix":
        return IntMatrix(list(zip(*self.rows)))

    def trace(self) -> int:
        return sum(self.rows[i][i] for i in range(self.dim))

    def det(self) -> int:
        """Bareiss fraction-free elimination."""
        a = [list(r) for r in self.rows]
        n = self.dim
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if swap is None:
                    return 0
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    def is_unimodular(self) -> bool:
        return abs(self.det()) == 1

    def inverse(self) -> "IntMatrix":
        """Inverse of a GL_d(Z) matrix."""
        det = self.det()
        if abs(det) != 1:
            raise NotUnimodular(f"determinant {det} is not +-1")
        inv = rational_inverse(self.rows)
        return IntMatrix([[int(v) for v in r] for r in inv])


def rational_inverse(rows) -> list[list[Fraction]]:
    n = len(rows)
    a = [[Fraction(v) for v in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [v / p for v in a[col]]
        for i in range(n):
            if i != col and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    return [r[n:] for r in a]


def rref(rows: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    """Reduced row echelon form over Q, zero rows dropped."""
    a = [[Fraction(v) for v in r] for r in rows]
    if not a:
        return []
    ncols = len(a[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        a[r] = [v / p for v in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        r += 1
        if r == len(a):
            break
    return a[:r]


def rank(rows) -> int:
    return len(rref(rows))


def commutator_is_zero(a: IntMatrix, b: IntMatrix) -> bool:
    if a.dim != b.dim:
        raise DimMismatch(f"dimensions {a.dim} and {b.dim} differ")
    return a @ b == b @ a


def kronecker(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    """Tensor product laid out as a block matrix whose (i, j) block is ``b[i][j] * a``.

    The ``a``-factor is the fast index, so this equals ``numpy.kron(b, a)``.
    """
    da, db = a.dim, b.dim
    out = [[0] * (da * db) for _ in range(da * db)]
    for i in range(db):
        for j in range(db):
            bij = b.rows[i][j]
            for k in range(da):
                for l in range(da):
                    out[i * da + k][j * da + l] = bij * a.rows[k][l]
    return IntMatrix(out)


# ---------------------------------------------------------------------------
# polynomials


def _trim(coeffs):
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


@dataclass(frozen=True)
class RatPolynomial:
    """Polynomial over Q, coefficients stored low degree first."""

    coeffs: tuple

    def __init__(self, coeffs: Iterable):
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in _trim(Fraction(c) for c in coeffs)))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def int_coeffs(self) -> list[int]:
        if not self.is_integral():
            raise ValueError("polynomial has non-integer coefficients")
        return [int(c) for c in self.coeffs]

    def __call__(self, x):
        v = 0
        for c in reversed(self.coeffs):
            v = v * x + c
        return v

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0] * (n - len(other.coeffs))
        return RatPolynomial([x + y for x, y in zip(a, b)])

    def __neg__(self):
        return RatPolynomial([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, RatPolynomial):
            return RatPolynomial([c * other for c in self.coeffs])
        if self.is_zero() or other.is_zero():
            return RatPolynomial([])
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RatPolynomial(out)

    __rmul__ = __mul__

    def __divmod__(self, other):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs) + 1
        if dq <= 0:
            return RatPolynomial([]), self
        quot = [Fraction(0)] * dq
        lead = other.leading
        for k in range(dq - 1, -1, -1):
            c = rem[k + other.degree] / lead
            quot[k] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] -= c * b
        return RatPolynomial(quot), RatPolynomial(rem[: other.degree])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self) -> "RatPolynomial":
        return self * (1 / self.leading)

    def derivative(self) -> "RatPolynomial":
        return RatPolynomial([i * c for i, c in enumerate(self.coeffs)][1:])

    def reciprocal(self) -> "RatPolynomial":
        """x^deg * p(1/x)."""
        return RatPolynomial(list(reversed(self.coeffs)))

    def primitive(self) -> "RatPolynomial":
        """Integer polynomial with content 1 and positive leading coefficient."""
        lcm = 1
        for c in self.coeffs:
            lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
        ints = [int(c * lcm) for c in self.coeffs]
        g = 0
        for v in ints:
            g = math.gcd(g, v)
        if ints[-1] < 0:
            g = -g
        return RatPolynomial([v // g for v in ints])

    def __str__(self):
        if self.is_zero():
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mag = abs(c)
            sign = "-" if c < 0 else "+"
            body = "" if (mag == 1 and i > 0) else str(mag)
            if i >= 1:
                body += "x" if i == 1 else f"x^{i}"
            terms.append((sign, body))
        s = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        for sign, body in terms[1:]:
            s += f" {sign} {body}"
        return s


def poly_gcd(a: RatPolynomial, b: RatPolynomial) -> RatPolynomial:
    while not b.is_zero():
        a, b = b, a % b
    return a.monic() if not a.is_zero() else a


def poly_at_matrix(p: RatPolynomial, m: IntMatrix) -> list[list[Fraction]]:
    """Evaluate p(m) by Horner's rule in exact arithmetic."""
    d = m.dim
    acc = [[Fraction(0)] * d for _ in range(d)]
    for c in reversed(p.coeffs):
        acc = [[sum(acc[i][k] * m.rows[k][j] for k in range(d)) for j in range(d)] for i in range(d)]
        for i in range(d):
            acc[i][i] += c
    return acc


def char_poly(m: IntMatrix) -> RatPolynomial:
    """det(xI - m) by the Faddeev-LeVerrier recursion in integer arithmetic."""
    n = m.dim
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    mk = IntMatrix([[0] * n for _ in range(n)])
    ident = IntMatrix.identity(n)
    for k in range(1, n + 1):
        mk = m @ mk + ident.scale(coeffs[n - k + 1])
        t = (m @ mk).trace()
        if t % k:
            raise ArithmeticError("Faddeev-LeVerrier produced a non-integer coefficient")
        coeffs[n - k] = -t // k
    return RatPolynomial(coeffs)


# ---------------------------------------------------------------------------
# polynomials over GF(p); lists of ints, low degree first


def _ptrim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a, p):
    return _ptrim([c % p for c in a])


def _psub(a, b, p):
    n = max(len(a), len(b))
    return _ptrim([((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)])


def _pmul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _pmod(out, p)


def _pdivmod(a, b, p):
    a = list(a)
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    for k in range(len(a) - len(b), -1, -1):
        c = a[k + len(b) - 1] * inv % p
        q[k] = c
        if c:
            for j, y in enumerate(b):
                a[k + j] = (a[k + j] - c * y) % p
    return _ptrim(q), _ptrim(a[: len(b) - 1])


def _pgcd(a, b, p):
    while b:
        a, b = b, _pdivmod(a, b, p)[1]
    if a:
        inv = pow(a[-1], -1, p)
        a = [c * inv % p for c in a]
    return a


def _ppowmod(base, e, mod, p):
    result = [1]
    base = _pdivmod(base, mod, p)[1]
    while e:
        if e & 1:
            result = _pdivmod(_pmul(result, base, p), mod, p)[1]
        base = _pdivmod(_pmul(base, base, p), mod, p)[1]
        e >>= 1
    return result


def degree_pattern_mod_p(f: Sequence[int], p: int) -> list[int] | None:
    """Degrees of the irreducible factors of f mod p (distinct-degree factorization).

    Returns None when f is not squarefree mod p or p divides the leading
    coefficient, i.e. when p divides the discriminant or the leading term.
    """
    n = len(_ptrim(list(f))) - 1
    f = _pmod(list(f), p)
    if len(f) - 1 != n:
        return None
    if n < 1:
        return None
    df = _pmod([i * c for i, c in enumerate(f)][1:], p)
    if not df or len(_pgcd(f, df, p)) > 1:
        return None
    inv = pow(f[-1], -1, p)
    f = [c * inv % p for c in f]
    pattern = []
    h = [0, 1]
    i = 1
    while len(f) - 1 >= 2 * i:
        h = _ppowmod(h, p, f, p)
        g = _pgcd(f, _psub(h, [0, 1], p), p)
        dg = len(g) - 1
        if dg > 0:
            pattern += [i] * (dg // i)
            f = _pdivmod(f, g, p)[0]
            h = _pdivmod(h, f, p)[1]
        i += 1
    if len(f) - 1 > 0:
        pattern.append(len(f) - 1)
    return sorted(pattern)


def _primes():
    yield 2
    n = 3
    while True:
        if all(n % q for q in range(3, int(n ** 0.5) + 1, 2)):
            yield n
        n += 2


def _subset_sums(pattern: Sequence[int]) -> set[int]:
    sums = {0}
    for d in pattern:
        sums |= {s + d for s in sums}
    return sums


# ---------------------------------------------------------------------------
# irreducibility


IRREDUCIBLE = "irreducible"
REDUCIBLE = "reducible"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class IrreducibilityCertificate:
    polynomial: RatPolynomial
    verdict: str
    method: str | None = None
    factor: RatPolynomial | None = None
    primes_used: tuple = ()
    patterns: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict == REDUCIBLE:
            if self.factor is None or not 0 < self.factor.degree < self.polynomial.degree:
                raise ValueError("reducible verdict needs a proper factor")
            if not (self.polynomial % self.factor).is_zero():
                raise ValueError(f"claimed factor {self.factor} does not divide {self.polynomial}")

    @property
    def irreducible(self) -> bool:
        return self.verdict == IRREDUCIBLE

    def to_dict(self) -> dict:
        return {
            "polynomial": str(self.polynomial),
            "verdict": self.verdict,
            "method": self.method,
            "factor": None if self.factor is None else str(self.factor),
            "primes_used": list(self.primes_used),
            "patterns": {str(k): v for k, v in self.patterns.items()},
        }


def _divisors(n: int, cap: int = 10**12) -> list[int] | None:
    n = abs(n)
    if n > cap:
        return None
    small, large = [], []
    for k in range(1, math.isqrt(n) + 1):
        if n % k == 0:
            small.append(k)
            if k != n // k:
                large.append(n // k)
    return small + large[::-1]


def _monic_integer_form(f: RatPolynomial) -> tuple[RatPolynomial, int]:
    """lc^(n-1) f(x / lc): monic, integral, reducible iff the primitive f is."""
    f = f.primitive()
    lc = int(f.leading)
    n = f.degree
    return RatPolynomial([int(c) * lc ** (n - 1 - i) if i < n else 1 for i, c in enumerate(f.coeffs)]), lc


def _undo_monic(g: RatPolynomial, lc: int) -> RatPolynomial:
    """Map a factor g(y) of the monic form back to a factor of f: g(lc x), made primitive."""
    return RatPolynomial([c * lc**i for i, c in enumerate(g.coeffs)]).primitive()


def _root_subset_factor(f: RatPolynomial, degrees: Iterable[int], prec: int):
    """Search for a monic integer factor of the monic f of one of the given degrees.

    Every monic integer factor is the product of (x - r) over a subset of the
    roots.  With certified root disks the coefficients of each subset product
    are known to within a computed error; when that error is < 1/2 the rounded
    product is the only integer candidate, and exact division decides.
    Returns (factor or None, conclusive: bool).
    """
    coeffs = f.int_coeffs()
    roots = certified_roots(coeffs, prec)
    conclusive = True
    with mpmath.workprec(prec + 64):
        for k in degrees:
            for subset in itertools.combinations(roots, k):
                poly = [mpmath.mpc(1)]
                bound = [mpmath.mpf(1)]
                exact_abs = [mpmath.mpf(1)]
                for r in subset:
                    poly = [mpmath.mpc(0)] + poly
                    for i in range(len(poly) - 1):
                        poly[i] -= r.value * poly[i + 1]
                    a = abs(r.value)
                    bound = [mpmath.mpf(0)] + bound
                    exact_abs = [mpmath.mpf(0)] + exact_abs
                    for i in range(len(bound) - 1):
                        bound[i] += (a + r.radius) * bound[i + 1]
                        exact_abs[i] += a * exact_abs[i + 1]
                errs = [b - e for b, e in zip(bound, exact_abs)]
                if max(errs) >= 0.25:
                    conclusive = False
                    continue
                if any(abs(c.imag) > 0.5 for c in poly):
                    continue
                cand = RatPolynomial([int(mpmath.nint(c.real)) for c in poly])
                if (f % cand).is_zero():
                    return cand, True
    return None, conclusive


def is_irreducible(p: RatPolynomial, max_primes: int = 25) -> IrreducibilityCertificate:
    """Certify irreducibility over Q.

    Stages: rational-root test, degree patterns of the factorization modulo
    the first ``max_primes`` primes not dividing the discriminant, then an
    exhaustive root-subset reconstruction for every factor degree the
    patterns could not exclude.
    """
    if p.degree < 1:
        raise DegreeZero("constant polynomial")
    f = p.primitive()
    n = f.degree
    if n == 1:
        return IrreducibilityCertificate(p, IRREDUCIBLE, "RationalRoot")
    ints = f.int_coeffs()
    if ints[0] == 0:
        return IrreducibilityCertificate(p, REDUCIBLE, "RationalRoot", RatPolynomial([0, 1]))

    # rational roots a/b: a | c0, b | lc
    num_divs, den_divs = _divisors(ints[0]), _divisors(ints[-1])
    if num_divs is not None and den_divs is not None:
        for a in num_divs:
            for b in den_divs:
                for r in (Fraction(a, b), Fraction(-a, b)):
                    if f(r) == 0:
                        factor = RatPolynomial([-r.numerator, r.denominator])
                        return IrreducibilityCertificate(p, REDUCIBLE, "RationalRoot", factor)
        if n in (2, 3):
            return IrreducibilityCertificate(p, IRREDUCIBLE, "RationalRoot")

    # a repeated factor shows up in gcd(f, f')
    g = poly_gcd(f, f.derivative())
    if g.degree > 0:
        return IrreducibilityCertificate(p, REDUCIBLE, "ExactFactorization", g.primitive())

    possible = set(range(1, n))
    if num_divs is not None and den_divs is not None:
        possible -= {1, n - 1}
    used, patterns = [], {}
    for q in _primes():
        if len(used) >= max_primes:
            break
        if ints[-1] % q == 0:
            continue
        pattern = degree_pattern_mod_p(ints, q)
        if pattern is None:
            continue
        used.append(q)
        patterns[q] = pattern
        if pattern == [n]:
            return IrreducibilityCertificate(p, IRREDUCIBLE, "ModPFactorPattern", None, (q,), {q: pattern})
        possible &= _subset_sums(pattern)
        if not possible:
            return IrreducibilityCertificate(p, IRREDUCIBLE, "ModPFactorPattern", None, tuple(used), patterns)

    # a factor of degree k pairs with one of degree n - k; search the smaller
    degrees = sorted({min(k, n - k) for k in possible})
    monic, lc = _monic_integer_form(f)
    height = max(abs(c) for c in monic.coeffs)
    prec = 64 + 2 * n * (int(height) + 1).bit_length()
    for _ in range(3):
        factor, conclusive = _root_subset_factor(monic, degrees, prec)
        if factor is not None:
            return IrreducibilityCertificate(
                p, REDUCIBLE, "ExactFactorization", _undo_monic(factor, lc), tuple(used), patterns
            )
        if conclusive:
            return IrreducibilityCertificate(p, IRREDUCIBLE, "ExactFactorization", None, tuple(used), patterns)
        prec *= 2
    return IrreducibilityCertificate(p, UNKNOWN, None, None, tuple(used), patterns)


# ---------------------------------------------------------------------------
# total irreducibility


CERTIFIED = "certified"
FAILS_AT_POWER = "fails_at_power"


@dataclass(frozen=True)
class TotalIrreducibility:
    status: str
    power: int | None
    power_bound: int
    certificates: tuple = ()
    root_of_unity_ratio: int | None = None

    @property
    def certified(self) -> bool:
        return self.status == CERTIFIED

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "power": self.power,
            "power_bound": self.power_bound,
            "root_of_unity_ratio_order": self.root_of_unity_ratio,
            "certificates": [c.to_dict() for c in self.certificates],
        }


def default_power_bound(d: int) -> int:
    return 2 * d * d


def _smallest_root_of_unity_ratio(m: IntMatrix, bound: int, prec: int = 128) -> int | None:
    """Smallest k <= bound with (nu_i / nu_j)^k = 1 numerically for some i != j."""
    roots = certified_roots(char_poly(m).coeffs, prec)
    tol = 2.0 ** (-prec // 3)
    best = None
    with mpmath.workprec(prec):
        for a, b in itertools.permutations(roots, 2):
            r = a.value / b.value
            if abs(abs(r) - 1) > tol:
                continue
            turns = float(mpmath.arg(r) / (2 * mpmath.pi))
            for k in range(1, bound + 1):
                if abs(cmath.exp(2j * math.pi * k * turns) - 1) < 1e-9:
                    best = k if best is None else min(best, k)
                    break
    return best


def is_totally_irreducible(m: IntMatrix, power_bound: int | None = None) -> TotalIrreducibility:
    """Irreducibility of char(m^k) for every k <= power_bound, plus a ratio check.

    The second, independent check looks for a pair of distinct eigenvalues
    whose ratio is a root of unity of order <= power_bound; any such pair
    makes some power reducible, so it must agree with the exact stage.
    """
    if not m.is_unimodular():
        raise NotUnimodular(f"determinant {m.det()} is not +-1")
    bound = default_power_bound(m.dim) if power_bound is None else int(power_bound)
    if bound < 1:
        raise ValueError("power_bound must be >= 1")
    certs = []
    unknown_at = None
    mk = m
    for k in range(1, bound + 1):
        if k > 1:
            mk = mk @ m
        cert = is_irreducible(char_poly(mk))
        certs.append(cert)
        if cert.verdict == REDUCIBLE:
            return TotalIrreducibility(FAILS_AT_POWER, k, bound, tuple(certs))
        if cert.verdict == UNKNOWN and unknown_at is None:
            unknown_at = k
    ratio = _smallest_root_of_unity_ratio(m, bound)
    if unknown_at is not None or ratio is not None:
        return TotalIrreducibility(UNKNOWN, unknown_at, bound, tuple(certs), ratio)
    return TotalIrreducibility(CERTIFIED, None, bound, tuple(certs))
