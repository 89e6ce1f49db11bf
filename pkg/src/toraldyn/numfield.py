"""Exact arithmetic in a number field Q(alpha) = Q[x]/(m(x)).

Elements are tuples of Fractions, the coefficients of 1, alpha, ..., alpha^(k-1).
The field carries one real embedding (a root of m) used only to propose and
to display values; equalities are always decided exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .exact_linalg import RatPolynomial


@dataclass(frozen=True)
class NumberField:
    minpoly: RatPolynomial
    root: mpmath.mpf

    @property
    def degree(self) -> int:
        return self.minpoly.degree

    def _wrap(self, p: RatPolynomial) -> tuple:
        c = list((p % self.minpoly).coeffs)
        return tuple(c + [Fraction(0)] * (self.degree - len(c)))

    def element(self, coeffs) -> tuple:
        return self._wrap(RatPolynomial(coeffs))

    def rational(self, q) -> tuple:
        return self.element([Fraction(q)])

    def zero(self) -> tuple:
        return self.rational(0)

    def one(self) -> tuple:
        return self.rational(1)

    def is_zero(self, a) -> bool:
        return not any(a)

    def add(self, a, b) -> tuple:
        return tuple(x + y for x, y in zip(a, b))

    def sub(self, a, b) -> tuple:
        return tuple(x - y for x, y in zip(a, b))

    def mul(self, a, b) -> tuple:
        return self._wrap(RatPolynomial(a) * RatPolynomial(b))

    def inv(self, a) -> tuple:
        """Inverse by the extended Euclidean algorithm in Q[x]."""
        if self.is_zero(a):
            raise ZeroDivisionError("inverse of zero in a number field")
        r0, r1 = self.minpoly, RatPolynomial(a)
        s0, s1 = RatPolynomial([0]), RatPolynomial([1])
        while not r1.is_zero():
            q, r = divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, s0 - q * s1
        # r0 is a nonzero constant because minpoly is irreducible
        return self._wrap(s0 * RatPolynomial([1 / r0.coeffs[0]]))

    def embed(self, a) -> mpmath.mpf:
        return mpmath.fsum(mpmath.mpf(c.numerator) / c.denominator * self.root**i for i, c in enumerate(a))

    def format(self, a, var: str = "a") -> str:
        terms = []
        for i, c in enumerate(a):
            if c == 0:
                continue
            mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
            if mono and c == 1:
                terms.append(mono)
            elif mono:
                terms.append(f"{c}*{mono}")
            else:
                terms.append(str(c))
        return " + ".join(terms) if terms else "0"

    def rref(self, rows) -> tuple[list, list]:
        """Reduced row echelon form over the field; returns (nonzero rows, pivot columns)."""
        m = [list(r) for r in rows]
        pivots = []
        r = 0
        ncols = len(m[0]) if m else 0
        for c in range(ncols):
            p = next((i for i in range(r, len(m)) if not self.is_zero(m[i][c])), None)
            if p is None:
                continue
            m[r], m[p] = m[p], m[r]
            iv = self.inv(m[r][c])
            m[r] = [self.mul(iv, x) for x in m[r]]
            for i in range(len(m)):
                if i != r and not self.is_zero(m[i][c]):
                    f = m[i][c]
                    m[i] = [self.sub(x, self.mul(f, y)) for x, y in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
            if r == len(m):
                break
        return m[:r], pivots

    def kernel(self, rows, ncols: int) -> list:
        """Basis of the right kernel of a matrix over the field."""
        red, pivots = self.rref(rows) if rows else ([], [])
        free = [c for c in range(ncols) if c not in pivots]
        basis = []
        for f in free:
            v = [self.zero() for _ in range(ncols)]
            v[f] = self.one()
            for row, pc in zip(red, pivots):
                v[pc] = self.sub(self.zero(), row[f])
            basis.append(v)
        return basis

    def matmul(self, a, b) -> list:
        n, k, m = len(a), len(b), len(b[0])
        out = []
        for i in range(n):
            row = []
            for j in range(m):
                acc = self.zero()
                for t in range(k):
                    if not self.is_zero(a[i][t]) and not self.is_zero(b[t][j]):
                        acc = self.add(acc, self.mul(a[i][t], b[t][j]))
                row.append(acc)
            out.append(row)
        return out


def rationals() -> NumberField:
    """Q itself, as the degree-one field Q[x]/(x)."""
    return NumberField(RatPolynomial([0, 1]), mpmath.mpf(0))
