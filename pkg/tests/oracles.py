"""Independent reference values and small helpers shared by the test modules.

Values here come from sympy or from closed forms, never from toraldyn itself.
"""

from __future__ import annotations

from fractions import Fraction

import sympy as sp

from toraldyn.exact_linalg import IntMatrix

FIB = IntMatrix([[1, 1], [1, 0]])
CAT = IntMatrix([[2, 1], [1, 1]])
R6 = IntMatrix([[0, -1], [1, 1]])  # order 6
ROT4 = IntMatrix([[0, -1], [1, 0]])  # order 4

A = IntMatrix([[2, 3], [1, 2]])
B = IntMatrix([[2, 5], [1, 2]])
Q = IntMatrix([[1, 2], [1, 1]])

# hand-entered reference values
S_EXPECTED = [[6, 9, 8, 12], [3, 6, 4, 8], [4, 6, 6, 9], [2, 4, 3, 6]]
T_EXPECTED = [[6, 15, 8, 20], [3, 6, 4, 8], [4, 10, 6, 15], [2, 4, 3, 6]]
S53 = IntMatrix(S_EXPECTED)
T53 = IntMatrix(T_EXPECTED)

# x^4 - 24x^3 + 50x^2 - 24x + 1, low to high
CHAR_S53 = [1, -24, 50, -24, 1]

PHI = (1 + sp.sqrt(5)) / 2


def sym(m: IntMatrix) -> sp.Matrix:
    return sp.Matrix(m.tolist())


def sympy_charpoly(m: IntMatrix) -> list[Fraction]:
    x = sp.Symbol("x")
    coeffs = sp.Poly(sym(m).charpoly(x).as_expr(), x).all_coeffs()
    return [Fraction(int(c)) for c in reversed(coeffs)]


def sympy_irreducible(coeffs_low_to_high) -> bool:
    x = sp.Symbol("x")
    p = sp.Poly(list(reversed([sp.Rational(c.numerator, c.denominator) if isinstance(c, Fraction) else c
                               for c in coeffs_low_to_high])), x)
    _, factors = sp.factor_list(p.as_expr(), x)
    return len(factors) == 1 and factors[0][1] == 1


def sympy_degree_pattern(coeffs_low_to_high, p: int) -> list[int] | None:
    x = sp.Symbol("x")
    poly = sp.Poly(list(reversed(coeffs_low_to_high)), x, modulus=p)
    if sp.gcd(poly, poly.diff(x)).degree() > 0:
        return None
    _, factors = poly.factor_list()
    return sorted(f.degree() for f, e in factors for _ in range(e))


def s53_eigenvalues() -> list:
    """(2 +- sqrt3)(1 +- sqrt2)^2 as sympy expressions."""
    r2, r3 = sp.sqrt(2), sp.sqrt(3)
    return [(2 + a * r3) * (1 + b * r2) ** 2 for a in (1, -1) for b in (1, -1)]


def fib_scale() -> float:
    """8 / shortest block-Euclidean norm of a nonzero integer vector for the Fibonacci basis.

    In orthonormal eigen coordinates the block norm is max |<v, e_i>|; the
    minimum is found by brute force over a small box.
    """
    import math

    phi = (1 + math.sqrt(5)) / 2
    n = math.sqrt(1 + phi * phi)
    e1 = (phi / n, 1 / n)
    e2 = (-1 / n, phi / n)
    best = min(
        max(abs(a * e1[0] + b * e1[1]), abs(a * e2[0] + b * e2[1]))
        for a in range(-6, 7) for b in range(-6, 7) if (a, b) != (0, 0)
    )
    return 8 / best
