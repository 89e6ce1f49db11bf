"""Polynomial roots with certified inclusion disks.

Roots come from ``mpmath.polyroots`` followed by Newton polishing against the
exact coefficients.  Each root carries a radius ``r`` such that the closed disk
of radius ``r`` around it contains a true root; the disks are checked to be
pairwise disjoint, so the correspondence with the true roots is one-to-one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .errors import DefectiveMatrix


@dataclass(frozen=True)
class CertifiedRoot:
    value: mpmath.mpc
    radius: mpmath.mpf


def _to_mpf(c):
    if isinstance(c, Fraction):
        return mpmath.mpf(c.numerator) / c.denominator
    return mpmath.mpf(c)


def _horner_with_bound(coeffs_hi, z):
    """Value of the polynomial and a bound on |value| computed from |coeffs|."""
    v = mpmath.mpc(0)
    bound = mpmath.mpf(0)
    az = abs(z)
    for c in coeffs_hi:
        v = v * z + c
        bound = bound * az + abs(c)
    return v, bound


def certified_roots(coeffs, prec: int, max_rounds: int = 4) -> list[CertifiedRoot]:
    """Roots of a squarefree polynomial with disjoint certified disks.

    ``coeffs`` is low-to-high (integers or Fractions).  The working precision is
    doubled up to ``max_rounds`` times until every disk is disjoint from the
    others; otherwise :class:`DefectiveMatrix` is raised, which is what a
    repeated root looks like numerically.
    """
    coeffs = [Fraction(c) for c in coeffs]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    n = len(coeffs) - 1
    if n < 1:
        return []
    work = max(int(prec), 53)
    for _ in range(max_rounds):
        with mpmath.workprec(2 * work + 32):
            hi = [_to_mpf(c) for c in reversed(coeffs)]
            dhi = [hi[i] * (n - i) for i in range(n)]
            try:
                raw = mpmath.polyroots(hi, maxsteps=400, extraprec=2 * work)
            except mpmath.libmp.NoConvergence:
                work *= 2
                continue
            eps = mpmath.mpf(2) ** (-(2 * work + 24))
            out = []
            for z in raw:
                z = mpmath.mpc(z)
                for _ in range(3):
                    p, _b = _horner_with_bound(hi, z)
                    dp, _b = _horner_with_bound(dhi, z)
                    if dp == 0:
                        break
                    z = z - p / dp
                p, pb = _horner_with_bound(hi, z)
                dp, dpb = _horner_with_bound(dhi, z)
                num = abs(p) + 4 * n * eps * pb
                den = abs(dp) - 4 * n * eps * dpb
                if den <= 0:
                    out = None
                    break
                radius = n * num / den + eps * (1 + abs(z))
                out.append(CertifiedRoot(z, radius))
            if out is not None and _disjoint(out):
                return sorted(out, key=lambda r: (-abs(r.value), -r.value.imag))
        work *= 2
    raise DefectiveMatrix("roots could not be separated; the polynomial is probably not squarefree")


def _disjoint(roots: list[CertifiedRoot]) -> bool:
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            if abs(roots[i].value - roots[j].value) <= roots[i].radius + roots[j].radius:
                return False
    return True
