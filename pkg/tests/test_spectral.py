import mpmath
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from oracles import CAT, FIB, PHI, R6, S53, T53, fib_scale, s53_eigenvalues
from toraldyn.errors import InsideWeakStable, NotUnimodular
from toraldyn.exact_linalg import IntMatrix
from toraldyn.spectral import (
    CONJUGATE_PAIR, REAL_NEGATIVE, REAL_POSITIVE, apply_power, decompose, dominating_data, mpvec,
    stable_split, sup_norm,
)


def _close(a, b, tol):
    return abs(mpmath.mpc(a) - mpmath.mpc(b)) < tol


def test_fibonacci_eigenvalues_and_scale():
    sd = decompose(FIB, 128)
    with sd.workprec():
        vals = sorted((r.value.real for r in sd.eigenvalues))
        phi = mpmath.mpf(sp.N(PHI, 80))
        assert abs(vals[1] - phi) < mpmath.mpf(10) ** -35
        assert abs(vals[0] + 1 / phi) < mpmath.mpf(10) ** -35
    assert [b.kind for b in sd.blocks] == [REAL_POSITIVE, REAL_NEGATIVE]
    assert float(sd.scale) == pytest.approx(fib_scale(), rel=1e-12)


def test_kronecker_example_eigenvalues_match_radicals():
    sd = decompose(S53, 128)
    with sd.workprec():
        got = sorted(r.value.real for r in sd.eigenvalues)
        want = sorted(mpmath.mpf(sp.N(e, 60)) for e in s53_eigenvalues())
        assert all(abs(g - w) < mpmath.mpf(10) ** -20 for g, w in zip(got, want))


@pytest.mark.parametrize("m", [FIB, CAT, R6, S53, T53, IntMatrix([[0, 0, 1], [1, 0, -1], [0, 1, 0]])])
def test_certified_disks_contain_sympy_roots(m):
    sd = decompose(m, 128)
    x = sp.Symbol("x")
    exact = sp.Poly(list(reversed([int(c) for c in sd.char_poly.coeffs])), x).nroots(n=60)
    with sd.workprec():
        for z in exact:
            zc = mpmath.mpc(str(sp.re(z)), str(sp.im(z)))
            assert any(abs(zc - r.value) <= r.radius + mpmath.mpf(10) ** -50 for r in sd.eigenvalues)


def test_rotation_blocks_are_central():
    sd = decompose(R6, 128)
    assert [b.kind for b in sd.blocks] == [CONJUGATE_PAIR]
    split = stable_split(sd)
    assert split.dims == (0, 2, 0)


def test_split_dimensions():
    assert stable_split(decompose(FIB)).dims == (1, 0, 1)
    assert stable_split(decompose(S53)).dims == (2, 0, 2)
    assert stable_split(decompose(T53)).dims == (2, 0, 2)


def test_decompose_rejects():
    with pytest.raises(NotUnimodular):
        decompose(IntMatrix([[2, 0], [0, 1]]))
    with pytest.raises(ValueError):
        decompose(FIB, 32)


def test_eigen_coordinates_round_trip():
    sd = decompose(S53, 128)
    v = [1, -2, 3, 5]
    with sd.workprec():
        back = sd.from_coordinates(sd.coordinates(v))
        assert max(abs(a - b) for a, b in zip(back, v)) < mpmath.mpf(2) ** -200


def test_lattice_vectors_have_norm_at_least_eight():
    # the scale normalizes the shortest nonzero integer vector to norm 8
    for m in (FIB, CAT, S53):
        sd = decompose(m)
        with sd.workprec():
            norms = []
            d = m.dim
            import itertools
            for v in itertools.product(range(-2, 3), repeat=d):
                if any(v):
                    norms.append(sup_norm(sd, list(v)))
            assert min(norms) >= 8 - mpmath.mpf(10) ** -30


@given(st.lists(st.integers(-50, 50), min_size=2, max_size=2), st.integers(-8, 12))
def test_apply_power_matches_exact(v, k):
    sd = decompose(FIB, 128)
    mk = FIB ** k if k >= 0 else FIB.inverse() ** (-k)
    exact = mk.apply(v)
    with sd.workprec():
        got = apply_power(sd, v, k)
        assert max(abs(a - b) for a, b in zip(got, exact)) < mpmath.mpf(2) ** -150 * (1 + max(map(abs, exact)))


def test_dominating_data_fibonacci():
    sd = decompose(FIB)
    dd = dominating_data(sd, [1, 0])
    with sd.workprec():
        assert abs(dd.lam - mpmath.mpf(sp.N(PHI, 60))) < mpmath.mpf(10) ** -30
        assert abs(dd.eta * dd.lam - 1) < mpmath.mpf(10) ** -30
        assert abs(sup_norm(sd, list(dd.direction_w)) - 1) < mpmath.mpf(10) ** -30
    assert dd.W_max == (0,)


def test_inside_weak_stable():
    sd = decompose(FIB)
    with sd.workprec():
        stable = list(sd.blocks[1].basis[0])
    with pytest.raises(InsideWeakStable):
        dominating_data(sd, stable)
    with pytest.raises(InsideWeakStable):
        dominating_data(sd, [0, 0])
    # a reducible 3x3 with a neutral coordinate axis
    m = IntMatrix([[2, 1, 0], [1, 1, 0], [0, 0, 1]])
    with pytest.raises(InsideWeakStable):
        dominating_data(decompose(m), [0, 0, 1])


def test_eta_for_two_expanding_blocks():
    sd = decompose(S53)
    dd = dominating_data(sd, [1, 0, 0, 0])
    with sd.workprec():
        mods = sorted((b.modulus for b in sd.blocks), reverse=True)
        assert abs(dd.lam - mods[0]) < mpmath.mpf(10) ** -30
        assert abs(dd.eta - mods[1]) < mpmath.mpf(10) ** -30
        assert dd.k_I >= 0
        mv = mpvec(dd.w_lambda)
        assert sup_norm(sd, mv) > 0
