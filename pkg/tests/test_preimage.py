import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from harmval import HarmonicPolynomial, preimages, preimages_numeric, valence
from harmval import polytools as pt
from harmval.catalog import CATALOG
from harmval.preimage import (DEDUP_REL, RESIDUAL_TOL, DegenerateFunctionError,
                              build_conjugate_system, disc, eliminate, preimage_radius,
                              residual_metric)

coef = st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False)


@st.composite
def harmonic_polys(draw):
    n_p = draw(st.integers(1, 4))
    n_q = draw(st.integers(1, 4))
    p = draw(st.lists(coef, min_size=n_p + 1, max_size=n_p + 1))
    q = draw(st.lists(coef, min_size=n_q + 1, max_size=n_q + 1))
    assume(abs(p[-1]) > 0.3 and abs(q[-1]) > 0.3)
    assume(n_p != n_q or abs(abs(p[-1]) - abs(q[-1])) > 0.2)
    return HarmonicPolynomial(p, q)


def test_conjugate_system_quadratic():
    f = CATALOG["quadratic"].map
    sys = build_conjugate_system(f, 0)
    e1, e2 = sys.evaluate(0, 0)
    assert e1 == 0 and e2 == 0
    assert sys.deg_s == (f.n_q, f.n_p)
    z = 0.4 - 0.3j
    e1, e2 = sys.evaluate(z, np.conj(z))
    assert np.isclose(e1, f(z)) and np.isclose(e2, np.conj(f(z)))


def test_conjugate_system_identity():
    f = HarmonicPolynomial([0, 1], [])
    with pytest.raises(DegenerateFunctionError):
        build_conjugate_system(HarmonicPolynomial([0, 1], [0, 1]), 0)
    ps = preimages(f, 2 - 1j)
    assert np.allclose(ps.solutions, [2 - 1j])


def test_eliminate_degree_one():
    f = HarmonicPolynomial([0, 2], [0, 0.5])
    c = 1 + 1j
    e = eliminate(build_conjugate_system(f, c))
    r = pt.roots(e.coeffs)
    assert len(r) == 1 and np.isclose(f(r[0]), c)


def test_eliminate_flatpoly_identically_zero():
    f = CATALOG["flatpoly"].map
    assert eliminate(build_conjugate_system(f, 0)).identically_zero
    assert not eliminate(build_conjugate_system(f, 1j)).identically_zero


def test_roots_examples():
    assert np.allclose(sorted(pt.roots([1, 0, 1]), key=lambda z: z.imag), [-1j, 1j])
    r = pt.roots([-1, 0, 0, 1])
    assert len(r) == 3 and np.allclose(r ** 3, 1)
    # (z - 2)^2 (z + 1) = z^3 - 3z^2 + 4
    r = pt.roots([4, 0, -3, 1])
    assert np.allclose(sorted(r, key=lambda z: z.real), [-1, 2])


def test_preimage_examples():
    cs = CATALOG["cubic-star"].map
    assert str(preimages(cs, 0).verdict) == "finite(6)"
    inner = preimages(cs, 0, region=disc(0, 1))
    assert str(inner.verdict) == "finite(1)" and np.allclose(inner.solutions, 0)
    q = CATALOG["quadratic"].map
    assert str(preimages(q, 5).verdict) == "finite(2)"
    assert str(preimages(CATALOG["flatpoly"].map, 1).verdict) == "finite(0)"


def test_valence_examples():
    q = CATALOG["quadratic"].map
    assert str(valence(CATALOG["flatpoly"].map, 0)) == "infinite"
    assert str(valence(HarmonicPolynomial([0, 1], []), 3 + 4j)) == "finite(1)"
    assert str(valence(q, 0.3)) == "finite(4)"
    assert str(valence(q, 0.05)) == "finite(4)"
    # just outside the left edge of the deltoid
    assert str(valence(q, -0.05)) == "finite(2)"


def test_numeric_examples():
    th = CATALOG["transharm"].map
    assert str(preimages_numeric(th, 0, (-8, 8, -8, 8)).verdict) == "finite(1)"
    assert str(preimages_numeric(th, -10 + 1j * np.pi, (-20, 20, -8, 8)).verdict) == "finite(2)"
    assert str(preimages_numeric(CATALOG["c1poly"].map, 2 + 1j, (-3, 3, -3, 3)).verdict) == \
        "finite(4)"


def test_preimage_radius_bounds_roots():
    f = CATALOG["cubic-twos"].map
    for w in (0, 3 + 1j, -20j):
        R = preimage_radius(f, w)
        assert np.all(np.abs(preimages(f, w).solutions) < R)
    assert preimage_radius(CATALOG["polyunbdds"].map, 1) is None


@given(harmonic_polys(), coef, st.complex_numbers(max_magnitude=1.5, allow_nan=False,
                                                   allow_infinity=False))
def test_preimage_contract(f, w, z0):
    ps = preimages(f, w)
    assert ps.certified and ps.verdict.kind == "finite"
    z = ps.solutions
    assert np.all(residual_metric(f, z, w) < RESIDUAL_TOL)
    assert ps.verdict.count <= f.N ** 2
    if len(z) > 1:
        d = np.abs(z[:, None] - z[None, :]) + np.eye(len(z)) * 1e9
        assert d.min() > DEDUP_REL
    # a known preimage is always found
    w0 = complex(f(z0))
    found = preimages(f, w0).solutions
    J = abs(f.jacobian(z0))
    if J > 1e-3:
        assert np.min(np.abs(found - z0)) < 1e-6


@given(harmonic_polys(), coef)
def test_conjugate_slice_soundness(f, w):
    sys = build_conjugate_system(f, w)
    z = preimages(f, w).solutions
    if z.size == 0:
        return
    e1, e2 = sys.evaluate(z, np.conj(z))
    scale = np.abs(sys.E1).sum() + np.abs(sys.E2).sum()
    scale *= max(1.0, np.max(np.abs(z))) ** (f.N + 1)
    assert np.all(np.abs(e1) + np.abs(e2) < 1e-8 * scale)


def test_lower_semicontinuity_probe():
    f = CATALOG["cubic-twos"].map
    rng = np.random.default_rng(3)
    for w in (0j, 2.5 + 0.5j, 0.9 + 0.2j):
        v0 = valence(f, w).count
        for d in 1e-4 * np.exp(2j * np.pi * rng.uniform(size=20)):
            assert valence(f, w + d).count >= v0
