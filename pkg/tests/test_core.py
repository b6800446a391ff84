import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from harmval import (FunctionSpecError, HarmonicPolynomial, detect_degeneracy, eval_map,
                     function_spec, jacobian, parse_function, psi)
from harmval import polytools as pt
from harmval.catalog import CATALOG
from harmval.core import PSI_INDETERMINATE, PSI_POLE, PlaneMap

coef = st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False)
polys = st.lists(coef, min_size=1, max_size=5)


def test_eval_examples():
    f = CATALOG["quadratic"].map
    assert eval_map(f, 0) == 0
    assert np.isclose(eval_map(f, 1j), -1 + 2j)
    assert abs(eval_map(CATALOG["flatpoly"].map, 1 + 1j)) < 1e-14


def test_jacobian_examples():
    refl = HarmonicPolynomial([], [0, 1])
    assert jacobian(refl, 0.3 - 2j) == -1
    f = CATALOG["quadratic"].map
    assert jacobian(f, 0) == 0
    assert jacobian(f, 1) == 8


def test_psi_examples():
    f = CATALOG["quadratic"].map
    # q = -z here, so psi(0) = 1 / -1
    assert psi(f, 0) == -1
    cs = CATALOG["cubic-star"].map
    z = np.exp(2j * np.pi * np.arange(7) / 7)
    assert np.allclose(np.abs(psi(cs, z)), 1)
    g = HarmonicPolynomial([0, 1, 1], [3])
    assert np.all(np.isinf(psi(g, np.array([0.1, 2j]))))


def test_psi_indeterminate_marker():
    # p' = z(z-1), q' = z(z-2): reduced to (z-1)/(z-2); nothing left to cancel
    f = HarmonicPolynomial([0, 0, -0.5, 1 / 3], [0, 0, -1, 1 / 3])
    assert np.isclose(psi(f, 0), 0.5)
    assert np.isinf(psi(f, 2.0))
    assert np.isnan(PSI_INDETERMINATE) and np.isinf(PSI_POLE)


def test_degeneracy_examples():
    assert detect_degeneracy(HarmonicPolynomial([3 + 2j], [])).kind == "constant_range"
    r = detect_degeneracy(HarmonicPolynomial([0, 1], [0, 1]))
    assert r.kind == "line_range" and np.isclose(r.lam, 1) and r.beta != 0
    assert detect_degeneracy(CATALOG["quadratic"].map).kind == "generic"


def test_parse_function():
    assert parse_function("quadratic") is CATALOG["quadratic"].map
    f = parse_function({"p": [[0, 0], [1, 0], [1, 0]], "q": [[0, 0], [-1, 0]]})
    z = np.array([0.3 + 0.1j, -1 + 2j])
    assert np.allclose(f(z), CATALOG["quadratic"].map(z))
    with pytest.raises(FunctionSpecError):
        parse_function({"p": [], "q": []})
    with pytest.raises(FunctionSpecError):
        parse_function("no-such-entry")
    with pytest.raises(FunctionSpecError):
        parse_function({"p": [[1, 2, 3]]})


def test_spec_round_trip():
    f = HarmonicPolynomial([1j, 2, 0, 0], [0, 0.5])
    g = parse_function(function_spec(f))
    assert g == f
    assert function_spec(CATALOG["dumbbell"].map) == {"name": "dumbbell"}


@given(polys, polys)
def test_trailing_zeros_stripped(p, q):
    f = HarmonicPolynomial(p + [0, 0], q + [0])
    for c in (f.p, f.q):
        assert c.size == 0 or c[-1] != 0
    assert f.N == max(f.n_p, f.n_q)
    assert f.n_p == pt.degree(f.p) if f.p.size else f.n_p == 0


@given(polys, polys)
def test_analytic_vs_fd_jacobian(p, q):
    f = HarmonicPolynomial(p, q)
    rng = np.random.default_rng(0)
    z = 3 * np.sqrt(rng.uniform(size=20)) * np.exp(2j * np.pi * rng.uniform(size=20))
    Ja = f.jacobian(z)
    Jf = PlaneMap.jacobian(f, z, mode="fd")
    scale = np.abs(pt.polyval(f.dp, z)) ** 2 + np.abs(pt.polyval(f.dq, z)) ** 2 + 1
    assert np.all(np.abs(Ja - Jf) <= 1e-5 * scale)


def test_catalog_fd_agreement():
    rng = np.random.default_rng(1)
    z = 3 * np.sqrt(rng.uniform(size=100)) * np.exp(2j * np.pi * rng.uniform(size=100))
    for e in CATALOG.values():
        if not e.harmonic:
            continue
        Ja = e.map.jacobian(z)
        Jf = e.map.jacobian(z, mode="fd")
        assert np.all(np.abs(Ja - Jf) <= 1e-5 * np.maximum(1, np.abs(Ja))), e.name


@given(polys, st.floats(0, 2 * np.pi))
def test_line_range_images_collinear(q, theta):
    lam = np.exp(1j * theta)
    p = list(lam * np.array(q, dtype=complex))
    p[0] = 0.7 - 0.2j
    f = HarmonicPolynomial(p, q)
    r = detect_degeneracy(f)
    if r.kind != "line_range":
        assert r.kind == "constant_range"
        return
    assert abs(abs(r.lam) - 1) < 1e-12
    rng = np.random.default_rng(2)
    z = rng.normal(size=100) + 1j * rng.normal(size=100)
    t = (f(z) - r.alpha) / r.beta
    assert np.all(np.abs(t.imag) <= 1e-9 * np.maximum(1, np.abs(t)))


@given(st.lists(st.floats(-2, 2), min_size=1, max_size=5),
       st.lists(st.floats(-2, 2), min_size=1, max_size=5), coef)
def test_conjugation_symmetry(p, q, z):
    f = HarmonicPolynomial(p, q)
    assert np.isclose(f(np.conj(z)), np.conj(f(z)), atol=1e-9)
