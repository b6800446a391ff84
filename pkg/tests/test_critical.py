import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from harmval import HarmonicPolynomial, psi
from harmval import critical as cr
from harmval import polytools as pt
from harmval.catalog import CATALOG

CELLS = 256


def _cs(name, cells=CELLS):
    e = CATALOG[name]
    return e.map, cr.trace(e.map, e.viewport, cells=cells)


def _j_ok(f, z):
    scale = np.abs(pt.polyval(f.dp, z)) ** 2 + np.abs(pt.polyval(f.dq, z)) ** 2 + 1
    return np.abs(f.jacobian(z)) < 1e-8 * scale


def test_jacobian_field_examples():
    f = CATALOG["quadratic"].map
    J = cr.jacobian_field(f)
    rng = np.random.default_rng(0)
    x, y = rng.normal(size=10), rng.normal(size=10)
    assert np.allclose(J(x, y), 4 * x ** 2 + 4 * x + 4 * y ** 2)
    assert J.degree <= 2 * (f.N - 1)
    g = CATALOG["cubic-star"].map
    Jg = cr.jacobian_field(g)
    th = rng.uniform(0, 2 * np.pi, 10)
    assert np.allclose(Jg(np.cos(th), np.sin(th)), 0, atol=1e-12)
    assert Jg(0.0, 0.0) == 0
    I = cr.jacobian_field(HarmonicPolynomial([0, 1], []))
    assert np.allclose(I(x, y), 1)


@given(st.lists(st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False),
                min_size=2, max_size=5),
       st.lists(st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False),
                min_size=2, max_size=5))
def test_jacobian_field_matches_jacobian(p, q):
    f = HarmonicPolynomial(p, q)
    rng = np.random.default_rng(1)
    z = rng.normal(size=10) + 1j * rng.normal(size=10)
    J = cr.jacobian_field(f)
    Jz = f.jacobian(z)
    assert np.allclose(J(z.real, z.imag), Jz, atol=1e-10 * (1 + np.abs(Jz).max()))


def test_trace_quadratic_circle():
    f, cs = _cs("quadratic")
    assert len(cs.polylines) == 1 and cs.closed[0]
    v = cs.vertices()
    assert np.max(np.abs(np.abs(v + 0.5) - 0.5)) < cs.resolution
    assert np.all(_j_ok(f, v))


def test_trace_polyunbdds_hyperbola():
    f = CATALOG["polyunbdds"].map
    cs = cr.trace(f, (-3, 3, -3, 3), cells=CELLS)
    assert len(cs.polylines) == 2
    for p in cs.polylines:
        assert np.max(np.abs(p.real * p.imag + 1 / 6)) < 1e-6
        assert len(set(np.sign(p.real))) == 1  # one branch per polyline


def test_trace_empty_and_too_coarse():
    f = HarmonicPolynomial([0, 1], [])
    cs = cr.trace(f, (-1, 1, -1, 1), cells=64)
    assert cs.empty
    with pytest.raises(cr.TraceError):
        cr.trace(f, (-1, 1, -1, 1), cells=4)
    assert cr.image_curve(f, cs).empty


@pytest.mark.parametrize("name", ["quadratic", "cubic-star", "cubic-twos", "dumbbell",
                                  "polyunbdds"])
def test_trace_invariants(name):
    f, cs = _cs(name)
    for p, closed in zip(cs.polylines, cs.closed):
        assert np.all(_j_ok(f, p))
        steps = np.abs(np.diff(np.append(p, p[0]) if closed else p))
        assert steps.max() <= 2 * cs.resolution
    v = cs.vertices()
    mod = np.abs(psi(f, v))
    near_iso = np.zeros(len(v), dtype=bool)
    for z0 in cs.isolated_points:
        near_iso |= np.abs(v - z0) < cs.resolution
    assert np.all((np.abs(mod - 1) < 1e-4) | near_iso)


def test_isolated_points_examples():
    assert np.allclose(cr.isolated_points(CATALOG["cubic-star"].map), [0])
    assert cr.isolated_points(CATALOG["quadratic"].map).size == 0
    assert cr.isolated_points(CATALOG["cubic-twos"].map).size == 0


def test_classify_examples():
    f, cs = _cs("quadratic")
    pts = cr.classify(f, cs)
    kinds = sorted(p.kind for p in pts)
    assert kinds == ["F1"] * 3
    g, cs2 = _cs("cubic-star")
    pts2 = cr.classify(g, cs2)
    n = [p for p in pts2 if p.kind == "N"]
    assert len(n) == 1 and abs(n[0].location) < 1e-12
    assert not cr.check_isolation(pts2, cs2.resolution)
    for p in pts + pts2:
        if p.local_model is not None:
            assert p.local_model.j % 2 == 1 and p.local_model.k % 2 == 1
    for p in n:
        assert abs(abs(psi(g, p.location)) - 1) > 1e-6 or np.isnan(psi(g, p.location))
        assert abs(pt.polyval(g.dp, p.location)) < 1e-12
        assert abs(pt.polyval(g.dq, p.location)) < 1e-12


def test_classify_no_special_points():
    # p' = 1 + z never vanishes on S = {|1 + z| = 1/2}... psi' = 2 != 0, no cusps expected
    f = HarmonicPolynomial([0, 1, 0.5], [0, 0.5])
    cs = cr.trace(f, (-3, 1, -2, 2), cells=CELLS)
    pts = cr.classify(f, cs)
    assert all(p.kind not in ("F2", "F3", "N") for p in pts)


def test_local_model_examples():
    assert cr.local_model(0, "regular_fold") == cr.LocalModel(1, 1)
    assert cr.local_model(1, "F1") == cr.LocalModel(3, 3)
    assert cr.local_model(2, "regular_fold") == cr.LocalModel(3, 3)
    m = cr.local_model(1, "F2")
    assert m.ambiguous and {m.j, m.k} == {1, 3}
    with pytest.raises(ValueError):
        cr.local_model(0, "F3")
    with pytest.raises(ValueError):
        cr.local_model(0, "N")


@given(st.integers(0, 12), st.sampled_from(["regular_fold", "F2", "F1"]))
def test_local_model_odd(ell, kind):
    m = cr.local_model(ell, kind)
    assert m.j % 2 == 1 and m.k % 2 == 1


@pytest.mark.parametrize("name,cusps", [("quadratic", 3), ("cubic-star", 5)])
def test_image_curve_cusps(name, cusps):
    f, cs = _cs(name, 512)
    ic = cr.image_curve(f, cs)
    assert len(ic.cusps) == cusps
    for p, F in zip(cs.polylines, ic.polylines):
        assert np.array_equal(F, f(p))
    for li in range(len(ic.polylines)):
        assert cr.tangent_monotone(ic, li)
    assert ic.speed_dip == cr.CUSP_SPEED_DIP and ic.tangent_dot == cr.CUSP_TANGENT_DOT


def test_cusp_count_matches_parametric_sweep():
    # quadratic: f on the circle z = -1/2 + e^{it}/2; cusps where |df/dt| vanishes
    f = CATALOG["quadratic"].map
    t = np.linspace(0, 2 * np.pi, 20000, endpoint=False)
    z = -0.5 + 0.5 * np.exp(1j * t)
    dz = 0.5j * np.exp(1j * t)
    sp = np.abs(pt.polyval(f.dp, z) * dz + np.conj(pt.polyval(f.dq, z) * dz))
    minima = (sp <= np.roll(sp, 1)) & (sp < np.roll(sp, -1)) & (sp < 1e-2 * np.median(sp))
    assert minima.sum() == 3


@settings(max_examples=10)
@given(st.integers(0, 2 ** 16))
def test_densify_keeps_tolerance(seed):
    rng = np.random.default_rng(seed)
    f = CATALOG["cubic-twos"].map
    cs = cr.trace(f, CATALOG["cubic-twos"].viewport, cells=128)
    step = rng.uniform(0.005, 0.05)
    d = cr.densify(f, cs, step)
    for p, closed in zip(d.polylines, d.closed):
        assert np.all(_j_ok(f, p))
        F = f(np.append(p, p[0]) if closed else p)
        assert np.abs(np.diff(F)).max() <= step * 1.01 + 1e-12
