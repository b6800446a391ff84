import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from harmval import HarmonicPolynomial, Verdict
from harmval import analysis as an
from harmval import partition as pa
from harmval.catalog import CATALOG


def _a(name):
    return an.analyze(CATALOG[name].map)


def _counts(reports):
    return sorted(r.valence.count for r in reports)


def test_range_partition_examples():
    assert _a("quadratic").range_grid.n_components == 2
    assert _a("cubic-star").range_grid.n_components == 7
    g = pa.build_range_partition(pa.PartitionSet(), (-1, 1, -1, 1), cell_n=64)
    assert g.n_components == 1 and not g.barrier_mask.any()


def test_range_partition_errors():
    with pytest.raises(pa.PartitionError):
        pa.build_range_partition(None, (1, 1, 0, 1))
    pset = pa.PartitionSet(points=np.array([0j]))
    with pytest.raises(pa.PartitionError):
        pa.build_range_partition(pset, (-1, 1, -1, 1), cell_n=4, dilation=8)


def test_grid_labels_are_four_connected_components():
    from scipy import ndimage

    g = _a("cubic-twos").range_grid
    ref, n = ndimage.label(~g.barrier_mask, structure=pa.FOUR)
    assert n == g.n_components
    # same partition up to relabelling
    pairs = set(zip(ref[ref > 0].tolist(), g.labels[ref > 0].tolist()))
    assert len(pairs) == n


def test_barrier_covers_rasterized_set():
    a = _a("quadratic")
    g = a.range_grid
    pts = a.pset.samples(g.viewport, 0.25 * g.h)
    iy, ix, inside = g.cell_index(pts)
    assert np.all(g.barrier_mask[iy[inside], ix[inside]])


def test_component_valences_examples():
    assert _counts(_a("quadratic").range_components) == [2, 4]
    rc = _a("cubic-twos").range_components
    assert [r.valence.count for r in rc if not r.bounded] == [3]
    assert sorted({r.valence.count for r in rc if r.bounded}) == [5, 7]
    f = HarmonicPolynomial([0, 1], [])
    g = pa.build_range_partition(pa.PartitionSet(), (-1, 1, -1, 1), cell_n=64)
    (r,) = pa.component_valences(f, g)
    assert str(r.valence) == "finite(1)"
    with pytest.raises(ValueError):
        pa.component_valences(f, g, k=2)


@pytest.mark.parametrize("name", ["quadratic", "cubic-star", "cubic-twos", "polyunbdds"])
def test_no_constancy_violation(name):
    for r in _a(name).range_components:
        assert not r.constancy_violation, r.to_dict()
        assert len(r.sample_points) >= 3


def test_domain_partition_quadratic():
    a = _a("quadratic")
    rc = {r.id: r for r in a.range_components}
    for r in a.domain_components:
        assert not r.mapping_violation and not r.covering_violation
        if r.bounded:
            assert rc[r.mapped_to].bounded and r.n0 == 1
        else:
            assert not rc[r.mapped_to].bounded and r.n0 == 2


def test_domain_partition_identity():
    f = HarmonicPolynomial([0, 1], [])
    rg = pa.build_range_partition(pa.PartitionSet(), (-1, 1, -1, 1), cell_n=64)
    dg = pa.build_domain_partition(f, pa.PartitionSet(), rg, (-0.5, 0.5, -0.5, 0.5), cell_n=64)
    assert dg.n_components == 1
    assert pa.component_mapping(f, dg, 1, rg)[:2] == (1, 1)


def test_domain_partition_polyunbdds_barriers():
    a = _a("polyunbdds")
    g = a.domain_grid
    # the imaginary axis pulls back from the real-axis cluster set
    ys = np.linspace(-2, 2, 9)
    iy, ix, inside = g.cell_index(1j * ys)
    assert np.all(g.barrier_mask[iy[inside], ix[inside]])
    v = a.critical.vertices()
    v = v[a.range_grid.cell_index(a.f(v))[2]]  # barriers are viewport-relative
    iy, ix, inside = g.cell_index(v)
    assert np.all(g.barrier_mask[iy[inside], ix[inside]])


def test_covering_counts_agree_across_targets():
    for name in ("cubic-star", "cubic-twos"):
        for r in _a(name).domain_components:
            valid = [c for c in r.n0_per_target if c is not None]
            assert len(set(valid)) <= 1, (name, r.to_dict())


def test_fold_checks_cubic_twos():
    checks = _a("cubic-twos").fold_checks
    assert checks
    for c in checks:
        assert c.jump_ok and c.N1 == 1
        assert c.val_plus == c.N0 + 2 * c.N1 and c.val_minus == c.N0
    pairs = {(c.val_minus, c.val_plus) for c in checks}
    assert (3, 5) in pairs


def test_fold_checks_cubic_star():
    checks = _a("cubic-star").fold_checks
    assert checks and all(c.jump_ok for c in checks)
    assert (5, 7) in {(c.val_minus, c.val_plus) for c in checks}


def test_punctures():
    a = _a("cubic-star")
    comps = a.punctures["components"]
    assert sum(c["fill_in"] for c in comps) == 5
    assert len(a.punctures["points"]) >= 6
    q = _a("quadratic")
    empty = pa.puncture_analysis(q.f, q.range_grid, q.domain_grid, [], q.domain_components)
    assert empty == {"points": [], "components": []}


def test_join_probe_quadratic():
    a = _a("quadratic")
    g = a.domain_grid
    bounded = [r.id for r in a.domain_components if r.bounded]
    r = pa.join_probe(a.f, g, bounded[:1], a.critical)
    assert r["verdict"] == "univalent" and r["ortel_smith_ok"]
    # bounded pieces only touch the unbounded one
    with pytest.raises(ValueError, match="not adjacent"):
        pa.join_probe(a.f, g, bounded[:2], a.critical)
    with pytest.raises(ValueError):
        pa.join_probe(a.f, g, [], a.critical)


def test_join_probe_cubic_twos_distinct_images():
    a = _a("cubic-twos")
    g = a.domain_grid
    rep = {r.id: r for r in a.domain_components}
    ids = [i for i, r in rep.items() if r.n0 == 1]
    done = 0
    for i in ids:
        for j in ids:
            if i < j and pa._adjacent(g, i, j, 4).any():
                r = pa.join_probe(a.f, g, [i, j], a.critical, m=16)
                assert r["verdict"] == "univalent", (i, j, r)
                assert rep[i].mapped_to != rep[j].mapped_to
                done += 1
                if done == 4:
                    return
    assert done


def test_on_set_valence_fold_and_regular():
    f = CATALOG["quadratic"].map
    a = _a("quadratic")
    # a fold value of the deltoid: one double root plus the 2 outer preimages
    z = -0.5 + 0.5 * np.exp(0.4j)
    assert str(pa.on_set_valence(f, f(z))) == "finite(3)"
    assert str(pa.on_set_valence(f, 0.3)) == "finite(4)"
    assert isinstance(pa.on_set_valence(CATALOG["flatpoly"].map, 0), Verdict)
    assert a.range_components


@settings(max_examples=10)
@given(st.floats(0.1, 2 * np.pi - 0.1))
def test_on_set_valence_along_circle(t):
    f = CATALOG["quadratic"].map
    z = -0.5 + 0.5 * np.exp(1j * t)
    cusp = np.min(np.abs(np.angle(np.exp(1j * (t - np.array([0, 2, 4]) * np.pi / 3))))) < 0.05
    if not cusp:
        assert pa.on_set_valence(f, complex(f(z))).count == 3
