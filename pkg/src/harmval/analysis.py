"""End-to-end analysis of one map: critical set, partitions and checks."""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import critical as cr
from . import partition as pa
from .catalog import CATALOG
from .cluster import ClusterSet, cluster_set
from .core import HarmonicPolynomial, function_spec
from .preimage import preimage_radius, preimages


@dataclass
class Analysis:
    f: object
    viewport: tuple
    range_viewport: tuple
    cell_n: int
    critical: cr.CriticalSet
    classified: list
    image: cr.ImageCurve
    cluster: ClusterSet
    pset: pa.PartitionSet
    range_grid: pa.PartitionGrid
    range_components: list
    domain_grid: Optional[pa.PartitionGrid] = None
    domain_viewport: Optional[tuple] = None
    domain_components: list = field(default_factory=list)
    fold_checks: list = field(default_factory=list)
    punctures: dict = field(default_factory=dict)
    seed: int = 0

    def range_valences(self):
        return {r.id: r.valence for r in self.range_components}

    def to_report(self):
        spec = None
        try:
            spec = function_spec(self.f)
        except ValueError:
            spec = {"name": self.f.name}
        return {
            "function": spec,
            "viewport": list(self.viewport),
            "range_viewport": list(self.range_viewport),
            "domain_viewport": list(self.domain_viewport) if self.domain_viewport else None,
            "grid": self.cell_n,
            "seed": self.seed,
            "critical_set": {
                "polylines": len(self.critical.polylines),
                "vertices": int(sum(len(p) for p in self.critical.polylines)),
                "isolated_points": [[z.real, z.imag] for z in self.critical.isolated_points],
                "diagnostics": list(self.critical.diagnostics),
            },
            "special_points": [
                {"location": [c.location.real, c.location.imag], "kind": c.kind, "ell": c.ell,
                 "local_model": None if c.local_model is None else
                 [c.local_model.j, c.local_model.k, c.local_model.ambiguous]}
                for c in self.classified],
            "cusps": [{"image": [c.image.real, c.image.imag],
                       "preimage": [c.preimage.real, c.preimage.imag]} for c in self.image.cusps],
            "cusp_thresholds": {"speed_dip": self.image.speed_dip,
                                "tangent_dot": self.image.tangent_dot},
            "cluster_set": self.cluster.to_dict(),
            "range_components": [r.to_dict() for r in self.range_components],
            "domain_components": [r.to_dict() for r in self.domain_components],
            "fold_arcs": [c.to_dict() for c in self.fold_checks],
            "punctures": self.punctures,
            "viewport_relative": "bounded/unbounded flags refer to the viewport",
        }


def adaptive_viewport(f, start=1.0, grow=1.5, limit=1e3):
    """Square domain viewport beyond which J keeps one sign (harmonic polynomials)."""
    R = start
    th = np.linspace(0, 2 * np.pi, 512, endpoint=False)
    while R < limit:
        rings = np.concatenate([r * np.exp(1j * th) for r in (R, 1.5 * R, 3 * R)])
        J = f.jacobian(rings)
        if np.all(J > 0) or np.all(J < 0):
            # include every isolated critical point as well
            iso = cr.isolated_points(f)
            if iso.size == 0 or np.max(np.abs(iso)) < R:
                break
        R *= grow
    R *= 1.25
    return (-R, R, -R, R)


def domain_viewport_for(f, viewport, range_viewport, rings=96, angles=512):
    """Viewport holding every preimage of the range viewport, never smaller than ``viewport``."""
    x0, x1, y0, y1 = range_viewport
    W = float(np.max(np.abs([x0 + 1j * y0, x0 + 1j * y1, x1 + 1j * y0, x1 + 1j * y1])))
    R_hi = preimage_radius(f, W)
    R0 = max(abs(v) for v in viewport)
    if R_hi is None or R_hi <= R0:
        return tuple(viewport)
    # tighten the coefficient bound: smallest sampled ring radius beyond which |f| > W
    rs = np.geomspace(R0, R_hi, rings)
    th = np.exp(2j * np.pi * np.arange(angles) / angles)
    mins = np.abs(f(rs[:, None] * th[None, :])).min(axis=1)
    bad = np.flatnonzero(mins <= 1.05 * W)
    R = R0 if bad.size == 0 else rs[min(bad[-1] + 1, rings - 1)]
    R *= 1.05
    return (-R, R, -R, R) if R > R0 else tuple(viewport)


def range_viewport_for(f, cs, image, margin=0.25):
    pts = [p for p in image.polylines if len(p)]
    if image.points.size:
        pts.append(image.points)
    if not pts:
        x0, x1, y0, y1 = cs.viewport
        w = f(np.array([x0 + 1j * y0, x1 + 1j * y1, x0 + 1j * y1, x1 + 1j * y0]))
        r = float(np.max(np.abs(w)))
        return (-r, r, -r, r)
    allp = np.concatenate(pts)
    allp = allp[np.isfinite(allp)]
    cx, cy = allp.real.mean(), allp.imag.mean()
    r = max(np.max(np.abs(allp.real - cx)), np.max(np.abs(allp.imag - cy)), 1e-3) * (1 + margin)
    return (cx - r, cx + r, cy - r, cy + r)


def _entry_for(f):
    e = CATALOG.get(getattr(f, "name", None))
    return e if e is not None and e.map is f else None


def analyze(f, viewport=None, range_viewport=None, cell_n=pa.DEFAULT_CELLS, seed=0,
            k=3, domain=True, folds=True, dilation=pa.DEFAULT_DILATION, cluster=None,
            per_polyline=6):
    """Run the whole pipeline for f; cached for hashable maps and identical settings."""
    key = (f, tuple(viewport) if viewport else None,
           tuple(range_viewport) if range_viewport else None,
           cell_n, seed, k, domain, folds, dilation, per_polyline)
    try:
        hit = _CACHE.get(key)
    except TypeError:
        key, hit = None, None
    if hit is not None and cluster is None:
        return hit
    res = _analyze(f, viewport, range_viewport, cell_n, seed, k, domain, folds, dilation,
                   cluster, per_polyline)
    if key is not None and cluster is None:
        if len(_CACHE) > 64:
            _CACHE.clear()
        _CACHE[key] = res
    return res


_CACHE = {}


def _analyze(f, viewport, range_viewport, cell_n, seed, k, domain, folds, dilation,
             cluster, per_polyline):
    entry = _entry_for(f)
    if viewport is None:
        viewport = entry.viewport if entry else adaptive_viewport(f)
    cs = cr.trace(f, viewport, cells=cell_n)
    image0 = cr.image_curve(f, cs)
    if range_viewport is None:
        range_viewport = entry.range_viewport if entry else range_viewport_for(f, cs, image0)
    rh = max(range_viewport[1] - range_viewport[0], range_viewport[3] - range_viewport[2]) / cell_n
    wx, wy = range_viewport[1] - range_viewport[0], range_viewport[3] - range_viewport[2]
    big = (range_viewport[0] - wx, range_viewport[1] + wx,
           range_viewport[2] - wy, range_viewport[3] + wy)
    cs = cr.densify(f, cs, rh, box=big)
    image = cr.image_curve(f, cs)
    classified = cr.classify(f, cs) if f.harmonic else []
    if cluster is None:
        cluster = cluster_set(f, entry, viewport=range_viewport)
    pset = pa.PartitionSet.build(image, cluster)
    rgrid = pa.build_range_partition(pset, range_viewport, cell_n, dilation)
    comps = pa.component_valences(f, rgrid, k=k, seed=seed)
    out = Analysis(f, tuple(viewport), tuple(range_viewport), cell_n, cs, classified, image,
                   cluster, pset, rgrid, comps, seed=seed)
    if domain:
        pre = []
        if isinstance(f, HarmonicPolynomial):
            for w in image.points:
                ps = preimages(f, w)
                if ps.verdict.kind == "finite":
                    pre.extend(ps.solutions.tolist())
        dview = viewport
        if entry is None and isinstance(f, HarmonicPolynomial):
            dview = domain_viewport_for(f, viewport, range_viewport)
        out.domain_viewport = tuple(dview)
        dgrid = pa.build_domain_partition(f, pset, rgrid, dview, cell_n, point_preimages=pre)
        out.domain_grid = dgrid
        out.domain_components = pa.domain_components(f, dgrid, rgrid, seed=seed)
        if cs.isolated_points.size:
            out.punctures = pa.puncture_analysis(f, rgrid, dgrid, cs.isolated_points,
                                                 out.domain_components)
    if folds and f.harmonic:
        out.fold_checks = pa.fold_arc_checks(f, cs, image, rgrid, out.range_valences(),
                                             per_polyline=per_polyline, special=classified,
                                             cluster=cluster)
    return out

