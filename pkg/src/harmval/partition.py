"""Range and domain partitions by the partitioning set, with per-component checks."""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from .catalog import clip_line
from .core import HarmonicPolynomial
from .preimage import Verdict, preimages, preimages_numeric, valence

DEFAULT_CELLS = 512
DEFAULT_DILATION = 1
DELTA_IMG = 2.0  # image proximity for the domain barrier, in range cells
FOLD_EPS = 6.0  # farthest side probe, in range cells
NEAR_S = 1e-4
RASTER_STEP = 0.25  # sample spacing along curves, in cells
MIN_CELLS = 16  # smaller components are treated as barrier slivers
FOUR = ndimage.generate_binary_structure(2, 1)
EIGHT = ndimage.generate_binary_structure(2, 2)


class PartitionError(ValueError):
    pass


# -- partitioning set ---------------------------------------------------------------

@dataclass
class PartitionSet:
    """f(S) together with C(f, inf): polylines, isolated points and lines."""

    polylines: list = field(default_factory=list)
    closed: list = field(default_factory=list)
    points: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))
    lines: list = field(default_factory=list)  # (point, direction)

    @classmethod
    def build(cls, image=None, cluster=None):
        ps = cls()
        if image is not None:
            ps.polylines = [np.asarray(p, dtype=complex) for p in image.polylines]
            ps.closed = list(image.closed)
            ps.points = np.asarray(image.points, dtype=complex).ravel()
        if cluster is not None:
            ps.lines = list(cluster.lines)
            if cluster.points.size:
                ps.points = np.concatenate([ps.points, cluster.points])
        return ps

    @property
    def empty(self):
        return not self.polylines and not self.lines and self.points.size == 0

    def samples(self, box, spacing):
        """Points along the set inside ``box`` spaced at most ``spacing`` apart."""
        out = []
        for line, closed in zip(self.polylines, self.closed):
            if len(line) == 0:
                continue
            a = line if closed else line[:-1]
            b = np.roll(line, -1) if closed else line[1:]
            if len(line) == 1:
                a = b = line
            out.append(_sample_segments(a, b, box, spacing))
        for p, d in self.lines:
            seg = clip_line(p, d, box)
            if seg is not None:
                out.append(_sample_segments(np.array([seg[0]]), np.array([seg[1]]), box, spacing))
        pts = self.points[_inside(self.points, box)] if self.points.size else self.points
        out.append(pts)
        return np.concatenate(out) if out else np.zeros(0, dtype=complex)


def _inside(z, box):
    x0, x1, y0, y1 = box
    return (z.real >= x0) & (z.real <= x1) & (z.imag >= y0) & (z.imag <= y1)


def _clip_segments(a, b, box):
    x0, x1, y0, y1 = box
    d = b - a
    t0 = np.zeros(a.shape)
    t1 = np.ones(a.shape)
    valid = np.isfinite(a) & np.isfinite(b)
    with np.errstate(all="ignore"):
        for p, q in ((-d.real, a.real - x0), (d.real, x1 - a.real),
                     (-d.imag, a.imag - y0), (d.imag, y1 - a.imag)):
            r = q / p
            valid &= ~((p == 0) & (q < 0))
            t0 = np.where(p < 0, np.maximum(t0, r), t0)
            t1 = np.where(p > 0, np.minimum(t1, r), t1)
    valid &= t0 <= t1
    return a + t0 * d, a + t1 * d, valid


def _sample_segments(a, b, box, spacing):
    a, b, ok = _clip_segments(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex), box)
    a, b = a[ok], b[ok]
    if a.size == 0:
        return np.zeros(0, dtype=complex)
    n = np.ceil(np.abs(b - a) / spacing).astype(int) + 1
    seg = np.repeat(np.arange(a.size), n)
    start = np.repeat(np.cumsum(n) - n, n)
    t = (np.arange(n.sum()) - start) / np.maximum(np.repeat(n, n) - 1, 1)
    return a[seg] + t * (b[seg] - a[seg])


# -- grids ------------------------------------------------------------------------------

@dataclass
class PartitionGrid:
    viewport: tuple
    cell_n: tuple  # (nx, ny)
    barrier_mask: np.ndarray  # [iy, ix]
    labels: np.ndarray  # 0 on barrier cells
    n_components: int
    raw_mask: Optional[np.ndarray] = None
    dilation: int = 0
    side: str = "range"

    @property
    def cell_size(self):
        x0, x1, y0, y1 = self.viewport
        return (x1 - x0) / self.cell_n[0], (y1 - y0) / self.cell_n[1]

    @property
    def h(self):
        return max(self.cell_size)

    def centers(self):
        x0, _, y0, _ = self.viewport
        hx, hy = self.cell_size
        xs = x0 + (np.arange(self.cell_n[0]) + 0.5) * hx
        ys = y0 + (np.arange(self.cell_n[1]) + 0.5) * hy
        return xs[None, :] + 1j * ys[:, None]

    def cell_index(self, w, clamp=False):
        """(iy, ix, inside) for points w."""
        w = np.asarray(w, dtype=complex)
        x0, _, y0, _ = self.viewport
        hx, hy = self.cell_size
        with np.errstate(invalid="ignore"):
            fx = np.floor((w.real - x0) / hx)
            fy = np.floor((w.imag - y0) / hy)
        inside = (fx >= 0) & (fx < self.cell_n[0]) & (fy >= 0) & (fy < self.cell_n[1])
        fx = np.nan_to_num(fx, nan=0.0, posinf=self.cell_n[0], neginf=-1)
        fy = np.nan_to_num(fy, nan=0.0, posinf=self.cell_n[1], neginf=-1)
        ix = np.clip(fx, 0, self.cell_n[0] - 1).astype(int)
        iy = np.clip(fy, 0, self.cell_n[1] - 1).astype(int)
        return iy, ix, inside

    def label_at(self, w, clamp=True):
        """Component label at w (0 on barrier; -1 outside unless clamped to the edge)."""
        iy, ix, inside = self.cell_index(w)
        lab = self.labels[iy, ix]
        if not clamp:
            lab = np.where(inside, lab, -1)
        return lab

    def nearest_label(self, w):
        """Label at w, taking the nearest labelled cell when w falls on a barrier."""
        iy, ix, _ = self.cell_index(w)
        _, (ny, nx) = self._edt()
        return self.labels[ny[iy, ix], nx[iy, ix]]

    def _edt(self):
        if getattr(self, "_edt_cache", None) is None:
            dist, idx = ndimage.distance_transform_edt(self.barrier_mask, return_indices=True)
            self._edt_cache = (dist, idx)
        return self._edt_cache

    def clearance(self):
        """Distance in cells from each free cell to the nearest barrier cell."""
        if getattr(self, "_clear_cache", None) is None:
            if self.barrier_mask.any():
                self._clear_cache = ndimage.distance_transform_edt(~self.barrier_mask)
            else:
                self._clear_cache = np.full(self.barrier_mask.shape, np.inf)
        return self._clear_cache

    def touches_edge(self, lab):
        L = self.labels
        return bool(np.any(L[0] == lab) or np.any(L[-1] == lab)
                    or np.any(L[:, 0] == lab) or np.any(L[:, -1] == lab))

    def simply_connected(self, lab):
        """Grid estimate: the complement of the component is one edge-touching piece."""
        if self.touches_edge(lab):
            return False
        rest = self.labels != lab
        _, n = ndimage.label(rest, structure=EIGHT)
        return n == 1

    def barrier_fraction(self):
        return float(self.barrier_mask.mean())


def _grid_shape(viewport, cell_n):
    x0, x1, y0, y1 = viewport
    if not (x1 > x0 and y1 > y0):
        raise PartitionError("empty viewport")
    if isinstance(cell_n, (tuple, list)):
        return int(cell_n[0]), int(cell_n[1])
    return int(cell_n), int(cell_n)


def _label(viewport, shape, raw, dilation, side, min_cells=MIN_CELLS):
    mask = raw
    if dilation > 0:
        mask = ndimage.binary_dilation(raw, structure=EIGHT, iterations=int(dilation))
    if mask.all():
        raise PartitionError("every cell is a barrier; refine the grid or reduce the dilation")
    labels, n = ndimage.label(~mask, structure=FOUR)
    if min_cells > 1 and n:
        # slivers below grid resolution (typically at cusps) join the barrier
        sizes = np.bincount(labels.ravel(), minlength=n + 1)
        small = np.flatnonzero(sizes < min_cells)
        small = small[small > 0]
        if small.size:
            mask = mask | np.isin(labels, small)
            if mask.all():
                raise PartitionError("every cell is a barrier; refine the grid")
            labels, n = ndimage.label(~mask, structure=FOUR)
    return PartitionGrid(tuple(viewport), shape, mask, labels, int(n), raw, int(dilation), side)


def build_range_partition(pset, viewport, cell_n=DEFAULT_CELLS, dilation=DEFAULT_DILATION):
    """Rasterize the partitioning set, dilate by ``dilation`` cells and label the rest."""
    if pset is None:
        pset = PartitionSet()
    nx, ny = _grid_shape(viewport, cell_n)
    x0, x1, y0, y1 = viewport
    h = min((x1 - x0) / nx, (y1 - y0) / ny)
    raw = np.zeros((ny, nx), dtype=bool)
    pts = pset.samples(viewport, RASTER_STEP * h)
    grid = PartitionGrid(tuple(viewport), (nx, ny), raw, raw, 0)
    if pts.size:
        iy, ix, inside = grid.cell_index(pts)
        raw[iy[inside], ix[inside]] = True
    return _label(viewport, (nx, ny), raw, dilation, "range")


def build_domain_partition(f, pset, range_grid, viewport, cell_n=DEFAULT_CELLS,
                           delta_img=DELTA_IMG, point_preimages=None, dilation=0):
    """Pull the partitioning set back to the domain.

    A domain cell is a barrier when f(center) lies within ``delta_img`` range
    cells of the partitioning set, when f(center) falls on a range barrier
    cell, or when its 4-neighbours land in different range components.
    Cells holding known preimages of isolated range points are barriers too.
    """
    nx, ny = _grid_shape(viewport, cell_n)
    proto = PartitionGrid(tuple(viewport), (nx, ny), np.zeros((ny, nx), bool), None, 0)
    Z = proto.centers()
    W = f(Z)
    delta = delta_img * range_grid.h
    rx0, rx1, ry0, ry1 = range_grid.viewport
    wx, wy = rx1 - rx0, ry1 - ry0
    big = (rx0 - wx, rx1 + wx, ry0 - wy, ry1 + wy)
    raw = np.zeros((ny, nx), dtype=bool)
    if pset is not None and not pset.empty:
        samp = pset.samples(big, 0.5 * delta)
        if samp.size:
            tree = cKDTree(np.column_stack([samp.real, samp.imag]))
            q = np.column_stack([W.real.ravel(), W.imag.ravel()])
            good = np.all(np.isfinite(q), axis=1)
            d = np.full(q.shape[0], np.inf)
            d[good], _ = tree.query(q[good], distance_upper_bound=delta)
            raw |= (d <= delta).reshape(ny, nx)
        for p, dvec in pset.lines:
            u = dvec / abs(dvec)
            raw |= np.abs(((W - p) * np.conj(u)).imag) <= delta
    iy, ix, inside = range_grid.cell_index(W)
    L = range_grid.labels[iy, ix]
    raw |= (L == 0) & inside
    diff_x = (L[:, :-1] != L[:, 1:]) & (L[:, :-1] > 0) & (L[:, 1:] > 0)
    diff_y = (L[:-1, :] != L[1:, :]) & (L[:-1, :] > 0) & (L[1:, :] > 0)
    raw[:, :-1] |= diff_x
    raw[:-1, :] |= diff_y
    raw |= ~np.isfinite(W)
    if point_preimages is not None and len(point_preimages):
        piy, pix, pin = proto.cell_index(np.asarray(point_preimages))
        raw[piy[pin], pix[pin]] = True
    grid = _label(viewport, (nx, ny), raw, dilation, "domain")
    grid.range_labels = L
    return grid


# -- component reports ------------------------------------------------------------

@dataclass
class ComponentReport:
    id: int
    side: str
    sample_points: list
    valence: Optional[Verdict] = None
    sample_valences: list = field(default_factory=list)
    mapped_to: Optional[int] = None
    n0: Optional[int] = None
    n0_per_target: list = field(default_factory=list)
    simply_connected_estimate: bool = False
    bounded: bool = True
    constancy_violation: bool = False
    mapping_violation: bool = False
    covering_violation: bool = False
    cells: int = 0

    def to_dict(self):
        return {
            "id": self.id, "side": self.side,
            "sample_points": [[round(z.real, 12), round(z.imag, 12)] for z in self.sample_points],
            "valence": str(self.valence) if self.valence is not None else None,
            "sample_valences": [str(v) for v in self.sample_valences],
            "mapped_to": self.mapped_to, "n0": self.n0,
            "n0_per_target": list(self.n0_per_target),
            "simply_connected_estimate": self.simply_connected_estimate,
            "bounded": self.bounded,
            "constancy_violation": self.constancy_violation,
            "mapping_violation": self.mapping_violation,
            "covering_violation": self.covering_violation,
            "cells": self.cells,
        }


def sample_component(grid, lab, k, rng, min_clear=None):
    """k points in component ``lab`` on cells with clearance > 2d (or the best available)."""
    if min_clear is None:
        min_clear = 2 * max(grid.dilation, 1)
    clear = grid.clearance()
    cells = np.argwhere(grid.labels == lab)
    if cells.size == 0:
        return []
    c = clear[cells[:, 0], cells[:, 1]]
    good = cells[c > min_clear]
    if len(good) == 0:
        good = cells[c >= c.max()]
    pick = good[rng.choice(len(good), size=min(k, len(good)), replace=len(good) < k)]
    hx, hy = grid.cell_size
    x0, _, y0, _ = grid.viewport
    jit = rng.uniform(-0.25, 0.25, size=(len(pick), 2))
    return [complex(x0 + (ix + 0.5 + jx) * hx, y0 + (iy + 0.5 + jy) * hy)
            for (iy, ix), (jx, jy) in zip(pick, jit)]


def default_valence_fn(f):
    return lambda w: valence(f, w)


FOLD_MERGE = 1e-4  # relative radius for merging a split double root at a fold


def on_set_valence(f, w, merge=FOLD_MERGE):
    """Valence at a point of f(S) for a harmonic polynomial.

    Rounding in f(z) moves a fold value off the fold by ~eps|f|, which
    splits its double preimage into two roots ~sqrt(eps|f|) apart. Pairs of
    solutions that are both near S and closer than ``merge`` are counted once.
    """
    ps = preimages(f, w)
    if ps.verdict.kind != "finite" or len(ps.solutions) < 2:
        return ps.verdict
    z = ps.solutions
    near = _near_critical(f, z, merge)
    used = np.zeros(len(z), dtype=bool)
    n = 0
    for i in range(len(z)):
        if used[i]:
            continue
        used[i] = True
        n += 1
        if near[i]:
            d = np.abs(z - z[i])
            used |= near & (d < merge * max(1.0, abs(z[i])))
    return Verdict.finite(n)


def component_valences(f, grid, k=3, seed=0, valence_fn=None):
    """Sample k interior points per range component and check constant valence."""
    if k < 3:
        raise ValueError("need at least 3 samples per component")
    vf = valence_fn or default_valence_fn(f)
    rng = np.random.default_rng(seed)
    out = []
    for lab in range(1, grid.n_components + 1):
        pts = sample_component(grid, lab, k, rng)
        vals = [vf(w) for w in pts]
        rep = ComponentReport(lab, "range", pts, vals[0] if vals else None, vals,
                              cells=int(np.count_nonzero(grid.labels == lab)))
        rep.constancy_violation = len({(v.kind, v.count) for v in vals}) > 1
        rep.bounded = not grid.touches_edge(lab)
        rep.simply_connected_estimate = rep.bounded and grid.simply_connected(lab)
        out.append(rep)
    return out


def all_preimages(f, w, box=None):
    """Preimages of w: certified for harmonic polynomials, grid-Newton in ``box`` otherwise."""
    if isinstance(f, HarmonicPolynomial):
        ps = preimages(f, w)
        return ps.solutions if ps.verdict.kind == "finite" else None
    from .catalog import CATALOG

    if box is None:
        entry = CATALOG.get(f.name)
        box = entry.extra.get("valence_box", entry.viewport) if entry else (-4, 4, -4, 4)
    return preimages_numeric(f, w, box).solutions


def _domain_label(domain_grid, z):
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if z.size == 0:
        return np.zeros(0, dtype=int)
    return domain_grid.nearest_label(z)


def component_mapping(f, domain_grid, lab, range_grid, ntargets=3, seed=0, box=None):
    """(range id, n0, per-target counts, mapping_ok) for domain component ``lab``."""
    rng = np.random.default_rng(seed + 7919 * lab)
    pts = sample_component(domain_grid, lab, max(ntargets, 3) * 4, rng)
    if not pts:
        return None, None, [], False
    ws = f(np.array(pts))
    rl, inside = range_grid.label_at(ws, clamp=False), range_grid.cell_index(ws)[2]
    good = (rl > 0) & inside
    if not good.any():
        return None, None, [], False
    ids = rl[good]
    rid = int(np.bincount(ids).argmax())
    mapping_ok = bool(np.all(ids == rid))
    counts = []
    for w in ws[good]:
        if len(counts) == ntargets:
            break
        z = all_preimages(f, w, box)
        if z is None:
            counts.append(None)
            continue
        # a polynomial preimage beyond the viewport cannot be attributed to a component
        if isinstance(f, HarmonicPolynomial) and not np.all(domain_grid.cell_index(z)[2]):
            continue
        counts.append(int(np.count_nonzero(_domain_label(domain_grid, z) == lab)))
    valid = [c for c in counts if c is not None]
    n0 = int(np.bincount(valid).argmax()) if valid else None
    return rid, n0, counts, mapping_ok


def domain_components(f, domain_grid, range_grid, ntargets=3, seed=0, box=None):
    out = []
    for lab in range(1, domain_grid.n_components + 1):
        rid, n0, counts, ok = component_mapping(f, domain_grid, lab, range_grid, ntargets, seed, box)
        rep = ComponentReport(lab, "domain", [], mapped_to=rid, n0=n0, n0_per_target=counts,
                              cells=int(np.count_nonzero(domain_grid.labels == lab)))
        rep.bounded = not domain_grid.touches_edge(lab)
        rep.mapping_violation = not ok
        rep.covering_violation = len(set(counts)) > 1
        out.append(rep)
    return out


# -- fold arcs ------------------------------------------------------------------------

@dataclass
class FoldArcCheck:
    arc_point: complex
    preimage: complex
    region_plus: int
    region_minus: int
    N0: int
    N1: int
    val_plus: Optional[int]
    val_minus: Optional[int]
    tangent_side_ok: bool
    jump_ok: bool
    polyline: int = -1
    index: int = -1

    def to_dict(self):
        d = dict(self.__dict__)
        d["arc_point"] = [self.arc_point.real, self.arc_point.imag]
        d["preimage"] = [self.preimage.real, self.preimage.imag]
        return d


def _near_critical(f, z, tol=NEAR_S):
    from .critical import jacobian_gradient

    J = f.jacobian(z)
    G = np.abs(jacobian_gradient(f, z))
    with np.errstate(all="ignore"):
        d = np.abs(J) / G
    return np.where(G > 0, d, np.where(J == 0, 0.0, np.inf)) < tol


def _curvature_normal(F, k, h, closed):
    """Unit vector from F[k] toward the centre of curvature, from chords of length >= 2h."""
    n = len(F)

    def walk(step):
        j = k
        for _ in range(n):
            j2 = j + step
            if closed:
                j2 %= n
            elif j2 < 0 or j2 >= n:
                return None
            j = j2
            if abs(F[j] - F[k]) >= 2 * h:
                return j
        return None

    a, b = walk(-1), walk(1)
    if a is None or b is None:
        return None, None
    t1 = (F[k] - F[a]) / abs(F[k] - F[a])
    t2 = (F[b] - F[k]) / abs(F[b] - F[k])
    dT = t2 - t1
    if abs(dT) < 1e-3:
        return None, None
    T = (t1 + t2) / abs(t1 + t2) if abs(t1 + t2) > 0 else t2
    return dT / abs(dT), T


def _first_label(grid, w0, direction, max_cells, step=0.5):
    """First component label met walking from w0 along ``direction`` (in cells)."""
    s = step
    while s <= max_cells:
        lab = int(grid.label_at(w0 + s * grid.h * direction, clamp=False))
        if lab != 0:
            return lab, s
        s += step
    return 0, s


def fold_arc_checks(f, cs, image, range_grid, valences, per_polyline=6, special=(),
                    cluster=None, box=None, eps_cells=FOLD_EPS, skip=5):
    """Verify the valence jump across sampled fold arcs of f(S).

    ``valences`` maps range labels to Verdicts. Omega_plus is taken on the
    side of f(S) away from its centre of curvature.
    """
    out = []
    h = range_grid.h
    specials = np.array([getattr(c, "location", c) for c in special], dtype=complex)
    cusp_idx = {(c.polyline, c.index) for c in image.cusps}
    for li, (line, F) in enumerate(zip(cs.polylines, image.polylines)):
        n = len(line)
        closed = cs.closed[li]
        if n < 2 * skip + 3:
            continue
        bad = np.zeros(n, dtype=bool)
        for (pl, k) in cusp_idx:
            if pl == li:
                for j in range(k - skip, k + skip + 1):
                    if closed or 0 <= j < n:
                        bad[j % n] = True
        if specials.size:
            near = np.min(np.abs(line[:, None] - specials[None, :]), axis=1) < skip * cs.resolution
            bad |= near
        if not closed:
            bad[:skip] = True
            bad[-skip:] = True
        inside = _inside(F, range_grid.viewport)
        cand = np.flatnonzero(~bad & inside)
        if cand.size == 0:
            continue
        picks = cand[np.linspace(0, cand.size - 1, min(per_polyline * 3, cand.size)).astype(int)]
        taken = 0
        for k in picks:
            if taken >= per_polyline:
                break
            w0 = F[k]
            if cluster is not None and cluster.lines:
                dist = min(abs(((w0 - p) * np.conj(d / abs(d))).imag) for p, d in cluster.lines)
                if dist < 4 * h:
                    continue
            Nvec, T = _curvature_normal(F, k, h, closed)
            if Nvec is None:
                continue
            # a lone fold curve leaves a band about d + 1 cells wide on each side
            reach = min(eps_cells, range_grid.dilation + 2.0)
            lp, ep = _first_label(range_grid, w0, -Nvec, reach)
            lm, em = _first_label(range_grid, w0, Nvec, reach)
            if lp <= 0 or lm <= 0 or lp == lm:
                continue
            e = max(ep, em)
            z = all_preimages(f, w0, box)
            if z is None:
                continue
            on = _near_critical(f, z) if z.size else np.zeros(0, bool)
            N1 = int(np.count_nonzero(on))
            N0 = int(z.size - N1)
            vp, vm = valences.get(lp), valences.get(lm)
            vp = vp.count if vp is not None and vp.kind == "finite" else None
            vm = vm.count if vm is not None and vm.kind == "finite" else None
            tl = [int(range_grid.label_at(w0 + s * e * h * T, clamp=False)) for s in (1, -1)]
            tangent_ok = all(t != lm for t in tl)
            jump_ok = vp is not None and vm is not None and vp == N0 + 2 * N1 and vm == N0
            out.append(FoldArcCheck(complex(w0), complex(line[k]), lp, lm, N0, N1, vp, vm,
                                    tangent_ok, bool(jump_ok), li, int(k)))
            taken += 1
    return out


# -- punctures and joins ----------------------------------------------------------------

def puncture_analysis(f, range_grid, domain_grid, isolated_pts, domain_reports, box=None):
    """Preimages of images of isolated critical points that puncture a single domain component."""
    isolated_pts = np.atleast_1d(np.asarray(isolated_pts, dtype=complex))
    if isolated_pts.size == 0:
        return {"points": [], "components": []}
    n0 = {r.id: r.n0 for r in domain_reports}
    blobs, _ = ndimage.label(domain_grid.barrier_mask, structure=EIGHT)
    per_comp = {}
    points = []
    for zc in isolated_pts:
        w0 = complex(f(zc))
        z = all_preimages(f, w0, box)
        if z is None:
            continue
        for zeta in z:
            iy, ix, inside = domain_grid.cell_index(np.array([zeta]))
            if not inside[0]:
                continue
            b = blobs[iy[0], ix[0]]
            if b == 0:
                labs = {int(domain_grid.labels[iy[0], ix[0]])}
            else:
                ring = ndimage.binary_dilation(blobs == b, structure=EIGHT) & ~domain_grid.barrier_mask
                labs = set(np.unique(domain_grid.labels[ring]).tolist()) - {0}
            on_s = bool(_near_critical(f, np.array([zeta]))[0])
            entry = {"w0": [w0.real, w0.imag], "preimage": [zeta.real, zeta.imag],
                     "neighbour_labels": sorted(labs), "on_S": on_s}
            if len(labs) == 1:
                lab = labs.pop()
                entry["punctures"] = lab
                c = per_comp.setdefault(lab, {"component": lab, "punctures": 0, "off_S": True})
                c["punctures"] += 1
                c["off_S"] &= not on_s
            points.append(entry)
    comps = []
    for lab, c in sorted(per_comp.items()):
        c["n0"] = n0.get(lab)
        c["fill_in"] = bool(c["n0"] is not None and c["punctures"] == c["n0"] and c["off_S"])
        comps.append(c)
    return {"points": points, "components": comps}


def _adjacent(grid, a, b, gap):
    ma = ndimage.binary_dilation(grid.labels == a, structure=EIGHT, iterations=gap)
    mb = ndimage.binary_dilation(grid.labels == b, structure=EIGHT, iterations=gap)
    return ma & mb & grid.barrier_mask


def join_probe(f, domain_grid, ids, cs, m=64, seed=0, box=None, image_tol=1e-6):
    """Test univalence on the union of adjacent domain components and their shared bands."""
    ids = sorted(set(int(i) for i in ids))
    if not ids:
        raise ValueError("no components given")
    gap = 2 * max(domain_grid.dilation, 1) + 2
    merged = np.isin(domain_grid.labels, ids)
    bands = np.zeros_like(merged)
    # components must form a connected adjacency graph
    seen = {ids[0]}
    frontier = [ids[0]]
    while frontier:
        a = frontier.pop()
        for b in ids:
            if b in seen:
                continue
            band = _adjacent(domain_grid, a, b, gap)
            if band.any():
                bands |= band
                seen.add(b)
                frontier.append(b)
    if len(seen) != len(ids):
        raise ValueError(f"components {sorted(set(ids) - seen)} are not adjacent to the rest")
    result = {"components": ids, "hypothesis_ok": True, "verdict": None, "counts": [],
              "witness": None, "ortel_smith_ok": True}
    if bands.any():
        near = ndimage.binary_dilation(bands, structure=EIGHT, iterations=2)
        v = cs.vertices()
        iy, ix, inside = domain_grid.cell_index(v)
        if np.any(near[iy[inside], ix[inside]]):
            result["hypothesis_ok"] = False
            result["verdict"] = "hypothesis-violated"
    region = merged | bands
    rng = np.random.default_rng(seed)
    pts = []
    for lab in ids:
        pts += sample_component(domain_grid, lab, max(3, m // len(ids)), rng)
    counts = []
    for z0 in pts:
        w = complex(f(z0))
        z = all_preimages(f, w, box)
        if z is None:
            continue
        iy, ix, inside = domain_grid.cell_index(z)
        hit = z[inside & region[iy, ix]]
        counts.append(int(hit.size))
        if hit.size > 1 and result["witness"] is None:
            far = hit[np.abs(hit - z0) > image_tol]
            if far.size:
                result["witness"] = [[z0.real, z0.imag], [far[0].real, far[0].imag]]
    result["counts"] = counts
    N = f.N if isinstance(f, HarmonicPolynomial) else None
    result["ortel_smith_ok"] = set(counts) <= ({1, N} if N else {1})
    if result["verdict"] is None:
        result["verdict"] = "univalent" if counts and all(c == 1 for c in counts) else "not-univalent"
    return result
