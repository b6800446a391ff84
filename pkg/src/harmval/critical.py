"""Critical set tracing, special-point classification and image curves."""

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from skimage import measure

from . import polytools as pt
from .core import HarmonicPolynomial, psi

MIN_CELLS = 8
GRID_OFFSET = np.pi * 1e-4  # fraction of a cell; keeps grid nodes off special points
UNIMODULAR_TOL = 1e-6
F2_TOL = 1e-6
CUSP_SPEED_DIP = 1e-3
CUSP_TANGENT_DOT = -0.5
CUSP_NEIGHBOR = 1e-4  # offset of the refinement points around an inserted cusp, in cells


class TraceError(ValueError):
    pass


# -- Jacobian as a real bivariate polynomial -----------------------------------

@dataclass(frozen=True)
class RealBivariate:
    """Real polynomial sum C[i, j] x**i y**j."""

    C: np.ndarray

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return np.polynomial.polynomial.polyval2d(x, y, self.C)

    @property
    def degree(self):
        nz = np.argwhere(np.abs(self.C) > 0)
        return int(nz.sum(axis=1).max()) if nz.size else -1


def _z_powers_xy(c):
    """Complex polynomial c(z) rewritten as coefficients A[i, j] of x**i y**j."""
    from math import comb

    n = len(c)
    A = np.zeros((max(n, 1), max(n, 1)), dtype=complex)
    for k, ck in enumerate(c):
        for j in range(k + 1):
            A[k - j, j] += ck * comb(k, j) * (1j) ** j
    return A


def _mul2d(A, B):
    from scipy.signal import convolve2d

    return convolve2d(A, B)


def jacobian_field(f):
    """J(x, y) = |p'|^2 - |q'|^2 expanded as a real polynomial in x and y."""
    A = _z_powers_xy(f.dp)
    B = _z_powers_xy(f.dq)
    PA, PB = _mul2d(A, np.conj(A)), _mul2d(B, np.conj(B))
    n = max(PA.shape[0], PB.shape[0])
    J = np.zeros((n, n), dtype=complex)
    J[: PA.shape[0], : PA.shape[1]] += PA
    J[: PB.shape[0], : PB.shape[1]] -= PB
    C = J.real.copy()
    C[np.abs(C) < 1e-15 * max(np.abs(C).max(), 1.0)] = 0
    return RealBivariate(C)


def jacobian_gradient(f, z):
    """Gradient J_x + i J_y of the Jacobian at z."""
    z = np.asarray(z, dtype=complex)
    if isinstance(f, HarmonicPolynomial):
        a = pt.polyval(f.dp, z)
        b = pt.polyval(f.dq, z)
        a1 = pt.polyval(pt.deriv(f.dp), z)
        b1 = pt.polyval(pt.deriv(f.dq), z)
        return 2 * (a * np.conj(a1) - b * np.conj(b1))
    h = 1e-6 * np.maximum(1.0, np.abs(z))
    jx = (f.jacobian(z + h) - f.jacobian(z - h)) / (2 * h)
    jy = (f.jacobian(z + 1j * h) - f.jacobian(z - 1j * h)) / (2 * h)
    return jx + 1j * jy


def jacobian_scale(f, z):
    a, b = f.wirtinger(z)
    return np.abs(a) ** 2 + np.abs(b) ** 2 + 1.0


def project_to_critical(f, z, iters=8):
    """Newton steps along grad J toward J = 0."""
    z = np.array(z, dtype=complex)
    with np.errstate(all="ignore"):
        for _ in range(iters):
            J = f.jacobian(z)
            G = jacobian_gradient(f, z)
            step = J * G / np.abs(G) ** 2
            step[~np.isfinite(step)] = 0
            z = z - step
    return z


# -- tracing --------------------------------------------------------------------

@dataclass
class CriticalSet:
    polylines: list
    closed: list
    isolated_points: np.ndarray
    viewport: tuple
    resolution: float
    diagnostics: list = field(default_factory=list)

    @property
    def empty(self):
        return not self.polylines and self.isolated_points.size == 0

    def vertices(self):
        if not self.polylines:
            return np.zeros(0, dtype=complex)
        return np.concatenate(self.polylines)


def _grid(viewport, resolution):
    x0, x1, y0, y1 = viewport
    nx = int(round((x1 - x0) / resolution))
    ny = int(round((y1 - y0) / resolution))
    if nx < MIN_CELLS or ny < MIN_CELLS:
        raise TraceError(f"resolution too coarse: {nx}x{ny} cells (need >= {MIN_CELLS} per side)")
    hx = (x1 - x0) / nx
    hy = (y1 - y0) / ny
    xs = x0 + (np.arange(nx + 1) + GRID_OFFSET) * hx
    ys = y0 + (np.arange(ny + 1) + GRID_OFFSET) * hy
    return xs, ys, hx, hy


def _bisect_edges(Jfun, za, zb, Ja, iters=60):
    """Bisection for J = 0 on segments [za, zb] where J(za) = Ja and J changes sign."""
    sa = np.sign(Ja)
    lo, hi = za.copy(), zb.copy()
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        sm = np.sign(Jfun(mid))
        same = sm == sa
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
        if np.all(np.abs(hi - lo) <= 4e-16 * np.maximum(1.0, np.abs(lo))):
            break
    Jl, Jh = np.abs(Jfun(lo)), np.abs(Jfun(hi))
    return np.where(Jl <= Jh, lo, hi)


def _drop_duplicates(line, tol, is_closed):
    keep = np.ones(len(line), dtype=bool)
    keep[1:] = np.abs(np.diff(line)) > tol
    if is_closed and len(line) > 1 and abs(line[-1] - line[0]) <= tol:
        keep[-1] = False
    return line[keep]


def _collapse_runs(idx, score, n, is_closed):
    """Reduce runs of adjacent indices to the member with the smallest score."""
    idx = sorted(idx)
    if not idx:
        return []
    runs = [[idx[0]]]
    for k in idx[1:]:
        if k - runs[-1][-1] <= 2:
            runs[-1].append(k)
        else:
            runs.append([k])
    if is_closed and len(runs) > 1 and runs[0][0] + n - runs[-1][-1] <= 2:
        runs[0] = runs.pop() + runs[0]
    return [min(r, key=lambda k: score[k]) for r in runs]


def trace(f, viewport, resolution=None, cells=512, isolated=True):
    """Trace S = {J_f = 0} as polylines by marching squares plus edge bisection.

    Harmonic polynomials also get their isolated critical points (common
    zeros of p' and q' with |psi| != 1) and, for maps with harmonic
    structure, extra vertices at harmonic cusps (zeros of Re omega).
    """
    x0, x1, y0, y1 = viewport
    if not (x1 > x0 and y1 > y0):
        raise TraceError("empty viewport")
    if resolution is None:
        resolution = max(x1 - x0, y1 - y0) / cells
    xs, ys, hx, hy = _grid(viewport, resolution)
    Z = xs[None, :] + 1j * ys[:, None]
    with np.errstate(all="ignore"):
        J = f.jacobian(Z)
    J = np.where(np.isfinite(J), J, np.nan)
    diagnostics = []
    polylines, closed = [], []
    if np.nanmax(J) > 0 and np.nanmin(J) < 0:
        contours = measure.find_contours(J, 0.0)
    else:
        contours = []
    Jfun = f.jacobian
    for c in contours:
        r, col = c[:, 0], c[:, 1]
        is_closed = len(c) > 2 and np.allclose(c[0], c[-1])
        if is_closed:
            r, col = r[:-1], col[:-1]
        zr = x0 + (col + GRID_OFFSET) * hx + 1j * (y0 + (r + GRID_OFFSET) * hy)
        # each vertex sits on a grid edge; bisect along it
        ri, ci = np.floor(r).astype(int), np.floor(col).astype(int)
        on_row = np.isclose(r, np.round(r))
        ri = np.where(on_row, np.round(r).astype(int), ri)
        ci_row = np.clip(ci, 0, len(xs) - 2)
        ri_col = np.clip(ri, 0, len(ys) - 2)
        za = np.where(on_row, xs[ci_row] + 1j * ys[np.clip(ri, 0, len(ys) - 1)],
                      xs[np.clip(np.round(col).astype(int), 0, len(xs) - 1)] + 1j * ys[ri_col])
        zb = np.where(on_row, xs[ci_row + 1] + 1j * ys[np.clip(ri, 0, len(ys) - 1)],
                      xs[np.clip(np.round(col).astype(int), 0, len(xs) - 1)] + 1j * ys[ri_col + 1])
        with np.errstate(all="ignore"):
            Ja = Jfun(za)
            Jb = Jfun(zb)
        ok = np.sign(Ja) != np.sign(Jb)
        zr = zr.astype(complex)
        if ok.any():
            zr[ok] = _bisect_edges(Jfun, za[ok], zb[ok], Ja[ok])
        if (~ok).any():
            # tangential touch of a grid edge: no bracket, project instead
            zp = project_to_critical(f, zr[~ok])
            near = np.abs(zp - zr[~ok]) < resolution
            zr[np.flatnonzero(~ok)[near]] = zp[near]
        zr = _drop_duplicates(zr, 1e-6 * resolution, is_closed)
        if len(zr) < 2:
            continue
        polylines.append(zr)
        closed.append(bool(is_closed))
    iso = np.zeros(0, dtype=complex)
    if isolated and isinstance(f, HarmonicPolynomial):
        iso = isolated_points(f)
        m = (iso.real >= x0) & (iso.real <= x1) & (iso.imag >= y0) & (iso.imag <= y1)
        iso = iso[m]
    # tangential zero sweep: nodes with tiny |J| and no sign change nearby
    finite = np.isfinite(J)
    if finite.any():
        scale = np.nanmax(np.abs(J))
        tiny = np.abs(J) < 1e-8 * scale
        if tiny.any() and not contours:
            diagnostics.append("tangential zero candidates of J (no sign change); "
                               "resolve manually or via isolated-point solver")
    cs = CriticalSet(polylines, closed, iso, tuple(viewport), float(resolution), diagnostics)
    if f.harmonic:
        cs = insert_cusps(f, cs)
    return cs


def densify(f, cs, max_image_step, passes=8, box=None):
    """Subdivide polyline segments until consecutive images are within ``max_image_step``.

    With ``box`` given, segments whose two images lie beyond the same side
    of it are left alone.
    """
    new_lines = []
    for line, is_closed in zip(cs.polylines, cs.closed):
        for _ in range(passes):
            line, done = _densify_once(f, line, is_closed, max_image_step, box)
            if done:
                break
        new_lines.append(line)
    return replace(cs, polylines=new_lines)


def _densify_once(f, line, is_closed, max_image_step, box=None):
    if len(line) < 2:
        return line, True
    ends = np.append(line[1:], line[0]) if is_closed else line[1:]
    starts = line if is_closed else line[:-1]
    fa, fb = f(starts), f(ends)
    with np.errstate(invalid="ignore"):
        nsub = np.ceil(np.abs(fb - fa) / max_image_step).astype(float)
    nsub = np.where(np.isfinite(nsub), np.clip(nsub, 1, 64), 1).astype(int)
    # too short to split in floating point
    nsub[np.abs(ends - starts) < 1e-12 * (1 + np.abs(starts))] = 1
    if box is not None:
        x0, x1, y0, y1 = box
        with np.errstate(invalid="ignore"):
            away = ((fa.real < x0) & (fb.real < x0)) | ((fa.real > x1) & (fb.real > x1)) \
                | ((fa.imag < y0) & (fb.imag < y0)) | ((fa.imag > y1) & (fb.imag > y1))
        nsub[away] = 1
    if np.all(nsub == 1):
        return line, True
    pieces = []
    for a, b, n in zip(starts, ends, nsub):
        pieces.append(np.array([a]))
        if n > 1:
            t = np.arange(1, n) / n
            pieces.append(project_to_critical(f, a + t * (b - a)))
    if not is_closed:
        pieces.append(np.array([line[-1]]))
    return np.concatenate(pieces), False


# -- harmonic structure along arcs ---------------------------------------------

def _unit_tangents(f, line, is_closed):
    """Unit tangent of S at each vertex: i * grad J, oriented along the polyline."""
    G = jacobian_gradient(f, line)
    t = 1j * G
    with np.errstate(all="ignore"):
        t = t / np.abs(t)
    if len(line) > 1:
        if is_closed:
            d = np.roll(line, -1) - np.roll(line, 1)
        else:
            d = np.gradient(line)
        flip = (t * np.conj(d)).real < 0
        t = np.where(flip, -t, t)
        bad = ~np.isfinite(t)
        with np.errstate(all="ignore"):
            t[bad] = (d / np.abs(d))[bad]
    return t


def arc_omega(f, line, is_closed):
    """phi (continuous branch of arg psi) and omega = h' z' exp(-i phi / 2) per vertex.

    For closed polylines also returns the sign factor (+1/-1) relating the
    branch of exp(-i phi/2) after one loop to the starting branch.
    """
    hp = f.hprime(line)
    gp = f.gprime(line)
    with np.errstate(all="ignore"):
        ps = hp / gp
    phi = np.unwrap(np.angle(ps))
    t = _unit_tangents(f, line, is_closed)
    omega = hp * t * np.exp(-0.5j * phi)
    wrap_sign = 1.0
    if is_closed and len(line) > 1:
        step = np.angle(np.exp(1j * (np.angle(ps[0]) - phi[-1])))
        m = int(np.round((phi[-1] + step - phi[0]) / (2 * np.pi)))
        wrap_sign = -1.0 if m % 2 else 1.0
    return phi, omega, wrap_sign


def _sign_change_pairs(re_omega, is_closed, wrap_sign):
    s = np.sign(re_omega)
    k = np.flatnonzero(s[:-1] * s[1:] < 0)
    pairs = [(int(i), int(i) + 1) for i in k]
    if is_closed and len(s) > 1 and s[-1] * s[0] * wrap_sign < 0:
        pairs.append((len(s) - 1, 0))
    return pairs


def insert_cusps(f, cs):
    """Insert vertices at zeros of Re omega (harmonic cusps) plus two close neighbours."""
    new_lines = []
    for line, is_closed in zip(cs.polylines, cs.closed):
        if len(line) < 3:
            new_lines.append(line)
            continue
        _, omega, wrap = arc_omega(f, line, is_closed)
        pairs = _sign_change_pairs(omega.real, is_closed, wrap)
        if not pairs:
            new_lines.append(line)
            continue
        inserts = {}
        for i, j in pairs:
            zc = _locate_cusp(f, line, i, j, is_closed)
            if zc is None:
                continue
            d = line[j] - line[i]
            u = d / abs(d) if abs(d) > 0 else 1.0
            eps = CUSP_NEIGHBOR * cs.resolution
            trio = project_to_critical(f, np.array([zc - eps * u, zc, zc + eps * u]))
            inserts[i] = trio
        out = []
        for k, z in enumerate(line):
            out.append(z)
            if k in inserts:
                out.extend(inserts[k])
        new_lines.append(np.array(out, dtype=complex))
    return replace(cs, polylines=new_lines)


def _re_omega_at(f, z, u, phi_ref):
    """Re omega at points of S using the analytic tangent oriented along u."""
    hp = f.hprime(z)
    gp = f.gprime(z)
    t = 1j * jacobian_gradient(f, z)
    t = t / np.abs(t)
    t = np.where((t * np.conj(u)).real < 0, -t, t)
    ph = np.angle(hp / gp)
    ph = ph + 2 * np.pi * np.round((phi_ref - ph) / (2 * np.pi))
    return (hp * t * np.exp(-0.5j * ph)).real


def _locate_cusp(f, line, i, j, is_closed):
    a, b = line[i], line[j]
    d = b - a
    if abs(d) == 0:
        return None
    u = d / abs(d)
    phi_ref = float(np.angle(f.hprime(a) / f.gprime(a)))
    with np.errstate(all="ignore"):
        ends = project_to_critical(f, np.array([a, b]))
        ra, rb = _re_omega_at(f, ends, u, phi_ref)
        if not (np.isfinite(ra) and np.isfinite(rb)) or np.sign(ra) == np.sign(rb):
            return None
        lo, hi = 0.0, 1.0
        for _ in range(55):
            mid = 0.5 * (lo + hi)
            zm = project_to_critical(f, np.array([a + mid * d]))
            rm = _re_omega_at(f, zm, u, phi_ref)[0]
            if np.sign(rm) == np.sign(ra):
                lo = mid
            else:
                hi = mid
    return project_to_critical(f, np.array([a + 0.5 * (lo + hi) * d]))[0]


# -- isolated points and classification ---------------------------------------

def common_critical_points(f):
    """Common zeros of p' and q' with |psi| (reduced) at each."""
    _, _, common = f.psi_parts()
    if common.size < 2:
        return np.zeros(0, dtype=complex), np.zeros(0)
    z = pt.roots(common)
    with np.errstate(all="ignore"):
        mod = np.abs(psi(f, z))
    mod = np.where(np.isnan(mod), np.inf, mod)
    return z, mod


def isolated_points(f):
    """Isolated critical points (the set N): common zeros of p', q' with |psi| != 1."""
    z, mod = common_critical_points(f)
    return z[np.abs(mod - 1.0) > UNIMODULAR_TOL]


@dataclass(frozen=True)
class LocalModel:
    j: int
    k: int
    ambiguous: bool = False


def local_model(ell, kind):
    """Topological local model z^j, conj(z)^k at a point of the fold locus."""
    if kind not in ("regular_fold", "F2", "F1"):
        raise ValueError(f"no local model for kind {kind!r}")
    if ell < 0:
        raise ValueError("ell must be nonnegative")
    if kind == "F1":
        if ell % 2 == 0:
            return LocalModel(ell + 1, ell + 3, True)
        return LocalModel(ell + 2, ell + 2)
    if ell % 2 == 0:
        return LocalModel(ell + 1, ell + 1)
    return LocalModel(ell + 2, ell, True)


@dataclass(frozen=True)
class ClassifiedCriticalPoint:
    location: complex
    kind: str  # "N" | "F1" | "F2" | "F3" | "regular_fold"
    ell: int
    local_model: Optional[LocalModel] = None
    arc_param: Optional[tuple] = None


def zero_order(c, z0, tol=F2_TOL):
    """Order of z0 as a zero of the polynomial c."""
    order = 0
    d = pt.strip(c)
    scale = max(np.linalg.norm(d), 1e-300)
    while d.size and abs(pt.polyval(d, z0)) <= tol * scale * max(1.0, abs(z0)) ** (d.size - 1):
        order += 1
        d = pt.deriv(d)
    return order


def classify(f, cs):
    """Lyzzaik classification of special critical points.

    F1 at sign changes of Re omega along traced arcs; F2 at common zeros of
    p', q' on the fold locus that are not F1; F3 where psi' = 0 on S; N at
    isolated critical points.
    """
    out = []
    diagnostics = []
    for li, (line, is_closed) in enumerate(zip(cs.polylines, cs.closed)):
        if len(line) < 3 or not f.harmonic:
            continue
        phi, omega, wrap = arc_omega(f, line, is_closed)
        jumps = np.abs(np.diff(phi))
        if np.any(jumps > np.pi / 2):
            diagnostics.append(f"phi branch jump > pi/2 on polyline {li}")
        re = omega.real
        scale = np.median(np.abs(re)) if re.size else 1.0
        hits = []
        for k in range(len(line)):
            if is_closed:
                prev, nxt = re[k - 1], re[(k + 1) % len(re)]
                if k == 0:
                    prev = prev * wrap
                if k == len(re) - 1:
                    nxt = nxt * wrap
            else:
                if k == 0 or k == len(re) - 1:
                    continue
                prev, nxt = re[k - 1], re[k + 1]
            if abs(re[k]) < 1e-6 * scale and prev * nxt < 0:
                hits.append(k)
        for k in _collapse_runs(hits, np.abs(re), len(re), is_closed):
            ell = zero_order(f.dp, line[k]) if isinstance(f, HarmonicPolynomial) else 0
            out.append(ClassifiedCriticalPoint(complex(line[k]), "F1", ell,
                                               local_model(ell, "F1"), (li, k)))
    if isinstance(f, HarmonicPolynomial):
        z, mod = common_critical_points(f)
        f1_locs = np.array([c.location for c in out], dtype=complex)
        for zi, mi in zip(z, mod):
            ell = zero_order(f.dp, zi)
            if abs(mi - 1.0) > UNIMODULAR_TOL:
                out.append(ClassifiedCriticalPoint(complex(zi), "N", ell))
            elif not np.any(np.abs(f1_locs - zi) < 2 * cs.resolution):
                out.append(ClassifiedCriticalPoint(complex(zi), "F2", ell, local_model(ell, "F2")))
        for zi in f3_points(f):
            out.append(ClassifiedCriticalPoint(complex(zi), "F3", zero_order(f.dp, zi)))
    cs.diagnostics.extend(d for d in diagnostics if d not in cs.diagnostics)
    x0, x1, y0, y1 = cs.viewport
    keep = [c for c in out if x0 <= c.location.real <= x1 and y0 <= c.location.imag <= y1]
    return keep


def f3_points(f):
    """Zeros of psi' lying on the fold locus |psi| = 1."""
    num, den, _ = f.psi_parts()
    if den.size == 0 or num.size == 0:
        return np.zeros(0, dtype=complex)
    P = np.polynomial.polynomial

    def d(c):
        dc = pt.deriv(c)
        return dc if dc.size else np.zeros(1, dtype=complex)

    w = pt.strip(P.polysub(P.polymul(d(num), den), P.polymul(num, d(den))))
    if w.size < 2:
        return np.zeros(0, dtype=complex)
    z = pt.roots(w)
    with np.errstate(all="ignore"):
        mod = np.abs(psi(f, z))
    return z[np.abs(mod - 1.0) < UNIMODULAR_TOL]


def check_isolation(points, resolution):
    """Pairwise separation of special points; returns offending pairs."""
    locs = np.array([p.location for p in points], dtype=complex)
    bad = []
    for i in range(len(locs)):
        for j in range(i + 1, len(locs)):
            if abs(locs[i] - locs[j]) <= 2 * resolution:
                bad.append((i, j))
    return bad


# -- image curve ------------------------------------------------------------------

@dataclass
class Cusp:
    image: complex
    preimage: complex
    tangent_jump: bool
    polyline: int
    index: int


@dataclass
class ImageCurve:
    polylines: list
    closed: list
    cusps: list
    points: np.ndarray  # images of isolated critical points
    speed_dip: float = CUSP_SPEED_DIP
    tangent_dot: float = CUSP_TANGENT_DOT

    @property
    def empty(self):
        return not self.polylines and self.points.size == 0


def image_curve(f, cs, speed_dip=CUSP_SPEED_DIP, tangent_dot=CUSP_TANGENT_DOT):
    """Map critical polylines vertexwise and detect cusps.

    A vertex is a cusp when the discrete speed |df|/|dz| of an adjacent
    segment drops below ``speed_dip`` times the polyline median and the
    adjacent image tangents reverse (unit dot product below ``tangent_dot``).
    """
    images, cusps = [], []
    for li, (line, is_closed) in enumerate(zip(cs.polylines, cs.closed)):
        F = f(line)
        images.append(F)
        n = len(line)
        if n < 3:
            continue
        if is_closed:
            dF = np.roll(F, -1) - F
            dz = np.roll(line, -1) - line
        else:
            dF = np.diff(F)
            dz = np.diff(line)
        with np.errstate(all="ignore"):
            speed = np.abs(dF) / np.abs(dz)
            unit = dF / np.abs(dF)
        med = np.nanmedian(speed)
        ks = range(n) if is_closed else range(1, n - 1)
        hits, score = [], {}
        for k in ks:
            a, b = (k - 1) % len(dF), k % len(dF)
            if not is_closed and b >= len(dF):
                continue
            sp = min(speed[a], speed[b])
            dot = (unit[a] * np.conj(unit[b])).real
            if sp < speed_dip * med and dot < tangent_dot:
                hits.append(k)
                score[k] = sp
        for k in _collapse_runs(hits, score, n, is_closed):
            cusps.append(Cusp(complex(F[k]), complex(line[k]), True, li, k))
    pts = f(cs.isolated_points) if cs.isolated_points.size else np.zeros(0, dtype=complex)
    return ImageCurve(images, list(cs.closed), cusps, np.atleast_1d(pts), speed_dip, tangent_dot)


def tangent_monotone(ic, li, noise=1e-2):
    """Check monotone tangent argument of image polyline ``li`` between cusps."""
    F = ic.polylines[li]
    closed = ic.closed[li]
    cut = sorted(c.index for c in ic.cusps if c.polyline == li)
    if closed:
        F = np.append(F, F[0])
    dF = np.diff(F)
    ang = np.unwrap(np.angle(dF))
    turn = np.diff(ang)
    # turning at a cusp vertex c sits at index c - 1; drop it and split there
    bounds = [0] + [c for c in cut] + [len(turn) + 1]
    ok = True
    for a, b in zip(bounds[:-1], bounds[1:]):
        seg = turn[a:max(a, b - 1)]
        if seg.size and not (np.all(seg >= -noise) or np.all(seg <= noise)):
            ok = False
    return ok
