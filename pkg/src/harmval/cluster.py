"""Cluster sets at infinity: emptiness test, catalog sets and a radial sampler."""

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import HarmonicPolynomial

DEFAULT_RADII = (10.0, 30.0, 100.0, 300.0)
DEFAULT_ANGULAR_N = 4096
DEFAULT_M = 100.0
DEFAULT_LEVELS = 201
MATCH_TOL = 0.25
STABLE_TOL = 1e-3
RADIUS_CAP = 1e5
LEVEL_RESIDUAL = 1e-3
KEEP_STEP = 0.05  # a chain cut short is kept only if its last step was this small


@dataclass
class ClusterSet:
    verdict: str  # "empty_certified" | "exact_catalog" | "sampled" | "unknown"
    lines: list = field(default_factory=list)  # (point, direction) pairs
    points: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))
    description: str = ""
    radii: Optional[tuple] = None
    bound_M: Optional[float] = None
    angular_n: Optional[int] = None
    warnings: list = field(default_factory=list)

    @property
    def empty(self):
        return not self.lines and self.points.size == 0

    def segments(self, viewport):
        from .catalog import clip_line

        out = []
        for p, d in self.lines:
            s = clip_line(p, d, viewport)
            if s is not None:
                out.append(s)
        return out

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "description": self.description,
            "lines": [[[p.real, p.imag], [d.real, d.imag]] for p, d in self.lines],
            "points": [[float(z.real), float(z.imag)] for z in self.points],
            "radii": list(self.radii) if self.radii else None,
            "bound_M": self.bound_M,
            "angular_n": self.angular_n,
            "warnings": list(self.warnings),
        }


def escape_test(f):
    """True when f(z) -> infinity as z -> infinity, so C(f, inf) is empty.

    Only the dominant-term criterion is used; anything else returns False.
    """
    if not isinstance(f, HarmonicPolynomial):
        return False
    if f.n_p != f.n_q:
        return True
    if f.n_p == 0:
        return False
    lp, lq = abs(f.p[-1]), abs(f.q[-1])
    return bool(abs(lp - lq) > 1e-12 * max(lp, lq))


def _circle_hits(f, r, angular_n, levels, bound_M):
    """Level-set crossings of Re f and Im f on |z| = r, kept where |f| <= M.

    Returns (values, level_ids, lost) where level ids index Re levels first,
    then Im levels, and ``lost`` marks levels with precision-rejected brackets.
    """
    th = 2 * np.pi * np.arange(angular_n) / angular_n
    F = f(r * np.exp(1j * th))
    nlev = len(levels)
    lost = np.zeros(2 * nlev, dtype=bool)
    vals, ids = [], []
    for part, off in ((np.real, 0), (np.imag, nlev)):
        G = part(F)[None, :] - levels[:, None]
        Gn = np.roll(G, -1, axis=1)
        with np.errstate(invalid="ignore"):
            li, ki = np.nonzero(np.sign(G) * np.sign(Gn) < 0)
        if li.size == 0:
            continue
        lo = th[ki]
        hi = lo + 2 * np.pi / angular_n
        lev = levels[li]
        glo = part(f(r * np.exp(1j * lo))) - lev
        for _ in range(52):
            mid = 0.5 * (lo + hi)
            gm = part(f(r * np.exp(1j * mid))) - lev
            same = np.sign(gm) == np.sign(glo)
            lo = np.where(same, mid, lo)
            glo = np.where(same, gm, glo)
            hi = np.where(same, hi, mid)
        fl, fh = f(r * np.exp(1j * lo)), f(r * np.exp(1j * hi))
        rl, rh = np.abs(part(fl) - lev), np.abs(part(fh) - lev)
        val = np.where(rl <= rh, fl, fh)
        res = np.minimum(rl, rh)
        ok = res <= LEVEL_RESIDUAL * np.maximum(1.0, np.abs(lev))
        lost[li[~ok] + off] = True
        keep = ok & np.isfinite(val) & (np.abs(val) <= bound_M)
        vals.append(val[keep])
        ids.append(li[keep] + off)
    if not vals:
        return np.zeros(0, dtype=complex), np.zeros(0, dtype=int), lost
    return np.concatenate(vals), np.concatenate(ids), lost


def _match(prev_vals, prev_ids, vals, ids, tol):
    """For each previous hit, nearest hit on the same level within tol (index or -1)."""
    out = np.full(len(prev_vals), -1)
    for n, (v, i) in enumerate(zip(prev_vals, prev_ids)):
        m = np.flatnonzero(ids == i)
        if m.size == 0:
            continue
        d = np.abs(vals[m] - v)
        j = int(np.argmin(d))
        if d[j] <= tol:
            out[n] = m[j]
    return out


def sample_cluster(f, radii=DEFAULT_RADII, angular_n=DEFAULT_ANGULAR_N, bound_M=DEFAULT_M,
                   levels=DEFAULT_LEVELS, match_tol=MATCH_TOL, radius_cap=RADIUS_CAP):
    """Estimate C(f, inf) from bounded level-set hits on growing circles.

    Candidates are hits at the largest radius that persist (same level,
    within ``match_tol``) at the second largest one. Each candidate is then
    followed along its level set on doubling radii until its value settles,
    the radius cap is reached or evaluation loses precision.
    """
    radii = tuple(float(r) for r in radii)
    if not radii or any(b <= a for a, b in zip(radii[:-1], radii[1:])) or radii[0] <= 0:
        raise ValueError("radii must be a nonempty increasing list of positive numbers")
    if angular_n < 64:
        raise ValueError("angular_n must be at least 64")
    notes = []
    if isinstance(f, HarmonicPolynomial) and not escape_test(f) and f.n_p == f.n_q and f.n_p > 0:
        msg = "equal degrees with equal leading moduli: lower-order terms decide the cluster set"
        warnings.warn(msg, stacklevel=2)
        notes.append(msg)
    lev = np.linspace(-bound_M, bound_M, levels)
    meta = dict(radii=radii, bound_M=float(bound_M), angular_n=int(angular_n), warnings=notes)
    vals, ids, _ = _circle_hits(f, radii[-1], angular_n, lev, bound_M)
    if vals.size == 0:
        return ClusterSet("sampled", description="no bounded samples at the largest radius", **meta)
    if len(radii) > 1:
        pv, pi, _ = _circle_hits(f, radii[-2], angular_n, lev, bound_M)
        m = _match(vals, ids, pv, pi, match_tol)
        keep = m >= 0
        last_step = np.abs(vals[keep] - pv[m[keep]])
        vals, ids = vals[keep], ids[keep]
    else:
        last_step = np.zeros(len(vals))
    active = np.ones(len(vals), dtype=bool)
    done = np.zeros(len(vals), dtype=bool)
    r = radii[-1]
    while active.any() and r * 2 <= radius_cap:
        r *= 2
        nv, ni, lost = _circle_hits(f, r, angular_n, lev, bound_M)
        idx = np.flatnonzero(active)
        m = _match(vals[idx], ids[idx], nv, ni, match_tol)
        for k, j in zip(idx, m):
            if j < 0:
                active[k] = False
                # precision ran out: keep the last value if the chain had settled
                done[k] = bool(lost[ids[k]]) and last_step[k] < KEEP_STEP
                continue
            step = abs(nv[j] - vals[k])
            last_step[k] = step
            vals[k] = nv[j]
            if step < STABLE_TOL:
                active[k] = False
                done[k] = True
    done |= active & (last_step < KEEP_STEP)  # reached the radius cap
    pts = vals[done]
    order = np.lexsort((pts.imag, pts.real))
    pts = pts[order]
    return ClusterSet("sampled", points=pts, description="sampled cloud", **meta)


def exact_cluster(entry, viewport=None):
    """Closed-form cluster set of a catalog entry, with lines clipped when a viewport is given."""
    ex = entry.exact_cluster_set
    if ex is None:
        raise ValueError(f"catalog entry {entry.name!r} has no exact cluster set")
    vp = viewport or entry.range_viewport
    from .catalog import clip_line

    lines = [m for fam in ex.lines for m in fam.members(vp) if clip_line(*m, vp) is not None]
    return ClusterSet("exact_catalog", lines=lines,
                      points=np.array(ex.points, dtype=complex), description=ex.description)


def cluster_set(f, entry=None, **kw):
    """Best available cluster set: catalog data, the escape test, then sampling."""
    if entry is not None and entry.exact_cluster_set is not None:
        return exact_cluster(entry, kw.get("viewport"))
    if escape_test(f):
        return ClusterSet("empty_certified", description="f -> infinity at infinity")
    kw.pop("viewport", None)
    if entry is not None and "cluster_radii" in entry.extra:
        kw.setdefault("radii", entry.extra["cluster_radii"])
    return sample_cluster(f, **kw)
