"""Named example maps with known critical and cluster sets."""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import HarmonicPolynomial, PlaneMap

HALF_PI = np.pi / 2


@dataclass(frozen=True)
class LineFamily:
    """Lines ``point + t*direction`` for ``point = base + k*step``, k in Z (or one line if step is None)."""

    base: complex
    direction: complex
    step: Optional[complex] = None

    def members(self, viewport):
        x0, x1, y0, y1 = viewport
        if self.step is None:
            return [(self.base, self.direction)]
        corners = np.array([x0 + 1j * y0, x1 + 1j * y0, x0 + 1j * y1, x1 + 1j * y1])
        # offsets measured along the normal to the lines
        n = 1j * self.direction / abs(self.direction)
        proj = ((corners - self.base) * np.conj(n)).real
        sproj = (self.step * np.conj(n)).real
        kmin = int(np.floor(proj.min() / sproj)) - 1
        kmax = int(np.ceil(proj.max() / sproj)) + 1
        if kmin > kmax:
            kmin, kmax = kmax, kmin
        return [(self.base + k * self.step, self.direction) for k in range(kmin, kmax + 1)]


@dataclass(frozen=True)
class ExactSet:
    """Finite union of line families and points; ``empty`` when both lists are empty."""

    lines: tuple = ()
    points: tuple = ()
    description: str = ""

    @property
    def empty(self):
        return not self.lines and not self.points

    def segments(self, viewport):
        """Clip every line to the viewport rectangle; returns a list of (a, b) endpoints."""
        out = []
        for fam in self.lines:
            for pt, d in fam.members(viewport):
                seg = clip_line(pt, d, viewport)
                if seg is not None:
                    out.append(seg)
        return out

    def distance(self, w, viewport=None):
        """Distance from points w to the set (infinite when empty)."""
        w = np.atleast_1d(np.asarray(w, dtype=complex))
        best = np.full(w.shape, np.inf)
        for fam in self.lines:
            vp = viewport
            if vp is None:
                r = float(np.max(np.abs(w))) + 1.0
                vp = (-r, r, -r, r)
            for pt, d in fam.members(vp):
                u = d / abs(d)
                best = np.minimum(best, np.abs(((w - pt) * np.conj(u)).imag))
        for p in self.points:
            best = np.minimum(best, np.abs(w - p))
        return best


def clip_line(point, direction, viewport):
    x0, x1, y0, y1 = viewport
    u = direction / abs(direction)
    tmin, tmax = -np.inf, np.inf
    for p, d, lo, hi in ((point.real, u.real, x0, x1), (point.imag, u.imag, y0, y1)):
        if abs(d) < 1e-15:
            if p < lo or p > hi:
                return None
            continue
        t0, t1 = (lo - p) / d, (hi - p) / d
        tmin, tmax = max(tmin, min(t0, t1)), min(tmax, max(t0, t1))
    if tmin > tmax:
        return None
    return (complex(point + tmin * u), complex(point + tmax * u))


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    map: PlaneMap
    harmonic: bool
    light: bool
    description: str = ""
    exact_critical_set: Optional[ExactSet] = None
    exact_cluster_set: Optional[ExactSet] = None
    viewport: tuple = (-2.0, 2.0, -2.0, 2.0)
    range_viewport: tuple = (-2.0, 2.0, -2.0, 2.0)
    extra: dict = field(default_factory=dict)


def _transharm():
    def f(z):
        return z + np.exp(z).real

    def w(z):
        e = np.exp(z)
        return 1 + e / 2, np.conj(e / 2)

    return PlaneMap(f, w, name="transharm", hprime=lambda z: 1 + np.exp(z) / 2,
                    gprime=lambda z: np.exp(z) / 2)


def _sarason():
    def f(z):
        return z + np.exp(-z * z).real

    def w(z):
        e = -z * np.exp(-z * z)
        return 1 + e, np.conj(e)

    return PlaneMap(f, w, name="sarason", hprime=lambda z: 1 - z * np.exp(-z * z),
                    gprime=lambda z: -z * np.exp(-z * z))


def _c1poly():
    def f(z):
        x, y = z.real, z.imag
        return (x * x + y * y) + 1j * (2 * x * y)

    def w(z):
        x, y = z.real, z.imag
        fx = 2 * x + 2j * y
        fy = 2 * y + 2j * x
        return 0.5 * (fx - 1j * fy), 0.5 * (fx + 1j * fy)

    return PlaneMap(f, w, name="c1poly")


def _c1trans():
    def f(z):
        x, y = z.real, z.imag
        return x * np.cos(y) + 1j * y

    def w(z):
        x, y = z.real, z.imag
        fx = np.cos(y) + 0j
        fy = -x * np.sin(y) + 1j
        return 0.5 * (fx - 1j * fy), 0.5 * (fx + 1j * fy)

    return PlaneMap(f, w, name="c1trans")


def _build():
    hp = HarmonicPolynomial
    none = ExactSet(description="empty")
    real_axis = ExactSet(lines=(LineFamily(0j, 1 + 0j),), description="real axis")
    half_odd = ExactSet(lines=(LineFamily(1j * HALF_PI, 1 + 0j, 1j * np.pi),),
                        description="horizontal lines Im = (2k+1)pi/2")
    entries = [
        CatalogEntry(
            "quadratic", hp([0, 1, 1], [0, -1], name="quadratic"), True, True,
            "z^2 + z - conj(z)", None, none,
            viewport=(-2, 2, -2, 2), range_viewport=(-2, 2, -2, 2)),
        CatalogEntry(
            "cubic-star", hp([0, 0, 0, 1 / 3], [0, 0, -1 / 2], name="cubic-star"), True, True,
            "z^3/3 - conj(z)^2/2", None, none,
            viewport=(-2, 2, -2, 2), range_viewport=(-2, 2, -2, 2)),
        CatalogEntry(
            "cubic-twos", hp([0, 1.5, 0, -0.5], [0, -1], name="cubic-twos"), True, True,
            "-z^3/2 + 3z/2 - conj(z)", None, none,
            viewport=(-2.5, 2.5, -2.5, 2.5), range_viewport=(-3, 3, -3, 3)),
        CatalogEntry(
            "dumbbell", hp([0, 0.9, 0, -0.5], [0, -1], name="dumbbell"), True, True,
            "-z^3/2 + 9z/10 - conj(z)", None, none,
            viewport=(-2, 2, -2, 2), range_viewport=(-1.1, 1.1, -1.1, 1.1),
            extra={"zoom_views": ((-0.12, 0.12, 0.45, 0.69), (-0.12, 0.12, -0.69, -0.45))}),
        CatalogEntry(
            "polyunbdds", hp([0, 2j, 0, 1], [0, 0, 0, 1], name="polyunbdds"), True, True,
            "2(Re(z^3) + i z)", None, real_axis,
            viewport=(-3.25, 3.25, -6.5, 6.5), range_viewport=(-6, 6, -6, 6)),
        CatalogEntry(
            "flatpoly", hp([0, -1 + 1j, 1], [0, 1 - 1j, 1], name="flatpoly"), True, False,
            "2[Re(z^2) + i(Re z - Im z)]",
            ExactSet(lines=(LineFamily(0j, 1 + 1j),), description="line Re z = Im z"),
            real_axis, viewport=(-3, 3, -3, 3), range_viewport=(-6, 6, -6, 6)),
        CatalogEntry(
            "transharm", _transharm(), True, True, "z + Re e^z", None, half_odd,
            viewport=(-8, 8, -8, 8), range_viewport=(-12, 12, -8, 8),
            extra={"cluster_radii": (8.0, 16.0, 24.0), "valence_box": (-24.0, 16.0, -9.0, 9.0)}),
        CatalogEntry(
            "sarason", _sarason(), True, True, "Re(e^{-z^2}) + z", None, None,
            viewport=(-4, 4, -4, 4), range_viewport=(-6, 6, -6, 6)),
        CatalogEntry(
            "c1poly", _c1poly(), False, True, "(x^2 + y^2, 2xy)",
            ExactSet(lines=(LineFamily(0j, 1 + 1j), LineFamily(0j, 1 - 1j)),
                     description="lines y = x and y = -x"),
            none, viewport=(-3, 3, -3, 3), range_viewport=(-6, 6, -6, 6)),
        CatalogEntry(
            "c1trans", _c1trans(), False, False, "(x cos y, y)",
            half_odd, half_odd, viewport=(-6, 6, -6, 6), range_viewport=(-6, 6, -6, 6),
            extra={"valence_box": (-400.0, 400.0, -6.5, 6.5)}),
    ]
    return {e.name: e for e in entries}


CATALOG = _build()


def get_entry(name):
    return CATALOG[name]


def identity():
    return HarmonicPolynomial([0, 1], [], name="identity")
