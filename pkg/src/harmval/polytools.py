"""Univariate complex polynomial helpers.

Coefficient arrays ascend by degree throughout: ``c[k]`` multiplies ``z**k``.
"""

import numpy as np
from numpy.polynomial import polynomial as P

GCD_TOL = 1e-12


def strip(c):
    """Drop trailing exact zeros; the zero polynomial becomes an empty array."""
    c = np.asarray(c, dtype=complex).ravel()
    nz = np.nonzero(c)[0]
    if nz.size == 0:
        return np.zeros(0, dtype=complex)
    return c[: nz[-1] + 1].copy()


def degree(c):
    """Degree of ``c``; the zero polynomial has degree -1."""
    return len(strip(c)) - 1


def polyval(c, z):
    c = np.asarray(c, dtype=complex)
    if c.size == 0:
        return np.zeros_like(np.asarray(z, dtype=complex))
    return P.polyval(z, c)


def deriv(c):
    c = strip(c)
    if c.size <= 1:
        return np.zeros(0, dtype=complex)
    return strip(c[1:] * np.arange(1, c.size))


def _trim_relative(c, scale, tol):
    c = np.array(c, dtype=complex)
    c[np.abs(c) <= tol * scale] = 0
    return strip(c)


def poly_gcd(a, b, tol=GCD_TOL):
    """Monic GCD of two complex polynomials by the Euclidean algorithm.

    Remainder coefficients below ``tol`` times the largest input coefficient
    are treated as zero. ``gcd(0, 0)`` is the zero polynomial.
    """
    a, b = strip(a), strip(b)
    scale = max(np.max(np.abs(a), initial=0.0), np.max(np.abs(b), initial=0.0))
    if scale == 0:
        return np.zeros(0, dtype=complex)
    a = _trim_relative(a, scale, tol)
    b = _trim_relative(b, scale, tol)
    while b.size:
        _, r = P.polydiv(a, b)
        r = _trim_relative(r, scale, tol)
        a, b = b, r
    return a / a[-1]


def poly_divexact(a, d):
    """Quotient of ``a`` by ``d`` discarding the (assumed negligible) remainder."""
    a, d = strip(a), strip(d)
    if a.size == 0:
        return a
    q, _ = P.polydiv(a, d)
    return strip(q)


def poly_roots(c):
    """All roots of ``c`` (companion eigenvalues).

    Raises ``ValueError`` for constant or zero polynomials.
    """
    c = strip(c)
    if c.size < 2:
        raise ValueError("polynomial must have degree >= 1")
    if c.size == 2:
        return np.array([-c[0] / c[1]])
    return P.polyroots(c)


def cluster_points(points, rel_radius=1e-6):
    """Merge points closer than ``rel_radius * max(1, |z|)``.

    Returns cluster representatives (first member by (Re, Im) order) and the
    cluster size of each.
    """
    pts = np.asarray(points, dtype=complex).ravel()
    if pts.size == 0:
        return pts, np.zeros(0, dtype=int)
    order = np.lexsort((pts.imag, pts.real))
    pts = pts[order]
    reps, counts = [], []
    for z in pts:
        for i, r in enumerate(reps):
            if abs(z - r) <= rel_radius * max(1.0, abs(r), abs(z)):
                counts[i] += 1
                break
        else:
            reps.append(z)
            counts.append(1)
    return np.array(reps, dtype=complex), np.array(counts, dtype=int)


def roots(c, rel_radius=1e-6, polish_iters=3):
    """Distinct roots of ``c`` after Newton polishing and clustering.

    Each returned root satisfies ``|c(r)| / ||c|| < 1e-10`` unless it is part
    of a cluster (multiple root), where the residual contract is checked on
    the cluster representative only after polishing.
    """
    c = strip(c)
    r = poly_roots(c)
    dc = deriv(c)
    for _ in range(polish_iters):
        fv = polyval(c, r)
        dv = polyval(dc, r)
        ok = np.abs(dv) > 0
        step = np.zeros_like(r)
        step[ok] = fv[ok] / dv[ok]
        cand = r - step
        better = np.abs(polyval(c, cand)) < np.abs(fv)
        r = np.where(better, cand, r)
    reps, _ = cluster_points(r, rel_radius)
    return reps


def residual_norm(c, z):
    c = strip(c)
    return np.abs(polyval(c, z)) / np.linalg.norm(c)
