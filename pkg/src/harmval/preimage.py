"""Preimage sets and valence.

Harmonic polynomials go through an algebraic route: f(z) = w is lifted to
the complexified system

    E1(z, s) = p(z) + qbar(s) - w
    E2(z, s) = pbar(s) + q(z) - conj(w)

whose slice s = conj(z) is the original equation, and s is eliminated with a
Sylvester resultant sampled on a circle and interpolated by FFT. Roots of the
resultant are polished with Newton's method on the real 2x2 system and kept
only if they meet the residual metric. General plane maps use Newton from a
grid of seeds.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import polytools as pt
from .core import HarmonicPolynomial, detect_degeneracy

RESIDUAL_TOL = 1e-10
DEDUP_REL = 1e-6
NEWTON_MAXITER = 50
NEWTON_STEP_TOL = 1e-13
ZERO_RESULTANT_TOL = 1e-10
COEFF_TRIM = 1e-13
INFINITE_PROBE_N = 64
INFINITE_PROBE_R = 2.0


class DegenerateFunctionError(ValueError):
    pass


@dataclass(frozen=True)
class Verdict:
    kind: str  # "finite" | "infinite" | "unknown"
    count: Optional[int] = None

    @classmethod
    def finite(cls, k):
        return cls("finite", int(k))

    def __str__(self):
        if self.kind == "finite":
            return f"finite({self.count})"
        return self.kind

    def as_value(self):
        """Integer count, ``inf`` or ``None`` (unknown)."""
        if self.kind == "finite":
            return self.count
        return float("inf") if self.kind == "infinite" else None


INFINITE = Verdict("infinite")
UNKNOWN = Verdict("unknown")


@dataclass
class PreimageSet:
    solutions: np.ndarray
    residuals: np.ndarray
    verdict: Verdict
    certified: bool
    region: object = None
    seed_failures: int = 0
    notes: list = field(default_factory=list)

    @property
    def count(self):
        return self.verdict.count

    def __len__(self):
        return len(self.solutions)


def residual_metric(f, z, w):
    """|Re f(z) - Re w| + |Im f(z) - Im w|."""
    d = f(z) - w
    return np.abs(d.real) + np.abs(d.imag)


# -- conjugate system and elimination ---------------------------------------

@dataclass(frozen=True)
class ConjugateSystem:
    """Coefficient grids ``E[i, j]`` of z**i * s**j for both equations."""

    E1: np.ndarray
    E2: np.ndarray
    f: HarmonicPolynomial
    w: complex

    def evaluate(self, z, s):
        return _bivar(self.E1, z, s), _bivar(self.E2, z, s)

    def s_coeffs(self, z):
        """Coefficients in s (ascending) of E1 and E2 at the given z values."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        zp1 = z[:, None] ** np.arange(self.E1.shape[0])
        zp2 = z[:, None] ** np.arange(self.E2.shape[0])
        return zp1 @ self.E1, zp2 @ self.E2

    @property
    def deg_s(self):
        return self.E1.shape[1] - 1, self.E2.shape[1] - 1


def _bivar(E, z, s):
    z = np.asarray(z, dtype=complex)
    s = np.asarray(s, dtype=complex)
    out = np.zeros(np.broadcast(z, s).shape, dtype=complex)
    for i in range(E.shape[0]):
        for j in range(E.shape[1]):
            if E[i, j] != 0:
                out = out + E[i, j] * z**i * s**j
    return out


def build_conjugate_system(f, w):
    if detect_degeneracy(f).kind != "generic":
        raise DegenerateFunctionError("degenerate function: route to degenerate handling")
    w = complex(w)
    p, q = f.p, f.q
    n_p, n_q = f.n_p, f.n_q
    E1 = np.zeros((n_p + 1, n_q + 1), dtype=complex)
    E2 = np.zeros((n_q + 1, n_p + 1), dtype=complex)
    E1[: p.size, 0] += p
    E1[0, : q.size] += np.conj(q)
    E1[0, 0] -= w
    E2[: q.size, 0] += q
    E2[0, : p.size] += np.conj(p)
    E2[0, 0] -= np.conj(w)
    return ConjugateSystem(E1, E2, f, w)


def sylvester(a, b):
    """Sylvester matrices for stacks of polynomials in s (ascending coefficients).

    ``a`` has shape (k, m+1) and ``b`` shape (k, n+1); result is (k, m+n, m+n).
    """
    k, m1 = a.shape
    _, n1 = b.shape
    m, n = m1 - 1, n1 - 1
    S = np.zeros((k, m + n, m + n), dtype=complex)
    ad = a[:, ::-1]
    bd = b[:, ::-1]
    for i in range(n):
        S[:, i, i:i + m + 1] = ad
    for i in range(m):
        S[:, n + i, i:i + n + 1] = bd
    return S


@dataclass
class Elimination:
    coeffs: np.ndarray  # ascending in z; empty when identically zero
    identically_zero: bool
    scale: float
    radius: float


def preimage_radius(f, w):
    """R such that |f(z)| > |w| whenever |z| >= R, or None if no such bound follows.

    Uses |f(z)| >= c R^N - sum_k (|p_k| + |q_k|) R^k with c the dominant
    leading modulus.
    """
    p, q = f.p, f.q
    N = max(f.n_p, f.n_q)
    lp = abs(p[N]) if p.size > N else 0.0
    lq = abs(q[N]) if q.size > N else 0.0
    c = abs(lp - lq)
    if N < 1 or c <= 1e-12 * max(lp, lq):
        return None
    low = np.zeros(N)
    low[: min(p.size, N)] += np.abs(p[:N])
    low[: min(q.size, N)] += np.abs(q[:N])
    low[0] += abs(w)

    def bound(R):
        return c * R**N - np.polyval(low[::-1], R)

    R = 1.0
    while bound(R) <= 0:
        R *= 2
    return R


def _equilibrate(S):
    """Row then column normalization; singularity is invariant under it."""
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.linalg.norm(S, axis=2, keepdims=True)
        S = S / np.where(r > 0, r, 1.0)
        c = np.linalg.norm(S, axis=1, keepdims=True)
        return S / np.where(c > 0, c, 1.0)


def _singular(S):
    """True when every matrix in the stack is numerically singular.

    Relative singular values of the equilibrated matrices avoid both the
    cancellation that fools |det| tests and plain row-scale disparity.
    """
    sv = np.linalg.svd(_equilibrate(S), compute_uv=False)
    return bool(np.max(sv[:, -1] / sv[:, 0]) < ZERO_RESULTANT_TOL)


def eliminate(sys, radius=None):
    """Resultant of E1, E2 with respect to s, as a polynomial in z.

    Sampled at roots of unity on ``radius`` (default 1 + largest coefficient
    magnitude) and interpolated by FFT.
    """
    n_q, n_p = sys.deg_s
    deg_bound = max(n_p * n_p + n_q * n_q, n_p * n_q + n_p + n_q)
    M = deg_bound + 1
    mags = np.concatenate([np.abs(sys.E1).ravel(), np.abs(sys.E2).ravel()])
    rho = float(radius) if radius is not None else 1.0 + float(mags.max())
    nodes = rho * np.exp(2j * np.pi * np.arange(M) / M)
    a, b = sys.s_coeffs(nodes)
    S = sylvester(a, b)
    vals = np.linalg.det(S)
    hadamard = np.prod(np.linalg.norm(S, axis=2), axis=1)
    scale = float(hadamard.max())
    # identically zero iff the Sylvester matrix is singular at every node
    unit = np.exp(2j * np.pi * (np.arange(M) + 0.5) / M)
    if _singular(S) and _singular(sylvester(*sys.s_coeffs(unit))):
        return Elimination(np.zeros(0, dtype=complex), True, scale, rho)
    scaled = np.fft.fft(vals) / M
    scaled[np.abs(scaled) < COEFF_TRIM * np.abs(scaled).max()] = 0
    coeffs = pt.strip(scaled / rho ** np.arange(M))
    return Elimination(coeffs, False, scale, rho)


# -- Newton on the real 2x2 system --------------------------------------------

def newton_polish(f, z0, w, maxiter=NEWTON_MAXITER, step_tol=NEWTON_STEP_TOL):
    """Vectorized Newton iteration for f(z) = w with a tiny Levenberg damping.

    Returns the iterate with the smallest residual seen, its residual metric,
    and a convergence mask (step below tolerance or residual already tiny).
    """
    with np.errstate(all="ignore"):
        return _newton(f, z0, w, maxiter, step_tol)


def _newton(f, z0, w, maxiter, step_tol):
    z = np.array(np.atleast_1d(z0), dtype=complex)
    best = z.copy()
    best_res = residual_metric(f, z, w)
    best_res = np.where(np.isfinite(best_res), best_res, np.inf)
    active = np.ones(z.shape, dtype=bool)
    converged = np.zeros(z.shape, dtype=bool)
    for _ in range(maxiter):
        if not active.any():
            break
        za = z[active]
        r = f(za) - w
        ux, uy, vx, vy = f.real_partials(za)
        # normal equations (J^T J + mu I) d = J^T r
        a11 = ux * ux + vx * vx
        a12 = ux * uy + vx * vy
        a22 = uy * uy + vy * vy
        mu = 1e-14 * (a11 + a22) + 1e-300
        g1 = ux * r.real + vx * r.imag
        g2 = uy * r.real + vy * r.imag
        det = (a11 + mu) * (a22 + mu) - a12 * a12
        dx = ((a22 + mu) * g1 - a12 * g2) / det
        dy = ((a11 + mu) * g2 - a12 * g1) / det
        step = dx + 1j * dy
        bad = ~np.isfinite(step)
        step[bad] = 0
        znew = za - step
        z[active] = znew
        res = residual_metric(f, znew, w)
        res = np.where(np.isfinite(res), res, np.inf)
        idx = np.flatnonzero(active)
        improve = res < best_res[idx]
        best[idx[improve]] = znew[improve]
        best_res[idx[improve]] = res[improve]
        small = np.abs(step) < step_tol * np.maximum(1.0, np.abs(znew))
        done = small | bad | (res == 0) | ~np.isfinite(znew)
        converged[idx[small | (res == 0)]] = True
        active[idx[done]] = False
    converged |= best_res < RESIDUAL_TOL
    return best, best_res, converged


def _finish(f, cands, w, region, certified, notes=None, seed_failures=0):
    z, res, _ = newton_polish(f, cands, w)
    keep = res < RESIDUAL_TOL
    z, res = z[keep], res[keep]
    z, _ = pt.cluster_points(z, DEDUP_REL)
    z, res, _ = newton_polish(f, z, w)
    keep = res < RESIDUAL_TOL
    z, res = z[keep], res[keep]
    z, res = _sorted_unique(z, res)
    if region is not None:
        m = region_mask(region, z)
        z, res = z[m], res[m]
    return PreimageSet(z, res, Verdict.finite(len(z)), certified, region,
                       seed_failures, list(notes or []))


def _sorted_unique(z, res):
    if z.size == 0:
        return z, res
    reps, _ = pt.cluster_points(z, DEDUP_REL)
    # residual of each representative
    out_res = np.array([res[np.argmin(np.abs(z - r))] for r in reps])
    order = np.lexsort((reps.imag, reps.real))
    return reps[order], out_res[order]


def region_mask(region, z):
    """Evaluate a region filter: callable, ("disc", c, r) or (x0, x1, y0, y1)."""
    z = np.asarray(z, dtype=complex)
    if region is None:
        return np.ones(z.shape, dtype=bool)
    if callable(region):
        return np.asarray(region(z), dtype=bool)
    if region[0] == "disc":
        _, c, r = region
        return np.abs(z - c) < r
    x0, x1, y0, y1 = region
    return (z.real >= x0) & (z.real <= x1) & (z.imag >= y0) & (z.imag <= y1)


def disc(center=0j, radius=1.0):
    return ("disc", complex(center), float(radius))


# -- public entry points -------------------------------------------------------

def _empty(certified, region, note=None, verdict=None):
    return PreimageSet(np.zeros(0, dtype=complex), np.zeros(0), verdict or Verdict.finite(0),
                       certified, region, 0, [note] if note else [])


def preimages(f, w, region=None):
    """All z with f(z) = w for a harmonic polynomial, with a valence verdict."""
    w = complex(w)
    deg = detect_degeneracy(f)
    if deg.kind != "generic":
        if deg.on_range(w):
            return _empty(True, region, f"{deg.kind}: w in range", INFINITE)
        return _empty(True, region, f"{deg.kind}: w off range")
    p, q = f.p, f.q
    if f.n_q == 0:
        # analytic: p(z) = w - conj(q0)
        c = np.array(p, dtype=complex)
        c[0] -= w - np.conj(q[0] if q.size else 0)
        return _finish(f, pt.roots(c), w, region, True)
    if f.n_p == 0:
        # anti-analytic: q(z) = conj(w - p0)
        c = np.array(q, dtype=complex)
        c[0] -= np.conj(w - (p[0] if p.size else 0))
        return _finish(f, pt.roots(c), w, region, True)
    sys = build_conjugate_system(f, w)
    elim = eliminate(sys)
    if elim.identically_zero:
        probe = preimages_numeric(f, w, (-INFINITE_PROBE_R, INFINITE_PROBE_R,
                                         -INFINITE_PROBE_R, INFINITE_PROBE_R),
                                  INFINITE_PROBE_N)
        if len(probe.solutions) >= 2:
            sols = probe.solutions
            if region is not None:
                sols = sols[region_mask(region, sols)]
            return PreimageSet(sols, residual_metric(f, sols, w), INFINITE, True, region, 0,
                               ["resultant identically zero; solution curve confirmed on grid"])
        return _empty(False, region, "resultant identically zero without numeric confirmation",
                      UNKNOWN)
    if elim.coeffs.size < 2:
        return _empty(True, region, "resultant is a nonzero constant")
    # interpolation radius sets which roots are resolved well, so candidates
    # from a few radii up to the preimage bound are pooled before polishing
    cands = [pt.poly_roots(elim.coeffs)]
    R = preimage_radius(f, w)
    if R is not None:
        for rho in sorted({1.0, max(1.0, R / 2), max(1.0, R)}):
            e = eliminate(sys, rho)
            if not e.identically_zero and e.coeffs.size >= 2:
                cands.append(pt.poly_roots(e.coeffs))
    return _finish(f, np.concatenate(cands), w, region, True)


def preimages_numeric(f, w, box, grid_n=64):
    """Preimages inside ``box`` by Newton from a grid of seeds (uncertified)."""
    if grid_n < 8:
        raise ValueError("grid_n must be >= 8")
    x0, x1, y0, y1 = box
    if not (x1 > x0 and y1 > y0):
        raise ValueError("empty box")
    xs = np.linspace(x0, x1, grid_n)
    ys = np.linspace(y0, y1, grid_n)
    seeds = (xs[None, :] + 1j * ys[:, None]).ravel()
    w = complex(w)
    z, res, conv = newton_polish(f, seeds, w)
    ok = (res < RESIDUAL_TOL) & np.isfinite(z)
    failures = int(np.count_nonzero(~ok))
    z = z[ok]
    z = z[region_mask(box, z)]
    out = _finish(f, z, w, box, False, ["count restricted to box"], failures) if z.size else \
        PreimageSet(z, np.zeros(0), Verdict.finite(0), False, box, failures,
                    ["count restricted to box"])
    out.certified = False
    return out


def valence(f, w, region=None, box=None, grid_n=64):
    """Val(f, w) as a Verdict; certified for harmonic polynomials."""
    if isinstance(f, HarmonicPolynomial):
        return preimages(f, w, region).verdict
    if box is None:
        from .catalog import CATALOG
        entry = CATALOG.get(f.name)
        box = entry.extra.get("valence_box", entry.viewport) if entry else (-4, 4, -4, 4)
    ps = preimages_numeric(f, w, box, grid_n)
    if region is not None:
        return Verdict.finite(int(np.count_nonzero(region_mask(region, ps.solutions))))
    return ps.verdict
