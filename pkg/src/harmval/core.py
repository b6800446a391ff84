"""Plane maps, harmonic polynomials, and degeneracy detection."""

import json
import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import polytools as pt

FD_REL_STEP = 1e-6
LAMBDA_TOL = 1e-12
PSI_POLE = complex(np.inf, 0.0)
PSI_INDETERMINATE = complex(np.nan, np.nan)


class FunctionSpecError(ValueError):
    """Raised for malformed function specifications."""


class PlaneMap:
    """A C^1 map of the plane written as a complex function of z = x + iy.

    ``func`` must accept numpy arrays. ``wirtinger`` (optional) returns the
    pair (f_z, f_zbar); without it derivatives come from central differences.
    Harmonic members may also carry ``hprime``/``gprime`` so that
    f = h + conj(g) locally.
    """

    def __init__(self, func, wirtinger=None, *, name=None, hprime=None,
                 gprime=None, fd_step=FD_REL_STEP):
        self._func = func
        self._wirtinger = wirtinger
        self.name = name
        self.hprime = hprime
        self.gprime = gprime
        self.fd_step = fd_step

    @property
    def harmonic(self):
        return self.hprime is not None and self.gprime is not None

    def __call__(self, z):
        with np.errstate(over="ignore", invalid="ignore"):
            return self._func(np.asarray(z, dtype=complex))

    def fd_wirtinger(self, z):
        z = np.asarray(z, dtype=complex)
        h = self.fd_step * np.maximum(1.0, np.abs(z))
        fx = (self(z + h) - self(z - h)) / (2 * h)
        fy = (self(z + 1j * h) - self(z - 1j * h)) / (2 * h)
        return 0.5 * (fx - 1j * fy), 0.5 * (fx + 1j * fy)

    def wirtinger(self, z):
        if self._wirtinger is None:
            return self.fd_wirtinger(z)
        with np.errstate(over="ignore", invalid="ignore"):
            return self._wirtinger(np.asarray(z, dtype=complex))

    def jacobian(self, z, mode="analytic"):
        """J_f = u_x v_y - u_y v_x = |f_z|^2 - |f_zbar|^2."""
        a, b = self.fd_wirtinger(z) if mode == "fd" else self.wirtinger(z)
        return np.abs(a) ** 2 - np.abs(b) ** 2

    def real_partials(self, z):
        """(u_x, u_y, v_x, v_y) at z."""
        a, b = self.wirtinger(z)
        fx = a + b
        fy = 1j * (a - b)
        return fx.real, fy.real, fx.imag, fy.imag


class HarmonicPolynomial(PlaneMap):
    """f(z) = p(z) + conj(q(z)) with coefficient lists ascending by degree."""

    def __init__(self, p_coeffs, q_coeffs, *, name=None):
        p = pt.strip(p_coeffs)
        q = pt.strip(q_coeffs)
        if p.size == 0 and q.size == 0 and (len(p_coeffs) == 0 and len(q_coeffs) == 0):
            raise FunctionSpecError("empty function: both coefficient lists are empty")
        p.setflags(write=False)
        q.setflags(write=False)
        self.p = p
        self.q = q
        self.dp = pt.deriv(p)
        self.dq = pt.deriv(q)
        self.dp.setflags(write=False)
        self.dq.setflags(write=False)
        super().__init__(self._eval, self._wirt, name=name,
                         hprime=lambda z: pt.polyval(self.dp, z),
                         gprime=lambda z: pt.polyval(self.dq, z))
        self._psi_parts = None

    # h, g in the usual f = h + conj(g) notation
    h = property(lambda self: self.p)
    g = property(lambda self: self.q)

    @property
    def n_p(self):
        return max(self.p.size - 1, 0)

    @property
    def n_q(self):
        return max(self.q.size - 1, 0)

    @property
    def N(self):
        return max(self.n_p, self.n_q)

    def _eval(self, z):
        return pt.polyval(self.p, z) + np.conj(pt.polyval(self.q, z))

    def _wirt(self, z):
        return pt.polyval(self.dp, z), np.conj(pt.polyval(self.dq, z))

    def jacobian(self, z, mode="analytic"):
        if mode == "fd":
            return super().jacobian(z, mode)
        z = np.asarray(z, dtype=complex)
        return np.abs(pt.polyval(self.dp, z)) ** 2 - np.abs(pt.polyval(self.dq, z)) ** 2

    def conj_coeffs(self):
        return all(np.all(c.imag == 0) for c in (self.p, self.q))

    def psi_parts(self):
        """Reduced numerator, denominator and common factor of p'/q'."""
        if self._psi_parts is None:
            common = pt.poly_gcd(self.dp, self.dq)
            if common.size == 0:
                self._psi_parts = (self.dp, self.dq, common)
            else:
                self._psi_parts = (pt.poly_divexact(self.dp, common),
                                   pt.poly_divexact(self.dq, common), common)
        return self._psi_parts

    def to_spec(self):
        spec = {"p": [[float(c.real), float(c.imag)] for c in self.p],
                "q": [[float(c.real), float(c.imag)] for c in self.q]}
        return spec

    def __repr__(self):
        return f"HarmonicPolynomial(p={self.p.tolist()}, q={self.q.tolist()})"

    def __eq__(self, other):
        return (isinstance(other, HarmonicPolynomial)
                and np.array_equal(self.p, other.p)
                and np.array_equal(self.q, other.q))

    def __hash__(self):
        return hash((self.p.tobytes(), self.q.tobytes()))


def psi(f, z):
    """Second dilatation p'/q' with common factors of p' and q' removed.

    Poles come back as ``PSI_POLE`` (inf) and 0/0 points as
    ``PSI_INDETERMINATE`` (nan).
    """
    num, den, _ = f.psi_parts()
    z = np.asarray(z, dtype=complex)
    nv = pt.polyval(num, z)
    dv = pt.polyval(den, z)
    nscale = max(np.linalg.norm(num), 1e-300)
    dscale = max(np.linalg.norm(den), 1e-300)
    tiny = 1e-14
    dzero = np.abs(dv) <= tiny * dscale * np.maximum(1.0, np.abs(z)) ** max(den.size - 1, 0)
    nzero = np.abs(nv) <= tiny * nscale * np.maximum(1.0, np.abs(z)) ** max(num.size - 1, 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(dzero, PSI_POLE, nv / np.where(dzero, 1.0, dv))
    out = np.where(dzero & nzero, PSI_INDETERMINATE, out)
    return out[()] if out.ndim == 0 else out


def eval_map(f, z):
    return f(z)


def jacobian(f, z):
    return f.jacobian(z)


@dataclass(frozen=True)
class DegeneracyReport:
    kind: str  # "generic" | "constant_range" | "line_range"
    lam: Optional[complex] = None
    alpha: Optional[complex] = None
    beta: Optional[complex] = None

    def on_range(self, w, tol=1e-9):
        """Whether w lies in the (point or line) range of a degenerate map."""
        if self.kind == "constant_range":
            return abs(w - self.alpha) <= tol * max(1.0, abs(self.alpha))
        if self.kind == "line_range":
            t = (w - self.alpha) / self.beta
            return abs(t.imag) * abs(self.beta) <= tol * max(1.0, abs(w))
        return None


def detect_degeneracy(f):
    """Classify f as constant, line-valued (p' = lam q', |lam| = 1) or generic."""
    if f.p.size <= 1 and f.q.size <= 1:
        c = (f.p[0] if f.p.size else 0) + np.conj(f.q[0] if f.q.size else 0)
        return DegeneracyReport("constant_range", alpha=complex(c))
    dp, dq = f.dp, f.dq
    if dp.size != dq.size or dq.size == 0:
        return DegeneracyReport("generic")
    k = int(np.argmax(np.abs(dq)))
    lam = dp[k] / dq[k]
    scale = max(np.max(np.abs(dp)), np.max(np.abs(dq)))
    if np.max(np.abs(dp - lam * dq)) > LAMBDA_TOL * scale:
        return DegeneracyReport("generic")
    if abs(abs(lam) - 1.0) >= LAMBDA_TOL:
        return DegeneracyReport("generic")
    lam = lam / abs(lam)
    tau = np.sqrt(lam)
    p0 = f.p[0] if f.p.size else 0
    q0 = f.q[0] if f.q.size else 0
    alpha = complex(p0 - lam * q0)
    return DegeneracyReport("line_range", lam=complex(lam), alpha=alpha, beta=complex(2 * tau))


_SPEC_FIELDS = {"name", "p", "q"}


def _coeff_list(raw, key):
    if not isinstance(raw, (list, tuple)):
        raise FunctionSpecError(f"{key!r} must be a list of [re, im] pairs")
    out = []
    for item in raw:
        if (not isinstance(item, (list, tuple)) or len(item) != 2
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in item)):
            raise FunctionSpecError(f"malformed coefficient in {key!r}: {item!r}")
        out.append(complex(item[0], item[1]))
    return out


def parse_function(spec):
    """Build a PlaneMap from a catalog name, a spec dict, JSON text, or a JSON file path."""
    from .catalog import CATALOG, get_entry

    if isinstance(spec, str):
        s = spec.strip()
        if s in CATALOG:
            return get_entry(s).map
        if os.path.isfile(s):
            with open(s) as fh:
                s = fh.read()
        try:
            spec = json.loads(s)
        except json.JSONDecodeError:
            raise FunctionSpecError(f"unknown catalog name or unreadable spec: {spec!r}") from None
    if not isinstance(spec, dict):
        raise FunctionSpecError("function spec must be a mapping")
    unknown = set(spec) - _SPEC_FIELDS
    if unknown:
        raise FunctionSpecError(f"unknown fields: {sorted(unknown)}")
    has_coeffs = "p" in spec or "q" in spec
    if "name" in spec and has_coeffs:
        raise FunctionSpecError("give either 'name' or 'p'/'q', not both")
    if "name" in spec:
        try:
            return get_entry(spec["name"]).map
        except KeyError:
            raise FunctionSpecError(f"unknown catalog name: {spec['name']!r}") from None
    if not has_coeffs:
        raise FunctionSpecError("spec needs 'name' or 'p'/'q'")
    p = _coeff_list(spec.get("p", []), "p")
    q = _coeff_list(spec.get("q", []), "q")
    if not p and not q:
        raise FunctionSpecError("empty function: both coefficient lists are empty")
    return HarmonicPolynomial(p, q)


def function_spec(f):
    """Serializable spec for f (catalog name when known)."""
    from .catalog import CATALOG

    if f.name in CATALOG:
        return {"name": f.name}
    if isinstance(f, HarmonicPolynomial):
        return f.to_spec()
    raise FunctionSpecError("only catalog entries and harmonic polynomials serialize")

