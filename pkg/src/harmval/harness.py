"""Seeded property suites over catalog entries and random harmonic polynomials."""

import functools
import time
from dataclasses import dataclass, field

import numpy as np

from . import analysis as an
from .catalog import CATALOG
from .cluster import escape_test
from .core import HarmonicPolynomial, detect_degeneracy, function_spec
from .partition import PartitionSet, build_range_partition
from .preimage import (INFINITE, RESIDUAL_TOL, PreimageSet, Verdict, _sorted_unique,
                       newton_polish, preimage_radius, preimages,
                       residual_metric)


@dataclass(frozen=True)
class RandomPolySpec:
    seed: int = 7
    max_degree: int = 4
    coeff_bound: float = 2.0
    count: int = 50

    def polynomials(self):
        return random_polynomials(self)


def _disc(rng, n, bound):
    r = bound * np.sqrt(rng.uniform(0, 1, n))
    return r * np.exp(2j * np.pi * rng.uniform(0, 1, n))


@functools.lru_cache(maxsize=8)
def random_polynomials(spec):
    """Reproducible harmonic polynomials; near-degenerate draws are resampled.

    Cached per spec so repeated suites share analysis results.
    """
    rng = np.random.default_rng(spec.seed)
    out = []
    while len(out) < spec.count:
        n_p = int(rng.integers(1, spec.max_degree + 1))
        n_q = int(rng.integers(1, spec.max_degree + 1))
        p = _disc(rng, n_p + 1, spec.coeff_bound)
        q = _disc(rng, n_q + 1, spec.coeff_bound)
        # keep leading terms away from zero and from equal moduli
        if abs(p[-1]) < 0.25 * spec.coeff_bound or abs(q[-1]) < 0.25 * spec.coeff_bound:
            continue
        f = HarmonicPolynomial(p, q, name=f"rand{spec.seed}-{len(out)}")
        if n_p == n_q and abs(abs(p[-1]) - abs(q[-1])) < 0.1 * spec.coeff_bound:
            continue
        if detect_degeneracy(f).kind != "generic" or not escape_test(f):
            continue
        out.append(f)
    return tuple(out)


def degenerate_polynomials(seed, count, max_degree=4, bound=2.0):
    """p' = lam q' with |lam| = 1: images lie on a line."""
    rng = np.random.default_rng(seed + 1)
    out = []
    for i in range(count):
        n = int(rng.integers(1, max_degree + 1))
        q = _disc(rng, n + 1, bound)
        lam = np.exp(2j * np.pi * rng.uniform())
        p = lam * q
        p[0] = _disc(rng, 1, bound)[0]
        out.append(HarmonicPolynomial(p, q, name=f"degen{seed}-{i}"))
    return out


# -- oracle -------------------------------------------------------------------------------

def oracle_box(f, w, certified=None, start=1.0, grow=1.5):
    """Square box for the oracle: grown until every certified root has |z| < R/2.

    For harmonic polynomials the box also covers the coefficient growth
    bound, so roots missed by the certified path stay visible.
    """
    if certified is None:
        certified = preimages(f, w).solutions if isinstance(f, HarmonicPolynomial) else []
    r = float(np.max(np.abs(certified))) if len(certified) else 0.0
    R = start
    while r >= R / 2:
        R *= grow
    if isinstance(f, HarmonicPolynomial):
        Rb = preimage_radius(f, w)
        if Rb is not None:
            R = max(R, 1.05 * Rb)
    return (-R, R, -R, R)


def oracle_preimages(f, w, box, fine_n=512):
    """Dense residual scan plus Newton polish; uncertified and independent of elimination."""
    if fine_n < 256:
        raise ValueError("fine_n must be at least 256")
    x0, x1, y0, y1 = box
    xs = np.linspace(x0, x1, fine_n)
    ys = np.linspace(y0, y1, fine_n)
    Z = xs[None, :] + 1j * ys[:, None]
    R = residual_metric(f, Z, w)
    Rp = np.pad(R, 1, constant_values=np.inf)
    core = Rp[1:-1, 1:-1]
    is_min = np.ones_like(core, dtype=bool)
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dx or dy:
                is_min &= core <= Rp[1 + dy:fine_n + 1 + dy, 1 + dx:fine_n + 1 + dx]
    seeds = Z[is_min]
    if seeds.size == 0:
        return PreimageSet(np.zeros(0, complex), np.zeros(0), Verdict.finite(0), False, box)
    z, res, _ = newton_polish(f, seeds, complex(w))
    ok = (res < RESIDUAL_TOL) & np.isfinite(z)
    z, res = z[ok], res[ok]
    inside = (z.real >= x0) & (z.real <= x1) & (z.imag >= y0) & (z.imag <= y1)
    z, res = z[inside], res[inside]
    z, res = _sorted_unique(z, res)
    verdict = Verdict.finite(len(z))
    if isinstance(f, HarmonicPolynomial) and len(z) > f.N ** 2:
        verdict = INFINITE  # more than the Bezout count: a solution curve
    return PreimageSet(z, res, verdict, False, box, notes=["grid oracle"])


# -- suite plumbing -----------------------------------------------------------------------

@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    failures: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    info: list = field(default_factory=list)
    runtime: float = 0.0

    @property
    def ok(self):
        return not self.failures

    def to_dict(self):
        return {"suite": self.name, "cases": self.cases, "failures": self.failures,
                "skipped": self.skipped, "info": self.info, "ok": self.ok,
                "runtime_s": round(self.runtime, 3)}

    def summary(self):
        return (f"{self.name}: {'PASS' if self.ok else 'FAIL'} cases={self.cases} "
                f"failures={len(self.failures)} skipped={len(self.skipped)}")


def _spec_of(f):
    try:
        return function_spec(f)
    except ValueError:
        return {"name": f.name}


def _fail(res, f, what, **data):
    d = {"function": _spec_of(f), "what": what}
    for k, v in data.items():
        if isinstance(v, complex):
            v = [v.real, v.imag]
        d[k] = v
    res.failures.append(d)


def _targets(f, rng, n, a=None):
    """n random targets: images of random points plus points in the range viewport."""
    if a is not None:
        x0, x1, y0, y1 = a.range_viewport
        w = (rng.uniform(x0, x1, n) + 1j * rng.uniform(y0, y1, n))
    else:
        w = _disc(rng, n, 4.0)
    z = _disc(rng, n, 1.5)
    return np.concatenate([w[: n // 2], f(z)[: n - n // 2]])


def _harmonic_catalog():
    return [e for e in CATALOG.values() if isinstance(e.map, HarmonicPolynomial)]


def _analysis(f, cell_n):
    return an.analyze(f, cell_n=cell_n)


SUITES = {}


def suite(name):
    def deco(fn):
        SUITES[name] = fn
        return fn
    return deco


def run_suite(name, spec=None, cell_n=512, catalog=True):
    """Run a registered suite; deterministic for a given spec."""
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; known: {', '.join(sorted(SUITES))}")
    spec = spec or RandomPolySpec()
    res = SuiteResult(name)
    t = time.perf_counter()
    SUITES[name](res, spec, cell_n, catalog)
    res.runtime = time.perf_counter() - t
    return res


def _cases(spec, catalog):
    fs = list(spec.polynomials())
    if catalog:
        fs = [e.map for e in _harmonic_catalog() if e.light] + fs
    return fs


# -- suites -------------------------------------------------------------------------------

@suite("constant_valence")
def _constant_valence(res, spec, cell_n, catalog):
    for f in _cases(spec, catalog):
        a = _analysis(f, cell_n)
        for c in a.range_components:
            res.cases += 1
            if c.constancy_violation:
                _fail(res, f, "valence not constant on range component", component=c.id,
                      samples=[[z.real, z.imag] for z in c.sample_points],
                      valences=[str(v) for v in c.sample_valences], grid=cell_n)
    if catalog:
        for e in CATALOG.values():
            if isinstance(e.map, HarmonicPolynomial) or not e.light:
                continue
            a = _analysis(e.map, cell_n)
            bad = [c.id for c in a.range_components if c.constancy_violation]
            res.info.append({"function": e.name, "mode": "informational (not harmonic)",
                             "violations": bad})


@suite("wilmshurst")
def _wilmshurst(res, spec, cell_n, catalog):
    rng = np.random.default_rng(spec.seed)
    for f in spec.polynomials():
        for w in _targets(f, rng, 10):
            v = preimages(f, w).verdict
            res.cases += 1
            if v.kind == "finite" and v.count > f.N ** 2:
                _fail(res, f, "more than N^2 preimages", target=complex(w), count=v.count)


@suite("bezout_alternative")
def _bezout(res, spec, cell_n, catalog):
    rng = np.random.default_rng(spec.seed)
    cases = [(f, w) for f in spec.polynomials() for w in _targets(f, rng, 10)]
    if catalog:
        flat = CATALOG["flatpoly"].map
        cases += [(flat, 0j), (flat, 1 + 0j), (flat, 1j)]
    for f, w in cases:
        v = preimages(f, w).verdict
        res.cases += 1
        if v.kind == "unknown" or (v.kind == "finite" and v.count > f.N ** 2):
            _fail(res, f, "verdict outside the finite/infinite alternative",
                  target=complex(w), verdict=str(v))


@suite("even_jump")
def _even_jump(res, spec, cell_n, catalog):
    for f in _cases(spec, catalog):
        a = _analysis(f, cell_n)
        for c in a.fold_checks:
            res.cases += 1
            jump = None if c.val_plus is None or c.val_minus is None else c.val_plus - c.val_minus
            if not c.jump_ok or jump is None or jump <= 0 or jump % 2:
                _fail(res, f, "fold jump mismatch", arc_point=c.arc_point,
                      val_plus=c.val_plus, val_minus=c.val_minus, N0=c.N0, N1=c.N1, grid=cell_n)


@suite("covering_uniformity")
def _covering(res, spec, cell_n, catalog):
    for f in _cases(spec, catalog):
        a = _analysis(f, cell_n)
        for c in a.domain_components:
            res.cases += 1
            if c.n0 is None:
                res.skipped.append({"function": _spec_of(f), "component": c.id,
                                    "reason": "no usable samples"})
                continue
            if c.covering_violation or c.mapping_violation:
                _fail(res, f, "covering count or image component not constant", component=c.id,
                      counts=c.n0_per_target, mapping_violation=c.mapping_violation,
                      grid=cell_n)


@suite("lsc_probe")
def _lsc(res, spec, cell_n, catalog):
    rng = np.random.default_rng(spec.seed)
    for f in _cases(spec, catalog):
        a = _analysis(f, cell_n)
        h = a.range_grid.h
        for c in a.range_components:
            for w in c.sample_points[:1]:
                v0 = preimages(f, w).verdict
                if v0.kind != "finite":
                    continue
                res.cases += 1
                ring = w + 0.5 * h * np.exp(2j * np.pi * (rng.uniform() + np.arange(6) / 6))
                low = [str(preimages(f, u).verdict) for u in ring
                       if (pv := preimages(f, u).verdict).kind == "finite" and pv.count < v0.count]
                if low:
                    _fail(res, f, "valence drops under perturbation", target=complex(w),
                          center=str(v0), nearby=low)


@suite("degenerate_range")
def _degenerate(res, spec, cell_n, catalog):
    rng = np.random.default_rng(spec.seed)
    for f in degenerate_polynomials(spec.seed, spec.count, spec.max_degree, spec.coeff_bound):
        res.cases += 1
        rep = detect_degeneracy(f)
        z = _disc(rng, 64, 3.0)
        w = f(z)
        if rep.kind == "constant_range":
            ok = np.allclose(w, rep.alpha)
        elif rep.kind == "line_range":
            t = (w - rep.alpha) / rep.beta
            ok = np.all(np.abs(t.imag) <= 1e-9 * np.maximum(1.0, np.abs(t)))
        else:
            ok = False
        if not ok:
            _fail(res, f, "degenerate polynomial image not a point or line", kind=rep.kind)


@suite("empty_interior_poly")
def _empty_interior(res, spec, cell_n, catalog):
    coarse, fine = max(cell_n // 2, 16), cell_n
    for f in spec.polynomials():
        a = _analysis(f, cell_n)
        ps = PartitionSet.build(a.image, a.cluster)
        res.cases += 1
        fr = []
        for n in (coarse, fine):
            g = build_range_partition(ps, a.range_viewport, n, dilation=0)
            fr.append(float(g.raw_mask.mean()))
        if fr[1] > 0 and fr[1] > 0.7 * fr[0]:
            _fail(res, f, "rasterized partitioning set does not thin out", fractions=fr,
                  grids=[coarse, fine])


@suite("infinite_dense_probe")
def _infinite_dense(res, spec, cell_n, catalog):
    """Informational: infinite-valence points on degenerate ranges."""
    rng = np.random.default_rng(spec.seed)
    for f in degenerate_polynomials(spec.seed, min(spec.count, 10)):
        rep = detect_degeneracy(f)
        if rep.kind != "line_range":
            continue
        t = rng.uniform(-3, 3, 5)
        verdicts = [str(preimages(f, rep.alpha + s * rep.beta).verdict) for s in t]
        res.cases += 1
        res.info.append({"function": _spec_of(f), "on_line": verdicts})
    flat = CATALOG["flatpoly"].map
    res.info.append({"function": "flatpoly", "w=0": str(preimages(flat, 0).verdict)})


@suite("oracle_equivalence")
def _oracle(res, spec, cell_n, catalog):
    rng = np.random.default_rng(spec.seed)
    for f in spec.polynomials()[:20]:
        for w in _targets(f, rng, 10):
            res.cases += 1
            cert = preimages(f, w)
            orc = oracle_preimages(f, w, oracle_box(f, w, cert.solutions), 1024)
            ok, detail = compare_sets(cert.solutions, orc.solutions)
            if not ok:
                _fail(res, f, "certified and oracle preimages differ", target=complex(w),
                      certified=[[z.real, z.imag] for z in cert.solutions],
                      oracle=[[z.real, z.imag] for z in orc.solutions], detail=detail)


def compare_sets(a, b, tol=1e-6):
    """Point-for-point agreement of two solution sets."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.size != b.size:
        return False, f"sizes {a.size} vs {b.size}"
    if a.size == 0:
        return True, ""
    d = np.abs(a[:, None] - b[None, :])
    if np.all(d.min(axis=1) <= tol) and np.all(d.min(axis=0) <= tol):
        return True, ""
    return False, f"max mismatch {max(d.min(axis=1).max(), d.min(axis=0).max()):.3g}"


CRITERION_SUITES = ("constant_valence", "wilmshurst", "bezout_alternative", "even_jump",
                    "covering_uniformity", "lsc_probe", "degenerate_range", "empty_interior_poly")

