"""SVG figures of critical sets, their images and valence partitions."""

import io
from dataclasses import dataclass, field
from typing import Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.colors import to_rgba  # noqa: E402
from matplotlib.lines import Line2D  # noqa: E402
from matplotlib.patches import Patch  # noqa: E402

PRECISION = 6

# region fill colour by valence; index k % len for large valences
VALENCE_PALETTE = ("#f7f7f7", "#c6dbef", "#fdd0a2", "#c7e9c0", "#fcbba1", "#dadaeb",
                   "#fee391", "#a1d99b", "#9ecae1", "#fc9272")
INFINITE_COLOR = "#bdbdbd"
UNKNOWN_COLOR = "#ffffff"

DEFAULT_STYLES = {
    "critical": dict(color="#08519c", lw=1.2, label="critical set S"),
    "image": dict(color="#a50f15", lw=1.0, label="f(S)"),
    "cluster": dict(color="#54278f", lw=1.0, ls="--", label="cluster set"),
    "barrier": dict(color="#252525", label="barrier"),
    "samples": dict(color="#000000", marker=".", ms=3, label="sample points"),
    "special": dict(color="#d94801", ms=6, label="special points"),
}
KIND_GLYPHS = {"N": "o", "F1": "^", "F2": "s", "F3": "D", "cusp": "v"}


class RenderError(ValueError):
    pass


@dataclass
class Layer:
    kind: str  # critical | image | cluster | barrier | samples | special | regions
    polylines: list = field(default_factory=list)
    points: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))
    kinds: list = field(default_factory=list)  # glyph keys for special points
    grid: object = None  # PartitionGrid for regions and barriers
    values: dict = field(default_factory=dict)  # component id -> valence (int | str)
    labels: list = field(default_factory=list)  # (position, text)

    @property
    def empty(self):
        if self.kind in ("regions", "barrier"):
            return self.grid is None
        return not any(len(p) for p in self.polylines) and len(self.points) == 0


@dataclass
class RenderSpec:
    viewport: tuple
    title: str = ""
    styles: dict = field(default_factory=dict)
    size: tuple = (6.0, 6.0)
    label_positions: Optional[list] = None

    def style(self, kind):
        s = dict(DEFAULT_STYLES.get(kind, {}))
        s.update(self.styles.get(kind, {}))
        return s


def valence_color(v):
    if v is None or v == "unknown":
        return UNKNOWN_COLOR
    if v == "infinite":
        return INFINITE_COLOR
    return VALENCE_PALETTE[int(v) % len(VALENCE_PALETTE)]


def _r(a):
    return np.round(np.asarray(a, dtype=complex), PRECISION)


def _region_image(layer):
    g = layer.grid
    img = np.zeros(g.labels.shape + (4,))
    for lab in range(1, g.n_components + 1):
        img[g.labels == lab] = to_rgba(valence_color(layer.values.get(lab)))
    return img


def render(layers, spec):
    """SVG text for the given layers; identical inputs give identical bytes."""
    layers = [l for l in layers if not l.empty]
    if not layers:
        raise RenderError("empty layer set")
    for l in layers:
        if l.grid is not None and tuple(np.round(l.grid.viewport, 9)) != tuple(np.round(spec.viewport, 9)):
            raise RenderError(f"layer {l.kind!r} has a different viewport")
    x0, x1, y0, y1 = spec.viewport
    with plt.rc_context({"svg.hashsalt": "harmval", "svg.fonttype": "none",
                         "font.size": 8, "axes.linewidth": 0.6}):
        fig, ax = plt.subplots(figsize=spec.size)
        handles = []
        for l in layers:
            st = spec.style(l.kind)
            if l.kind == "regions":
                ax.imshow(_region_image(l), origin="lower", extent=(x0, x1, y0, y1),
                          interpolation="nearest", zorder=0)
                for v in sorted(set(l.values.values()), key=str):
                    handles.append(Patch(facecolor=valence_color(v), edgecolor="#636363",
                                         label=f"Val = {v}"))
                for pos, text in l.labels:
                    pos = complex(_r(pos))
                    ax.text(pos.real, pos.imag, text, ha="center", va="center", zorder=5)
            elif l.kind == "barrier":
                m = np.ma.masked_where(~l.grid.barrier_mask, l.grid.barrier_mask)
                ax.imshow(m, origin="lower", extent=(x0, x1, y0, y1), cmap="Greys",
                          vmin=0, vmax=1.5, alpha=0.6, interpolation="nearest", zorder=1)
                handles.append(Patch(facecolor=st["color"], alpha=0.6, label=st["label"]))
            elif l.kind == "special":
                pts = _r(l.points)
                kinds = l.kinds or ["N"] * len(pts)
                for k in sorted(set(kinds)):
                    sel = pts[[kk == k for kk in kinds]]
                    mk = KIND_GLYPHS.get(k, "o")
                    ax.plot(sel.real, sel.imag, ls="none", marker=mk, color=st["color"],
                            ms=st["ms"], zorder=4)
                    handles.append(Line2D([], [], ls="none", marker=mk, color=st["color"],
                                          label=f"{st['label']}: {k}"))
            elif l.kind == "samples":
                pts = _r(l.points)
                ax.plot(pts.real, pts.imag, ls="none", marker=st["marker"], ms=st["ms"],
                        color=st["color"], zorder=3)
                handles.append(Line2D([], [], ls="none", marker=st["marker"],
                                      color=st["color"], label=st["label"]))
            else:
                kw = {k: v for k, v in st.items() if k != "label"}
                for p in l.polylines:
                    p = _r(p)
                    ax.plot(p.real, p.imag, zorder=2, **kw)
                if len(l.points):
                    pts = _r(l.points)
                    ax.plot(pts.real, pts.imag, ls="none", marker="o", ms=2.5,
                            color=st["color"], zorder=2)
                handles.append(Line2D([], [], label=st["label"], **kw))
        ax.set_xlim(x0, x1)
        ax.set_ylim(y0, y1)
        ax.set_aspect("equal")
        if spec.title:
            ax.set_title(spec.title)
        ax.legend(handles=handles, loc="upper right", fontsize=6, framealpha=0.85)
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None, "Creator": None})
        plt.close(fig)
    return buf.getvalue()


# -- layer builders -----------------------------------------------------------------------

def _label_point(grid, lab):
    """Cell centre of a component farthest from the barrier (stable tie-break)."""
    d = np.where(grid.labels == lab, grid.clearance(), -1.0)
    iy, ix = np.unravel_index(int(np.argmax(d)), d.shape)
    return grid.centers()[iy, ix]


def critical_layers(a):
    cs = a.critical
    layers = [Layer("critical", polylines=list(cs.polylines), points=cs.isolated_points)]
    sp = [c for c in a.classified]
    if sp:
        layers.append(Layer("special", points=np.array([c.location for c in sp]),
                            kinds=[c.kind for c in sp]))
    return layers


def image_layers(a):
    ic = a.image
    layers = [Layer("image", polylines=list(ic.polylines), points=ic.points)]
    if ic.cusps:
        layers.append(Layer("special", points=np.array([c.image for c in ic.cusps]),
                            kinds=["cusp"] * len(ic.cusps)))
    segs = a.cluster.segments(a.range_viewport)
    if segs or a.cluster.points.size:
        layers.append(Layer("cluster", polylines=[np.array(s) for s in segs],
                            points=a.cluster.points))
    return layers


def range_layers(a):
    g = a.range_grid
    vals = {c.id: _vkey(c.valence) for c in a.range_components}
    labels = [(_label_point(g, c.id), str(vals[c.id])) for c in a.range_components]
    return [Layer("regions", grid=g, values=vals, labels=labels),
            Layer("barrier", grid=g)] + image_layers(a)


def domain_layers(a):
    g = a.domain_grid
    if g is None:
        return []
    rv = {c.id: _vkey(c.valence) for c in a.range_components}
    vals = {c.id: rv.get(c.mapped_to) for c in a.domain_components}
    labels = [(_label_point(g, c.id), "" if c.n0 is None else str(c.n0))
              for c in a.domain_components]
    return [Layer("regions", grid=g, values=vals, labels=labels), Layer("barrier", grid=g),
            Layer("critical", polylines=list(a.critical.polylines),
                  points=a.critical.isolated_points)]


def _vkey(v):
    if v is None:
        return None
    return v.count if v.kind == "finite" else v.kind


def figure(a, which):
    """SVG for one figure type: critical, image, range or domain."""
    builders = {"critical": (critical_layers, a.viewport, "critical set"),
                "image": (image_layers, a.range_viewport, "image of the critical set"),
                "range": (range_layers, a.range_viewport, "valence partition of the range"),
                "domain": (domain_layers, a.domain_viewport or a.viewport,
                           "preimage partition")}
    if which not in builders:
        raise KeyError(f"unknown figure {which!r}")
    build, vp, title = builders[which]
    name = getattr(a.f, "name", None) or "f"
    return render(build(a), RenderSpec(tuple(vp), title=f"{name}: {title}"))
