"""Text-first scene composition with exact ground-truth quads."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .corpus import ParallelTextPair, TextSample
from .errors import LayoutOverflow, ParamOutOfRange, UnrenderableAtMinimumScale, UnsupportedKind
from .geometry import alpha_blend, luminance, quad_bbox, rect_quad, resize_bilinear, round_u8
from .glyphs import DEFAULT_FONT, GlyphSource, line_metrics, max_fitting_scale
from .rng import Rng

BACKGROUND_KINDS = ("solid", "gradient", "noise_texture", "imported")
LAYOUT_KINDS = ("document", "scattered")
MIN_CONTRAST = 60.0
NOISE_AMPLITUDE = 24

# Per-channel (lo, hi) ranges for background base colors, keyed by template family.
# Receipts sit on light paper tones; menus and signs get darker or saturated plates.
PALETTES = {
    "receipt": ((225, 255), (220, 250), (205, 240)),
    "menu": ((30, 240), (20, 210), (10, 170)),
    "sign": ((0, 255), (0, 255), (0, 255)),
    "generic": ((0, 255), (0, 255), (0, 255)),
}


@dataclass
class TextRegion:
    quad: np.ndarray
    text: str
    line_index: int
    language: str
    occluded_fraction: float = 0.0
    clipped: bool = False


@dataclass(frozen=True)
class LayoutStyle:
    kind: str = "document"
    max_lines: int = 16
    gap: int = 4
    margin: int = 8
    min_scale: int = 1
    max_scale: int = 3

    def __post_init__(self):
        if self.kind not in LAYOUT_KINDS:
            raise UnsupportedKind(f"unknown layout style {self.kind!r}")
        if not 1 <= self.min_scale <= self.max_scale:
            raise ParamOutOfRange("need 1 <= min_scale <= max_scale")


class LineRaster(NamedTuple):
    patch: np.ndarray
    alpha: np.ndarray
    scale: int


@dataclass
class RenderedSample:
    image: np.ndarray
    regions: list[TextRegion]
    pair: ParallelTextPair
    background_kind: str
    background: np.ndarray | None = None
    ink: list[np.ndarray] = field(default_factory=list)  # per-region alpha patches at quad bbox
    text_colors: list[tuple[int, int, int]] = field(default_factory=list)

    @property
    def full_text_src(self) -> str:
        return "\n".join(r.text for r in sorted(self.regions, key=lambda r: r.line_index))


# ---------------------------------------------------------------- backgrounds


def sample_color(rng: Rng, family: str = "generic") -> tuple[int, int, int]:
    ranges = PALETTES.get(family, PALETTES["generic"])
    return tuple(rng.randint(lo, hi) for lo, hi in ranges)


def _value_noise(rng: Rng, w: int, h: int, cell: int, amplitude: float) -> np.ndarray:
    gw = w // cell + 2
    gh = h // cell + 2
    lattice = (rng.uniform_array(gw * gh).reshape(gh, gw) * 2.0 - 1.0) * amplitude
    ys = (np.arange(h) + 0.5) / cell
    xs = (np.arange(w) + 0.5) / cell
    x0 = np.floor(xs).astype(int)
    y0 = np.floor(ys).astype(int)
    fx = xs - x0
    fy = ys - y0
    fx = fx * fx * (3 - 2 * fx)
    fy = fy * fy * (3 - 2 * fy)
    top = lattice[y0][:, x0] * (1 - fx) + lattice[y0][:, x0 + 1] * fx
    bot = lattice[y0 + 1][:, x0] * (1 - fx) + lattice[y0 + 1][:, x0 + 1] * fx
    return top * (1 - fy)[:, None] + bot * fy[:, None]


def generate_background(kind: str, w: int, h: int, rng: Rng, *, family: str = "generic",
                        palette=None, imported: np.ndarray | None = None) -> np.ndarray:
    """Procedural background of ``kind``.

    ``palette`` overrides the per-family color ranges; ``imported`` is the
    source image for the ``imported`` kind.
    """
    if w < 32 or h < 32:
        raise ParamOutOfRange("background must be at least 32x32")
    ranges = palette or PALETTES.get(family, PALETTES["generic"])

    def color():
        return np.array([rng.randint(lo, hi) for lo, hi in ranges], dtype=np.float64)

    if kind == "solid":
        return np.broadcast_to(color().astype(np.uint8), (h, w, 3)).copy()
    if kind == "gradient":
        c0, c1 = color(), color()
        theta = rng.uniform() * 2 * np.pi
        dx, dy = np.cos(theta), np.sin(theta)
        ys, xs = np.mgrid[0:h, 0:w]
        proj = (xs + 0.5) * dx + (ys + 0.5) * dy
        corners = np.array([0, w * dx, h * dy, w * dx + h * dy])
        t = (proj - corners.min()) / (corners.max() - corners.min())
        return round_u8(c0 + (c1 - c0) * t[..., None])
    if kind == "noise_texture":
        base = color()
        # two octaves whose amplitudes sum to the jitter bound
        n = _value_noise(rng, w, h, 32, 16.0) + _value_noise(rng, w, h, 6, 8.0)
        n = np.clip(n, -NOISE_AMPLITUDE, NOISE_AMPLITUDE)
        return round_u8(base + n[..., None])
    if kind == "imported":
        if imported is None:
            raise UnsupportedKind("imported background needs a source image")
        return resize_bilinear(np.asarray(imported, dtype=np.uint8)[..., :3], w, h)
    raise UnsupportedKind(f"unknown background kind {kind!r}")


# ---------------------------------------------------------------- layout


def _fits_lines(lines, scale, avail_w, avail_h, gap, glyphs):
    heights = []
    for line in lines:
        adv, lh = line_metrics(line, glyphs, scale)
        if adv > avail_w:
            return False
        heights.append(lh)
    return sum(heights) + gap * (len(lines) - 1) <= avail_h


def _rects_disjoint(a, b, gap):
    return a[2] + gap <= b[0] or b[2] + gap <= a[0] or a[3] + gap <= b[1] or b[3] + gap <= a[1]


def layout_text(sample: TextSample, w: int, h: int, style: LayoutStyle, rng: Rng,
                glyphs: GlyphSource = DEFAULT_FONT) -> list[np.ndarray]:
    """One axis-aligned integer quad per line, tight to the line's advance box."""
    lines = sample.lines
    if len(lines) > style.max_lines:
        raise LayoutOverflow(f"{len(lines)} lines exceed max_lines={style.max_lines}")
    avail_w = w - 2 * style.margin
    avail_h = h - 2 * style.margin

    if style.kind == "document":
        fitting = [s for s in range(style.min_scale, style.max_scale + 1)
                   if _fits_lines(lines, s, avail_w, avail_h, style.gap, glyphs)]
        if not fitting:
            raise LayoutOverflow("text does not fit the canvas at minimum scale")
        scale = fitting[rng.below(len(fitting))]
        quads = []
        y = style.margin
        for line in lines:
            adv, lh = line_metrics(line, glyphs, scale)
            quads.append(rect_quad(style.margin, y, style.margin + adv, y + lh))
            y += lh + style.gap
        return quads

    # Retry the whole placement with a lower scale cap before giving up.
    for cap in range(style.max_scale, style.min_scale - 1, -1):
        placed = _scatter(lines, w, h, style, cap, rng, glyphs)
        if placed is not None:
            return [rect_quad(*r) for r in placed]
    raise LayoutOverflow("could not place all lines without overlap")


def _scatter(lines, w, h, style, cap, rng, glyphs):
    avail_w = w - 2 * style.margin
    avail_h = h - 2 * style.margin
    placed: list[tuple[int, int, int, int]] = []
    for line in lines:
        scales = [s for s in range(style.min_scale, cap + 1)
                  if _fits_lines([line], s, avail_w, avail_h, 0, glyphs)]
        if not scales:
            raise LayoutOverflow(f"line {line!r} does not fit at minimum scale")
        scale = scales[rng.below(len(scales))]
        rect = None
        while rect is None:
            adv, lh = line_metrics(line, glyphs, scale)
            for _ in range(1000):
                x0 = rng.randint(style.margin, w - style.margin - adv)
                y0 = rng.randint(style.margin, h - style.margin - lh)
                cand = (x0, y0, x0 + adv, y0 + lh)
                if all(_rects_disjoint(cand, p, style.gap) for p in placed):
                    rect = cand
                    break
            else:
                if scale <= style.min_scale:
                    return None
                scale -= 1
        placed.append(rect)
    return placed


# ---------------------------------------------------------------- rasterization


def compose_line_alpha(text: str, width: int, height: int, scale: int,
                       glyphs: GlyphSource, x_offset: int = 0) -> np.ndarray:
    """Coverage mask of ``text`` laid left to right at ``scale``, vertically centered."""
    alpha = np.zeros((height, width), dtype=np.uint8)
    _, lh = line_metrics(text, glyphs, scale)
    y_off = (height - lh) // 2
    x = x_offset
    for ch in text:
        g = glyphs.glyph(ord(ch), scale)
        bh, bw = g.bitmap.shape
        x0, x1 = max(x, 0), min(x + bw, width)
        y0, y1 = max(y_off, 0), min(y_off + bh, height)
        if x0 < x1 and y0 < y1:
            sub = g.bitmap[y0 - y_off:y1 - y_off, x0 - x:x1 - x]
            np.maximum(alpha[y0:y1, x0:x1], sub, out=alpha[y0:y1, x0:x1])
        x += g.advance
    return alpha


def rasterize_line(text: str, quad, glyphs: GlyphSource = DEFAULT_FONT,
                   color=(0, 0, 0), max_scale: int = 256) -> LineRaster:
    """Render ``text`` at the largest integer scale fitting the quad's bounding box."""
    if not text:
        raise ValueError("cannot rasterize empty text")
    x0, y0, x1, y1 = quad_bbox(quad)
    w, h = x1 - x0, y1 - y0
    scale = max_fitting_scale(text, w, h, glyphs, max_scale)
    if scale < 1:
        raise UnrenderableAtMinimumScale(f"{text!r} does not fit {w}x{h} at scale 1")
    alpha = compose_line_alpha(text, w, h, scale, glyphs)
    patch = np.empty((h, w, 3), dtype=np.uint8)
    patch[:] = np.asarray(color, dtype=np.uint8)
    return LineRaster(patch, alpha, scale)


def choose_text_color(bg_luma: float, rng: Rng | None = None, palette=None) -> tuple[int, int, int]:
    """A text color at least ``MIN_CONTRAST`` luma away from ``bg_luma``.

    ``palette`` is a ``(dark, light)`` pair of candidate colors; without it
    candidates are drawn from ``rng``. Falls back to black or white.
    """
    if palette is None and rng is not None:
        palette = scene_text_palette(rng)
    if palette is not None:
        cand = palette[0] if bg_luma >= 128 else palette[1]
        if abs(float(luminance(cand)) - bg_luma) >= MIN_CONTRAST:
            return tuple(int(c) for c in cand)
    return (0, 0, 0) if bg_luma >= 128 else (255, 255, 255)


def scene_text_palette(rng: Rng):
    dark = tuple(rng.randint(0, 90) for _ in range(3))
    light = tuple(rng.randint(170, 255) for _ in range(3))
    return dark, light


def compose_scene(pair: ParallelTextPair, w: int, h: int, style: LayoutStyle, bg: str,
                  glyphs: GlyphSource, rng: Rng, *, family: str = "generic",
                  imported: np.ndarray | None = None) -> RenderedSample:
    """Render every source line of ``pair`` over a generated background."""
    bg_rng, layout_rng, color_rng = rng.spawn(), rng.spawn(), rng.spawn()
    background = generate_background(bg, w, h, bg_rng, family=family, imported=imported)
    quads = layout_text(pair.src, w, h, style, layout_rng, glyphs)
    image = background.copy()
    regions, inks, colors = [], [], []
    langs = pair.src.line_languages
    palette = scene_text_palette(color_rng)
    for i, (line, quad) in enumerate(zip(pair.src.lines, quads)):
        x0, y0, x1, y1 = quad_bbox(quad)
        bg_luma = float(luminance(background[y0:y1, x0:x1].reshape(-1, 3).mean(axis=0)))
        color = choose_text_color(bg_luma, palette=palette)
        raster = rasterize_line(line, quad, glyphs, color)
        image = alpha_blend(image, raster.patch, raster.alpha, (x0, y0))
        regions.append(TextRegion(quad, line, i, langs[i]))
        inks.append(raster.alpha)
        colors.append(color)
    return RenderedSample(image, regions, pair, bg, background, inks, colors)
