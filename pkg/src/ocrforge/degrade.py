"""Seeded visual degradations with exact ground-truth transport.

Geometric operations (``rotate``, ``perspective``) map every region quad
through the same homography used to warp the pixels, so annotations stay
exact. Photometric operations never touch quads.
"""
from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import ChainError, DegenerateQuad, DegenerateWarp, OcrForgeError, ParamOutOfRange, UnsupportedKind
from .geometry import (
    Homography,
    alpha_blend,
    clip_polygon_to_rect,
    compose,
    homography_from_quads,
    quad_bbox,
    rect_quad,
    resize_bilinear,
    round_u8,
    signed_area,
    warp_image,
)
from .glyphs import DEFAULT_FONT, GlyphSource
from .render import RenderedSample, compose_line_alpha
from .rng import Rng

WARP_FILL = (128, 128, 128)

# kind -> {param: (lo, hi, default, is_int)}
PARAMS = {
    "blur": {"sigma": (0.0, 8.0, 2.0, False)},
    "rotate": {"angle": (-45.0, 45.0, 15.0, False)},
    "perspective": {"jitter": (0.0, 0.15, 0.05, False)},
    "occlude": {"coverage": (0.0, 0.6, 0.3, False)},
    "block_compress": {"quality": (1, 100, 30, True)},
    "resample": {"factor": (1.0, 8.0, 2.0, False)},
    "contrast": {"c": (0.0, 1.5, 0.5, False)},
    "clutter": {"n": (0, 64, 8, True)},
}

CONDITION_TAGS = {
    "blur": "blur",
    "rotate": "rotation",
    "perspective": "perspective",
    "occlude": "occlusion",
    "block_compress": "compression",
    "resample": "low_resolution",
    "contrast": "low_contrast",
    "clutter": "clutter",
}

GEOMETRIC_KINDS = ("rotate", "perspective")

# JPEG Annex K luminance quantization table.
JPEG_LUMA_TABLE = np.array([
    [16, 11, 10, 16, 24, 40, 51, 61],
    [12, 12, 14, 19, 26, 58, 60, 55],
    [14, 13, 16, 24, 40, 57, 69, 56],
    [14, 17, 22, 29, 51, 87, 80, 62],
    [18, 22, 37, 56, 68, 109, 103, 77],
    [24, 35, 55, 64, 81, 104, 113, 92],
    [49, 64, 78, 87, 103, 121, 120, 101],
    [72, 92, 95, 98, 112, 100, 103, 99],
], dtype=np.float64)


def validate_params(kind: str, params: dict) -> dict:
    """Fill defaults and range-check each value; returns a new dict."""
    if kind not in PARAMS:
        raise UnsupportedKind(f"unknown degradation kind {kind!r}")
    table = PARAMS[kind]
    unknown = set(params) - set(table)
    if unknown:
        raise ParamOutOfRange(f"{kind}: unknown parameter(s) {sorted(unknown)}")
    out = {}
    for name, (lo, hi, default, is_int) in table.items():
        value = params.get(name, default)
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise ParamOutOfRange(f"{kind}.{name}={value!r} is not a number") from None
        if is_int:
            if value != int(value):
                raise ParamOutOfRange(f"{kind}.{name} must be an integer, got {value}")
            value = int(value)
        if not (lo <= value <= hi) or math.isnan(value):
            raise ParamOutOfRange(f"{kind}.{name}={value} outside [{lo}, {hi}]")
        out[name] = value
    return out


@dataclass(frozen=True)
class DegradationSpec:
    kind: str
    params: dict
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "params", validate_params(self.kind, dict(self.params)))
        if not 0 <= int(self.seed) < 2**64:
            raise ParamOutOfRange("seed must be a uint64")
        object.__setattr__(self, "seed", int(self.seed))

    def to_json(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params), "seed": str(self.seed)}

    @classmethod
    def from_json(cls, obj: dict) -> "DegradationSpec":
        return cls(obj["kind"], obj.get("params", {}), int(obj.get("seed", "0")))


@dataclass
class DegradedSample:
    sample: RenderedSample
    applied: list[DegradationSpec] = field(default_factory=list)
    condition_tags: list[str] = field(default_factory=lambda: ["clean"])
    # composed homography of every geometric op so far (clean frame -> current frame)
    geometry: Homography = field(default_factory=Homography.identity)

    @classmethod
    def from_rendered(cls, rendered: RenderedSample) -> "DegradedSample":
        s = copy.copy(rendered)
        s.image = rendered.image.copy()
        s.regions = [copy.copy(r) for r in rendered.regions]
        for r in s.regions:
            r.quad = np.array(r.quad, dtype=np.float64)
        s.ink = list(rendered.ink)
        return cls(s)

    @property
    def image(self) -> np.ndarray:
        return self.sample.image

    @property
    def regions(self):
        return self.sample.regions


def condition_tags(applied) -> list[str]:
    tags: list[str] = []
    for spec in applied:
        tag = CONDITION_TAGS[spec.kind]
        if tag not in tags:
            tags.append(tag)
    return tags or ["clean"]


# ---------------------------------------------------------------- photometric


def gaussian_kernel(sigma: float) -> np.ndarray:
    radius = int(math.ceil(3 * sigma))
    i = np.arange(-radius, radius + 1, dtype=np.float64)
    w = np.exp(-(i * i) / (2 * sigma * sigma))
    return w / w.sum()


def _convolve_axis(a: np.ndarray, kernel: np.ndarray, axis: int) -> np.ndarray:
    # symmetric kernel, so correlation equals convolution; 'nearest' clamps to edge
    return ndimage.correlate1d(a, kernel, axis=axis, mode="nearest", output=np.float64)


def gaussian_blur(img: np.ndarray, sigma: float) -> np.ndarray:
    """Separable Gaussian blur, radius ``ceil(3 sigma)``, clamp-to-edge borders."""
    if not 0 <= sigma <= 8:
        raise ParamOutOfRange(f"sigma={sigma} outside [0, 8]")
    if sigma == 0:
        return img.copy()
    k = gaussian_kernel(sigma)
    tmp = _convolve_axis(img, k, axis=1)
    return round_u8(_convolve_axis(tmp, k, axis=0))


def dct_matrix(n: int = 8) -> np.ndarray:
    """Orthonormal DCT-II matrix (rows are basis functions)."""
    k = np.arange(n)[:, None]
    x = np.arange(n)[None, :]
    c = np.cos((2 * x + 1) * k * np.pi / (2 * n)) * math.sqrt(2.0 / n)
    c[0] /= math.sqrt(2.0)
    return c


_DCT8 = dct_matrix(8)


def quant_table(quality: int) -> np.ndarray:
    s = (5000.0 / quality if quality < 50 else 200.0 - 2.0 * quality) / 100.0
    return np.maximum(1.0, np.floor(JPEG_LUMA_TABLE * s + 0.5))


def block_compress(img: np.ndarray, quality: int) -> np.ndarray:
    """JPEG-like 8x8 DCT quantization round trip on each channel."""
    if not (1 <= quality <= 100) or int(quality) != quality:
        raise ParamOutOfRange(f"quality={quality} outside [1, 100]")
    h, w = img.shape[:2]
    ph, pw = -h % 8, -w % 8
    a = np.pad(img.astype(np.float64), ((0, ph), (0, pw), (0, 0)), mode="edge") - 128.0
    H, W = a.shape[:2]
    tiles = a.reshape(H // 8, 8, W // 8, 8, 3).transpose(0, 2, 4, 1, 3)  # (ty, tx, c, 8, 8)
    c = _DCT8
    coef = c @ tiles @ c.T
    q = quant_table(int(quality))
    # snap so exact half-integer quotients round away from zero regardless of float noise
    r = np.round(coef / q, 9)
    quantized = np.sign(r) * np.floor(np.abs(r) + 0.5) * q
    rec = c.T @ quantized @ c + 128.0
    out = rec.transpose(0, 3, 1, 4, 2).reshape(H, W, 3)[:h, :w]
    return round_u8(out)


def resample(img: np.ndarray, factor: float) -> np.ndarray:
    """Bilinear downscale by ``factor`` and back up to the original size."""
    if not 1 <= factor <= 8:
        raise ParamOutOfRange(f"factor={factor} outside [1, 8]")
    if factor == 1:
        return img.copy()
    h, w = img.shape[:2]
    dw = max(1, int(math.floor(w / factor + 0.5)))
    dh = max(1, int(math.floor(h / factor + 0.5)))
    return resize_bilinear(resize_bilinear(img, dw, dh), w, h)


def adjust_contrast(img: np.ndarray, c: float) -> np.ndarray:
    if not 0 <= c <= 1.5:
        raise ParamOutOfRange(f"c={c} outside [0, 1.5]")
    if c == 1:
        return img.copy()
    return round_u8((img.astype(np.float64) - 128.0) * c + 128.0)


# ---------------------------------------------------------------- geometric


def warp_homography(kind: str, params: dict, w: int, h: int, rng: Rng) -> Homography:
    """The homography a ``rotate``/``perspective`` spec applies to a ``w x h`` canvas."""
    params = validate_params(kind, params)
    if kind == "rotate":
        angle = params["angle"]
        if angle == 0:
            return Homography.identity()
        return Homography.rotation(angle, w / 2.0, h / 2.0)
    if kind == "perspective":
        jitter = params["jitter"] * min(w, h)
        canvas = rect_quad(0, 0, w, h)
        offsets = np.array([rng.uniform_range(-jitter, jitter) for _ in range(8)]).reshape(4, 2)
        if jitter == 0:
            return Homography.identity()
        try:
            return homography_from_quads(canvas, canvas + offsets)
        except DegenerateQuad as exc:
            raise DegenerateWarp(str(exc)) from None
    raise UnsupportedKind(f"{kind!r} is not a geometric degradation")


def geometric_warp(s: DegradedSample, kind: str, params: dict, rng: Rng) -> DegradedSample:
    img = s.sample.image
    h_px, w_px = img.shape[:2]
    hom = warp_homography(kind, params, w_px, h_px, rng)
    if np.array_equal(hom.m, np.eye(3)):
        return s
    s.sample.image = warp_image(img, hom, w_px, h_px, fill=WARP_FILL)
    for region in s.sample.regions:
        region.quad = hom.apply_points(region.quad)
        q = region.quad
        if q[:, 0].min() < 0 or q[:, 1].min() < 0 or q[:, 0].max() > w_px or q[:, 1].max() > h_px:
            region.clipped = True
    s.sample.ink = []  # ink patches are only valid in the clean frame
    s.geometry = compose(hom, s.geometry)
    return s


# ---------------------------------------------------------------- occlusion


def occlusion_fraction(quad, rects) -> float:
    """Exact area of ``quad`` covered by the union of axis-aligned ``rects`` over quad area.

    ``rects`` are ``(x0, y0, x1, y1)``. The union is decomposed on the grid of
    rectangle edges; each covered run is clipped against the quad.
    """
    area = signed_area(quad)
    if area <= 0 or not rects:
        return 0.0
    xs = sorted({v for r in rects for v in (r[0], r[2])})
    ys = sorted({v for r in rects for v in (r[1], r[3])})
    covered = 0.0
    for j in range(len(ys) - 1):
        ya, yb = ys[j], ys[j + 1]
        run_start = None
        for i in range(len(xs)):
            inside = i < len(xs) - 1 and any(
                r[0] <= xs[i] and xs[i + 1] <= r[2] and r[1] <= ya and yb <= r[3] for r in rects
            )
            if inside and run_start is None:
                run_start = xs[i]
            elif not inside and run_start is not None:
                clipped = clip_polygon_to_rect(quad, run_start, ya, xs[i], yb)
                if len(clipped) >= 3:
                    covered += signed_area(clipped)
                run_start = None
    return min(1.0, max(0.0, covered / area))


def occlude(s: DegradedSample, coverage: float, rng: Rng) -> DegradedSample:
    """Paint opaque rectangles until each target region is covered to ``coverage``."""
    if not 0 <= coverage <= 0.6:
        raise ParamOutOfRange(f"coverage={coverage} outside [0, 0.6]")
    regions = s.sample.regions
    if coverage == 0 or not regions:
        return s
    img = s.sample.image.copy()
    h, w = img.shape[:2]
    targets = [r for r in regions if rng.chance(0.5)]
    if not targets:
        targets = [regions[rng.below(len(regions))]]
    rects: list[tuple[int, int, int, int]] = []
    for region in targets:
        bx0, by0, bx1, by1 = quad_bbox(region.quad)
        bx0, by0 = max(bx0, 0), max(by0, 0)
        bx1, by1 = min(bx1, w), min(by1, h)
        if bx1 <= bx0 or by1 <= by0:
            continue
        bw, bh = bx1 - bx0, by1 - by0
        own: list[tuple[int, int, int, int]] = []
        for _ in range(64):
            if occlusion_fraction(region.quad, own) >= coverage:
                break
            rw = rng.randint(max(1, math.ceil(bw * 0.2)), bw)
            rh = rng.randint(max(1, math.ceil(bh * 0.4)), bh)
            x0 = rng.randint(bx0 - rw // 2, bx1 - (rw + 1) // 2)
            y0 = rng.randint(by0 - rh // 2, by1 - (rh + 1) // 2)
            rect = (max(x0, 0), max(y0, 0), min(x0 + rw, w), min(y0 + rh, h))
            if rect[0] < rect[2] and rect[1] < rect[3]:
                own.append(rect)
        else:
            if occlusion_fraction(region.quad, own) < coverage:
                own.append((bx0, by0, bx1, by1))
        rects.extend(own)
    for x0, y0, x1, y1 in rects:
        if rng.chance(0.5):
            img[y0:y1, x0:x1] = np.array([rng.below(256) for _ in range(3)], dtype=np.uint8)
        else:
            n = (y1 - y0) * (x1 - x0) * 3
            noise = (rng.next_array(n) >> np.uint64(56)).astype(np.uint8)
            img[y0:y1, x0:x1] = noise.reshape(y1 - y0, x1 - x0, 3)
    s.sample.image = img
    for region in regions:
        frac = occlusion_fraction(region.quad, rects)
        region.occluded_fraction = max(region.occluded_fraction, frac)
    return s


# ---------------------------------------------------------------- clutter

_CLUTTER_CHARS = "ABCDEFGHJKLMNPQRSTUVWXYZ0123456789#*+-=/"


def _bbox_overlaps(a, b) -> bool:
    return not (a[2] <= b[0] or b[2] <= a[0] or a[3] <= b[1] or b[3] <= a[1])


def add_clutter(s: DegradedSample, n: int, glyphs: GlyphSource, rng: Rng) -> DegradedSample:
    """Draw up to ``n`` distractors (shapes or junk strings) clear of every ground-truth quad."""
    if not 0 <= n <= 64:
        raise ParamOutOfRange(f"n={n} outside [0, 64]")
    if n == 0:
        return s
    img = s.sample.image
    h, w = img.shape[:2]
    keepout = []
    for region in s.sample.regions:
        x0, y0, x1, y1 = quad_bbox(region.quad)
        keepout.append((x0 - 1, y0 - 1, x1 + 1, y1 + 1))
    for _ in range(n):
        kind = rng.below(3)
        if kind == 2:
            text = "".join(rng.choice(_CLUTTER_CHARS) for _ in range(rng.randint(2, 5)))
            scale = rng.randint(1, 2)
            bw, bh = len(text) * 8 * scale, 16 * scale
        else:
            bw, bh = rng.randint(6, max(6, w // 6)), rng.randint(3, max(3, h // 6))
        if bw >= w or bh >= h:
            continue
        box = None
        for _ in range(1000):
            x0, y0 = rng.randint(0, w - bw), rng.randint(0, h - bh)
            cand = (x0, y0, x0 + bw, y0 + bh)
            if not any(_bbox_overlaps(cand, k) for k in keepout):
                box = cand
                break
        if box is None:
            continue
        color = np.array([rng.below(256) for _ in range(3)], dtype=np.uint8)
        if kind == 0:  # filled rectangle
            alpha = np.full((bh, bw), 255, dtype=np.uint8)
        elif kind == 1:  # filled ellipse
            yy, xx = np.mgrid[0:bh, 0:bw]
            inside = ((xx + 0.5 - bw / 2) / (bw / 2)) ** 2 + ((yy + 0.5 - bh / 2) / (bh / 2)) ** 2 <= 1
            alpha = np.where(inside, 255, 0).astype(np.uint8)
        else:
            alpha = compose_line_alpha(text, bw, bh, scale, glyphs)
        patch = np.empty((bh, bw, 3), dtype=np.uint8)
        patch[:] = color
        img = alpha_blend(img, patch, alpha, box[:2])
    s.sample.image = img
    return s


# ---------------------------------------------------------------- chains


def apply_spec(s: DegradedSample, spec: DegradationSpec, glyphs: GlyphSource = DEFAULT_FONT) -> DegradedSample:
    rng = Rng(spec.seed)
    p = spec.params
    kind = spec.kind
    if kind == "blur":
        s.sample.image = gaussian_blur(s.sample.image, p["sigma"])
    elif kind in GEOMETRIC_KINDS:
        geometric_warp(s, kind, p, rng)
    elif kind == "occlude":
        occlude(s, p["coverage"], rng)
    elif kind == "block_compress":
        s.sample.image = block_compress(s.sample.image, p["quality"])
    elif kind == "resample":
        s.sample.image = resample(s.sample.image, p["factor"])
    elif kind == "contrast":
        s.sample.image = adjust_contrast(s.sample.image, p["c"])
    elif kind == "clutter":
        add_clutter(s, p["n"], glyphs, rng)
    else:
        raise UnsupportedKind(kind)
    return s


def apply_chain(rendered: RenderedSample, chain, glyphs: GlyphSource = DEFAULT_FONT) -> DegradedSample:
    """Apply ``chain`` in order to a copy of ``rendered``."""
    s = DegradedSample.from_rendered(rendered)
    for index, spec in enumerate(chain):
        try:
            apply_spec(s, spec, glyphs)
        except OcrForgeError as exc:
            raise ChainError(index, spec.kind, exc) from exc
        s.applied.append(spec)
    s.condition_tags = condition_tags(s.applied)
    return s


def parse_chain(text: str) -> list[tuple[str, dict]]:
    """Parse ``"kind:key=val[,key=val][;kind:...]"`` into ``(kind, raw_params)``.

    A value may be a range ``lo..hi``; it stays a string until
    :func:`resolve_chain` samples it.
    """
    out = []
    for part in (text or "").split(";"):
        part = part.strip()
        if not part:
            continue
        kind, _, rest = part.partition(":")
        kind = kind.strip()
        if kind not in PARAMS:
            raise UnsupportedKind(f"unknown degradation kind {kind!r}")
        params = {}
        for kv in rest.split(","):
            kv = kv.strip()
            if not kv:
                continue
            key, sep, val = kv.partition("=")
            if not sep:
                raise ParamOutOfRange(f"expected key=value in {part!r}")
            params[key.strip()] = val.strip()
        # validate with each range's endpoints
        for probe in (0, 1):
            validate_params(kind, {k: _range_ends(v)[probe] for k, v in params.items()})
        out.append((kind, params))
    return out


def _range_ends(value: str) -> tuple[float, float]:
    if ".." in value:
        lo, hi = value.split("..", 1)
        return float(lo), float(hi)
    return float(value), float(value)


def resolve_chain(parsed, sample_seed: int) -> list[DegradationSpec]:
    """Concrete specs for one sample: ranges sampled, per-spec seeds derived."""
    from .rng import derive_seed

    rng = Rng(derive_seed(sample_seed, 0xC4A1))
    specs = []
    for k, (kind, raw) in enumerate(parsed):
        params = {}
        for key, value in raw.items():
            lo, hi = _range_ends(value)
            if lo == hi:
                params[key] = lo
            elif PARAMS[kind][key][3]:
                params[key] = rng.randint(int(lo), int(hi))
            else:
                params[key] = rng.uniform_range(lo, hi)
        specs.append(DegradationSpec(kind, params, derive_seed(sample_seed, k + 1)))
    return specs
