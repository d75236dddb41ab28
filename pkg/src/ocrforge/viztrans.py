"""Modular visual text translation in independent, deterministic stages.

First a text mask is acquired (see :class:`MaskSource`). Erased text is
filled with a harmonic (Laplace) extension of the surrounding background;
replacement text is rendered with the bitmap font at the largest scale
fitting the region's rectified extent and warped into place with a
homography.

Nothing here draws random numbers, so translating the same job twice gives
identical bytes. Pixels outside the touched set (mask support plus
destination quad, dilated by :data:`PRESERVE_RADIUS`) are never written.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import (
    DataError,
    FullyMaskedImage,
    InvalidJob,
    MaskDimensionMismatch,
    NoRegionsFound,
    UnrenderableAtMinimumScale,
)
from .geometry import (
    Homography,
    alpha_blend,
    as_quad,
    dilate_mask,
    homography_from_quads,
    luminance,
    polygon_mask,
    quad_bbox,
    rect_quad,
    round_u8,
    warp_image,
)
from .glyphs import DEFAULT_FONT, GlyphSource, max_fitting_scale
from .render import MIN_CONTRAST, choose_text_color, compose_line_alpha

PRESERVE_RADIUS = 2
MASK_THRESHOLD = 128
INPAINT_TOL = 0.1
INPAINT_MAX_ITER = 2000
DETECTOR_MIN_AREA = 20
DETECTOR_MAX_AREA_FRAC = 0.2
DETECTOR_ASPECT = (0.05, 20.0)


class MaskSource(enum.Enum):
    GROUND_TRUTH = "ground_truth"
    IMPORTED = "imported"
    BASELINE_DETECTOR = "baseline_detector"


@dataclass
class AcquiredMask:
    """One text region found in an image.

    ``hint_index`` points back into the ``regions_hint`` list when the mask
    could be attributed to a known region, else ``None``.
    """

    quad: np.ndarray
    mask: np.ndarray  # uint8, 255 = text
    hint_index: int | None = None


def _support(mask: np.ndarray) -> np.ndarray:
    m = np.asarray(mask)
    return m.copy() if m.dtype == bool else m >= MASK_THRESHOLD


def rectified_size(quad) -> tuple[int, int]:
    """Width and height of a quad's rectified extent, from its edge-length means."""
    q = np.asarray(quad, dtype=np.float64)
    top = np.hypot(*(q[1] - q[0]))
    bottom = np.hypot(*(q[2] - q[3]))
    left = np.hypot(*(q[3] - q[0]))
    right = np.hypot(*(q[2] - q[1]))
    w = int(math.floor((top + bottom) / 2 + 0.5))
    h = int(math.floor((left + right) / 2 + 0.5))
    return max(w, 1), max(h, 1)


def _warp_into_frame(patch: np.ndarray, placement: Homography, height: int, width: int, quad):
    """Warp ``patch`` through ``placement`` into the quad's in-image bounding box.

    Returns ``(warped, (x0, y0))`` or ``None`` when the box misses the image.
    """
    x0, y0, x1, y1 = quad_bbox(quad)
    x0, y0 = max(x0, 0), max(y0, 0)
    x1, y1 = min(x1, width), min(y1, height)
    if x0 >= x1 or y0 >= y1:
        return None
    local = Homography.translation(-x0, -y0) @ placement
    fill = 0 if patch.ndim == 2 else (0, 0, 0)
    return warp_image(patch, local, x1 - x0, y1 - y0, fill=fill), (x0, y0)


# ---------------------------------------------------------------- stage (i): masks


def ground_truth_mask(text: str, quad, height: int, width: int,
                      glyphs: GlyphSource = DEFAULT_FONT) -> np.ndarray:
    """Re-rasterize a region's text the way the renderer drew it and map it into the image.

    For the axis-aligned integer quads of a clean render this reproduces the
    composition alpha exactly; for warped quads the line is drawn in the
    rectified frame and carried through the rect-to-quad homography.
    """
    out = np.zeros((height, width), dtype=np.uint8)
    if not text:
        return out
    q = as_quad(quad)
    rw, rh = rectified_size(q)
    scale = max_fitting_scale(text, rw, rh, glyphs)
    if scale < 1:
        return out
    alpha = compose_line_alpha(text, rw, rh, scale, glyphs)
    placed = _warp_into_frame(alpha, homography_from_quads(rect_quad(0, 0, rw, rh), q), height, width, q)
    if placed is None:
        return out
    warped, (x0, y0) = placed
    out[y0:y0 + warped.shape[0], x0:x0 + warped.shape[1]] = np.where(warped > 0, 255, 0)
    out[~polygon_mask(q, height, width, dilate=PRESERVE_RADIUS)] = 0
    return out


def otsu_threshold(values: np.ndarray) -> int:
    """Threshold ``t`` maximizing between-class variance of ``values < t`` vs ``>= t``."""
    hist = np.bincount(np.asarray(values, dtype=np.uint8).ravel(), minlength=256).astype(np.float64)
    total = hist.sum()
    levels = np.arange(256, dtype=np.float64)
    w0 = np.cumsum(hist)[:-1]  # class below t = k + 1
    m0 = np.cumsum(hist * levels)[:-1]
    w1 = total - w0
    mu_total = (hist * levels).sum()
    with np.errstate(divide="ignore", invalid="ignore"):
        between = (mu_total * w0 - total * m0) ** 2 / (w0 * w1)
    between[(w0 == 0) | (w1 == 0)] = -1.0
    k = int(np.argmax(between))
    if between[k] < 0:
        return 256  # single-level input: nothing separates
    return k + 1


def _components(binary: np.ndarray):
    labels, n = ndimage.label(binary)  # default structure is 4-connected
    for k, sl in enumerate(ndimage.find_objects(labels), start=1):
        yield labels[sl] == k, sl


def _assign(components, regions_hint, height, width) -> list[AcquiredMask]:
    """Merge components into the hint quad that contains them; others get their own box."""
    hint_areas = []
    for r in regions_hint or []:
        hint_areas.append(polygon_mask(r.quad, height, width, dilate=PRESERVE_RADIUS))
    merged: dict[int, np.ndarray] = {}
    loose: list[AcquiredMask] = []
    for comp, sl in components:
        full = np.zeros((height, width), dtype=bool)
        full[sl] = comp
        for i, area in enumerate(hint_areas):
            if not np.any(full & ~area):
                if i in merged:
                    merged[i] |= full
                else:
                    merged[i] = full
                break
        else:
            quad = rect_quad(sl[1].start, sl[0].start, sl[1].stop, sl[0].stop)
            loose.append(AcquiredMask(quad, np.where(full, 255, 0).astype(np.uint8)))
    out = [AcquiredMask(np.asarray(regions_hint[i].quad, dtype=np.float64),
                        np.where(m, 255, 0).astype(np.uint8), i) for i, m in sorted(merged.items())]
    return out + loose


def _detect(img: np.ndarray) -> list:
    h, w = img.shape[:2]
    luma = round_u8(luminance(img.astype(np.float64)))
    t = otsu_threshold(luma)
    bright = luma >= t
    n_bright = int(bright.sum())
    if n_bright == 0 or n_bright == bright.size:
        return []
    fg = bright if n_bright <= bright.size - n_bright else ~bright  # minority class is text
    kept = []
    for comp, sl in _components(fg):
        area = int(comp.sum())
        bh, bw = comp.shape
        if not DETECTOR_MIN_AREA <= area <= DETECTOR_MAX_AREA_FRAC * w * h:
            continue
        if not DETECTOR_ASPECT[0] <= bw / bh <= DETECTOR_ASPECT[1]:
            continue
        kept.append((comp, sl))
    return kept


def acquire_masks(img: np.ndarray, source: MaskSource | str, regions_hint=None, *,
                  masks=None, glyphs: GlyphSource = DEFAULT_FONT) -> list[AcquiredMask]:
    """Locate text in ``img`` and return one binary mask per region.

    ``regions_hint`` is a list of objects with ``quad`` and ``text``
    attributes. ``masks`` (imported source only) is either one composite
    mask or a list with one mask per hint region; entries may be arrays or
    paths to 8-bit grayscale images.
    """
    source = MaskSource(source)
    h, w = img.shape[:2]
    if source is MaskSource.GROUND_TRUTH:
        if regions_hint is None:
            raise InvalidJob("ground-truth masks need the region list")
        return [AcquiredMask(np.asarray(r.quad, dtype=np.float64),
                             ground_truth_mask(r.text, r.quad, h, w, glyphs), i)
                for i, r in enumerate(regions_hint)]

    if source is MaskSource.IMPORTED:
        if masks is None:
            raise InvalidJob("imported mask source needs mask files")
        from .imageio import read_mask

        arrays = masks if isinstance(masks, (list, tuple)) else [masks]
        comps = []
        for m in arrays:
            a = read_mask(m) if not isinstance(m, np.ndarray) else m
            if a.shape[:2] != (h, w):
                raise MaskDimensionMismatch(f"mask is {a.shape[1]}x{a.shape[0]}, image is {w}x{h}")
            comps.extend(_components(_support(a)))
    else:
        comps = _detect(img)
    if not comps:
        raise NoRegionsFound("no text components found")
    return _assign(comps, regions_hint, h, w)


# ---------------------------------------------------------------- stage (ii): inpainting


def _neighbor_sum(f: np.ndarray) -> np.ndarray:
    s = np.zeros_like(f)
    s[1:] += f[:-1]
    s[:-1] += f[1:]
    s[:, 1:] += f[:, :-1]
    s[:, :-1] += f[:, 1:]
    return s


def harmonic_fill(img: np.ndarray, mask: np.ndarray, tol: float = INPAINT_TOL,
                  max_iter: int = INPAINT_MAX_ITER) -> tuple[np.ndarray, int]:
    """Jacobi solve of the Laplace equation on masked pixels; returns (float image, iterations).

    Unmasked pixels are fixed boundary values. Each masked pixel is
    replaced by the mean of its in-image 4-neighbors until the largest
    per-pixel change drops below ``tol``.
    """
    img = np.asarray(img)
    m = _support(mask)
    if m.shape != img.shape[:2]:
        raise MaskDimensionMismatch(f"mask {m.shape} vs image {img.shape[:2]}")
    f = img.astype(np.float64)
    if not m.any():
        return f, 0
    if m.all():
        raise FullyMaskedImage("inpainting needs at least one unmasked pixel")
    start = f[~m].mean(axis=0)

    # masked pixels only see neighbors inside the mask's bbox grown by one
    ys, xs = np.nonzero(m)
    y0, y1 = max(ys.min() - 1, 0), min(ys.max() + 2, m.shape[0])
    x0, x1 = max(xs.min() - 1, 0), min(xs.max() + 2, m.shape[1])
    sub = f[y0:y1, x0:x1]
    sm = m[y0:y1, x0:x1]
    sub[sm] = start
    count = _neighbor_sum(np.ones(sm.shape))
    if sub.ndim == 3:
        count = count[..., None]
    it = 0
    for it in range(1, max_iter + 1):
        new = _neighbor_sum(sub) / count
        change = np.abs(new[sm] - sub[sm]).max()
        sub[sm] = new[sm]
        if change < tol:
            break
    return f, it


def inpaint(img: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Fill pixels with ``mask >= 128`` by harmonic extension; all others are untouched."""
    filled, _ = harmonic_fill(img, mask)
    out = np.array(img, copy=True)
    m = _support(mask)
    out[m] = round_u8(filled[m])
    return out


# ---------------------------------------------------------------- stage (iii): text


@dataclass(frozen=True)
class RenderStyle:
    """Replacement text styling.

    ``padding`` is the fraction of the rectified width and height kept
    clear on each side. ``color`` forces a text color; it is still checked
    against the background and replaced by black or white when the contrast
    is too low.
    """

    padding: float = 0.0
    color: tuple[int, int, int] | None = None

    def __post_init__(self):
        if not 0 <= self.padding < 0.5:
            raise InvalidJob(f"padding {self.padding} outside [0, 0.5)")


@dataclass
class FittedText:
    patch: np.ndarray
    alpha: np.ndarray
    placement: Homography
    scale: int
    color: tuple[int, int, int]
    contrast_fallback: bool = False


def fit_text(tgt_text: str, quad, glyphs: GlyphSource = DEFAULT_FONT, style: RenderStyle = RenderStyle(),
             bg_mean=None) -> FittedText:
    """Rasterize ``tgt_text`` for the quad's rectified frame.

    ``placement`` maps the patch rectangle onto ``quad``. ``bg_mean`` is the
    mean color of the inpainted background under the quad and drives the
    contrast rule.
    """
    if not tgt_text:
        raise InvalidJob("target text is empty")
    q = as_quad(quad)
    rw, rh = rectified_size(q)
    px = int(math.floor(style.padding * rw))
    py = int(math.floor(style.padding * rh))
    scale = max_fitting_scale(tgt_text, rw - 2 * px, rh - 2 * py, glyphs)
    if scale < 1:
        raise UnrenderableAtMinimumScale(f"{tgt_text!r} does not fit {rw}x{rh} at scale 1")
    inner = compose_line_alpha(tgt_text, rw - 2 * px, rh - 2 * py, scale, glyphs)
    alpha = np.zeros((rh, rw), dtype=np.uint8)
    alpha[py:rh - py, px:rw - px] = inner

    bg_luma = float(luminance(np.asarray(bg_mean, dtype=np.float64))) if bg_mean is not None else 255.0
    fallback = False
    if style.color is not None and abs(float(luminance(style.color)) - bg_luma) >= MIN_CONTRAST:
        color = tuple(int(c) for c in style.color)
    else:
        fallback = style.color is not None
        color = choose_text_color(bg_luma)
    patch = np.empty((rh, rw, 3), dtype=np.uint8)
    patch[:] = color
    placement = homography_from_quads(rect_quad(0, 0, rw, rh), q)
    return FittedText(patch, alpha, placement, scale, color, fallback)


# ---------------------------------------------------------------- jobs


@dataclass
class JobRegion:
    quad: np.ndarray
    mask: np.ndarray
    src_text: str
    tgt_text: str


@dataclass
class TranslationJob:
    image: np.ndarray
    regions: list[JobRegion]
    glyphs: GlyphSource = DEFAULT_FONT
    style: RenderStyle = field(default_factory=RenderStyle)

    def __post_init__(self):
        if not self.regions:
            raise InvalidJob("a translation job needs at least one region")
        h, w = self.image.shape[:2]
        for i, r in enumerate(self.regions):
            r.quad = as_quad(r.quad)
            if r.mask.shape != (h, w):
                raise MaskDimensionMismatch(f"region {i}: mask {r.mask.shape} vs image {(h, w)}")
            allowed = polygon_mask(r.quad, h, w, dilate=PRESERVE_RADIUS)
            if np.any(_support(r.mask) & ~allowed):
                raise InvalidJob(f"region {i}: mask extends beyond its quad")

    def touched(self) -> np.ndarray:
        """Pixels translation may modify: mask support and quad, dilated."""
        h, w = self.image.shape[:2]
        t = np.zeros((h, w), dtype=bool)
        for r in self.regions:
            t |= _support(r.mask) | polygon_mask(r.quad, h, w)
        return dilate_mask(t, PRESERVE_RADIUS)


@dataclass
class RegionOutcome:
    index: int
    ok: bool
    scale: int | None = None
    color: tuple[int, int, int] | None = None
    fallbacks: list[str] = field(default_factory=list)
    error: str | None = None

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "ok": self.ok,
            "scale": self.scale,
            "color": list(self.color) if self.color is not None else None,
            "fallbacks": list(self.fallbacks),
            "error": self.error,
        }


def translate_region(image: np.ndarray, region: JobRegion, glyphs: GlyphSource,
                     style: RenderStyle) -> tuple[np.ndarray, FittedText, list[str]]:
    h, w = image.shape[:2]
    out = inpaint(image, region.mask)
    inside = polygon_mask(region.quad, h, w)
    bg_mean = out[inside].reshape(-1, 3).mean(axis=0) if inside.any() else None
    fallbacks = []
    try:
        fitted = fit_text(region.tgt_text, region.quad, glyphs, style, bg_mean)
    except UnrenderableAtMinimumScale:
        if style.padding == 0:
            raise
        fitted = fit_text(region.tgt_text, region.quad, glyphs, RenderStyle(0.0, style.color), bg_mean)
        fallbacks.append("no_padding")
    if fitted.contrast_fallback:
        fallbacks.append("contrast_color")
    placed = _warp_into_frame(fitted.alpha, fitted.placement, h, w, region.quad)
    if placed is not None:
        alpha, origin = placed
        patch = np.empty(alpha.shape + (3,), dtype=np.uint8)
        patch[:] = fitted.color
        out = alpha_blend(out, patch, alpha, origin)
    return out, fitted, fallbacks


def translate_image(job: TranslationJob) -> tuple[np.ndarray, list[RegionOutcome]]:
    """Erase and re-render every region in order; later regions draw over earlier ones.

    A failing region is left as it was and its error is recorded; the
    remaining regions still run.
    """
    image = job.image.copy()
    report = []
    for i, region in enumerate(job.regions):
        try:
            image, fitted, fallbacks = translate_region(image, region, job.glyphs, job.style)
        except DataError as exc:
            report.append(RegionOutcome(i, False, error=f"{type(exc).__name__}: {exc}"))
            continue
        report.append(RegionOutcome(i, True, fitted.scale, fitted.color, fallbacks))
    return image, report


def build_job(image: np.ndarray, regions, tgt_lines, source: MaskSource | str = MaskSource.GROUND_TRUTH,
              *, masks=None, glyphs: GlyphSource = DEFAULT_FONT,
              style: RenderStyle = RenderStyle()) -> TranslationJob:
    """Acquire masks for known ``regions`` and pair them with target lines.

    Regions the mask source could not find keep an empty mask, so only
    their quad is repainted. Detected components outside every region are
    dropped since their text is unknown.
    """
    h, w = image.shape[:2]
    if len(tgt_lines) != len(regions):
        raise InvalidJob(f"{len(tgt_lines)} target lines for {len(regions)} regions")
    try:
        found = acquire_masks(image, source, regions, masks=masks, glyphs=glyphs)
    except NoRegionsFound:
        found = []
    by_hint = {a.hint_index: a.mask for a in found if a.hint_index is not None}
    job_regions = []
    for i, (r, tgt) in enumerate(zip(regions, tgt_lines)):
        mask = by_hint.get(i)
        if mask is None:
            mask = np.zeros((h, w), dtype=np.uint8)
        job_regions.append(JobRegion(np.asarray(r.quad, dtype=np.float64), mask, r.text, tgt))
    return TranslationJob(image, job_regions, glyphs, style)


def preserved_outside(before: np.ndarray, after: np.ndarray, job: TranslationJob) -> bool:
    """True when every pixel outside the job's touched set is bit-identical."""
    keep = ~job.touched()
    return bool(np.array_equal(before[keep], after[keep]))
