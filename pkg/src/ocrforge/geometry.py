"""Planar projective geometry and the raster operations built on it.

Conventions
-----------
* Images are ``uint8`` arrays shaped ``(H, W, 3)``; masks are ``(H, W)``.
* Pixel ``(i, j)`` (column, row) has its center at ``(i + 0.5, j + 0.5)``.
* A quad is a ``(4, 2)`` float64 array ordered TL, TR, BR, BL.
* Every float to uint8 conversion rounds half away from zero, then clamps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateQuad, PointAtInfinity

_EPS_W = 1e-12


def round_u8(values) -> np.ndarray:
    """Round half away from zero and clamp to [0, 255]."""
    # negatives clamp to 0 either way, so floor(v + 0.5) is equivalent here
    r = np.add(values, 0.5, dtype=np.float64)
    np.floor(r, out=r)
    np.clip(r, 0, 255, out=r)
    return r.astype(np.uint8)


def luminance(rgb) -> np.ndarray | float:
    """Rec. 601 luma of RGB values (last axis)."""
    a = np.asarray(rgb, dtype=np.float64)
    return a[..., 0] * 0.299 + a[..., 1] * 0.587 + a[..., 2] * 0.114


# ---------------------------------------------------------------- quads


def signed_area(poly) -> float:
    """Shoelace area; positive for TL, TR, BR, BL order in y-down coordinates."""
    p = np.asarray(poly, dtype=np.float64)
    x, y = p[:, 0], p[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _segments_cross(p1, p2, p3, p4) -> bool:
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1, d2 = orient(p3, p4, p1), orient(p3, p4, p2)
    d3, d4 = orient(p1, p2, p3), orient(p1, p2, p4)
    return d1 * d2 < 0 and d3 * d4 < 0


def as_quad(corners) -> np.ndarray:
    """Validate and return ``corners`` as a ``(4, 2)`` float64 quad.

    Raises DegenerateQuad for non-finite, self-intersecting or
    non-positively oriented input.
    """
    q = np.array(corners, dtype=np.float64).reshape(4, 2)
    if not np.all(np.isfinite(q)):
        raise DegenerateQuad("quad has non-finite corners")
    if _segments_cross(q[0], q[1], q[2], q[3]) or _segments_cross(q[1], q[2], q[3], q[0]):
        raise DegenerateQuad("quad is self-intersecting")
    if not signed_area(q) > 0:
        raise DegenerateQuad(f"quad has non-positive signed area {signed_area(q)}")
    return q


def rect_quad(x0: float, y0: float, x1: float, y1: float) -> np.ndarray:
    """Axis-aligned quad spanning ``[x0, x1] x [y0, y1]``."""
    return np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]], dtype=np.float64)


def quad_bbox(quad) -> tuple[int, int, int, int]:
    """Integer pixel bounds ``(x0, y0, x1, y1)`` (exclusive end) enclosing the quad."""
    q = np.asarray(quad, dtype=np.float64)
    return (
        int(math.floor(q[:, 0].min())),
        int(math.floor(q[:, 1].min())),
        int(math.ceil(q[:, 0].max())),
        int(math.ceil(q[:, 1].max())),
    )


def is_axis_aligned_int(quad) -> bool:
    q = np.asarray(quad)
    return (
        bool(np.all(q == np.round(q)))
        and q[0, 1] == q[1, 1]
        and q[2, 1] == q[3, 1]
        and q[0, 0] == q[3, 0]
        and q[1, 0] == q[2, 0]
    )


def clip_polygon_to_rect(poly, x0, y0, x1, y1) -> np.ndarray:
    """Sutherland-Hodgman clip of a polygon against an axis-aligned rectangle."""
    pts = [tuple(p) for p in np.asarray(poly, dtype=np.float64)]
    # (axis, bound, keep_greater)
    for axis, bound, keep_ge in ((0, x0, True), (0, x1, False), (1, y0, True), (1, y1, False)):
        if not pts:
            break
        out = []
        n = len(pts)
        for k in range(n):
            cur, prev = pts[k], pts[k - 1]
            cur_in = cur[axis] >= bound if keep_ge else cur[axis] <= bound
            prev_in = prev[axis] >= bound if keep_ge else prev[axis] <= bound
            if cur_in != prev_in:
                t = (bound - prev[axis]) / (cur[axis] - prev[axis])
                cross = (prev[0] + t * (cur[0] - prev[0]), prev[1] + t * (cur[1] - prev[1]))
                cross = (bound, cross[1]) if axis == 0 else (cross[0], bound)
                out.append(cross)
            if cur_in:
                out.append(cur)
        pts = out
    return np.array(pts, dtype=np.float64).reshape(-1, 2)


def polygon_mask(poly, height: int, width: int, dilate: float = 0.0) -> np.ndarray:
    """Boolean ``(H, W)`` mask of pixels whose center lies within ``dilate`` px of the polygon."""
    p = np.asarray(poly, dtype=np.float64)
    out = np.zeros((height, width), dtype=bool)
    x0 = max(int(math.floor(p[:, 0].min() - dilate - 1)), 0)
    y0 = max(int(math.floor(p[:, 1].min() - dilate - 1)), 0)
    x1 = min(int(math.ceil(p[:, 0].max() + dilate + 1)), width)
    y1 = min(int(math.ceil(p[:, 1].max() + dilate + 1)), height)
    if x0 >= x1 or y0 >= y1:
        return out
    ys, xs = np.mgrid[y0:y1, x0:x1]
    px = xs + 0.5
    py = ys + 0.5
    # even-odd point in polygon
    inside = np.zeros(px.shape, dtype=bool)
    n = len(p)
    for k in range(n):
        ax, ay = p[k - 1]
        bx, by = p[k]
        if ay == by:
            continue
        cond = (ay > py) != (by > py)
        xint = ax + (py - ay) * (bx - ax) / (by - ay)
        inside ^= cond & (px < xint)
    if dilate > 0:
        d2 = np.full(px.shape, np.inf)
        for k in range(n):
            ax, ay = p[k - 1]
            bx, by = p[k]
            ex, ey = bx - ax, by - ay
            ll = ex * ex + ey * ey
            t = np.clip(((px - ax) * ex + (py - ay) * ey) / ll, 0.0, 1.0) if ll > 0 else 0.0
            dx = px - (ax + t * ex)
            dy = py - (ay + t * ey)
            d2 = np.minimum(d2, dx * dx + dy * dy)
        inside |= d2 <= dilate * dilate
    out[y0:y1, x0:x1] = inside
    return out


def dilate_mask(mask: np.ndarray, radius: int) -> np.ndarray:
    """Binary dilation with a square (Chebyshev) structuring element."""
    m = np.asarray(mask, dtype=bool)
    if radius <= 0:
        return m.copy()
    h, w = m.shape
    pad = np.pad(m, radius)
    out = np.zeros_like(m)
    for dy in range(2 * radius + 1):
        for dx in range(2 * radius + 1):
            out |= pad[dy:dy + h, dx:dx + w]
    return out


# ---------------------------------------------------------------- homography


def _solve_linear(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Gaussian elimination with partial pivoting; raises on a singular system."""
    a = np.array(a, dtype=np.float64)
    b = np.array(b, dtype=np.float64)
    n = len(b)
    scale = max(float(np.abs(a).max()), 1.0)
    for col in range(n):
        piv = col + int(np.argmax(np.abs(a[col:, col])))
        if abs(a[piv, col]) < 1e-12 * scale:
            raise DegenerateQuad("singular homography system (collinear corners)")
        if piv != col:
            a[[col, piv]] = a[[piv, col]]
            b[[col, piv]] = b[[piv, col]]
        f = a[col + 1:, col] / a[col, col]
        a[col + 1:, col:] -= f[:, None] * a[col, col:]
        b[col + 1:] -= f * b[col]
    x = np.zeros(n)
    for row in range(n - 1, -1, -1):
        x[row] = (b[row] - a[row, row + 1:] @ x[row + 1:]) / a[row, row]
    return x


@dataclass(frozen=True, eq=False)
class Homography:
    """Invertible 3x3 projective map, normalized so ``m[2, 2] == 1`` when nonzero."""

    m: np.ndarray

    def __post_init__(self):
        m = np.array(self.m, dtype=np.float64).reshape(3, 3)
        if m[2, 2] != 0:
            m = m / m[2, 2]
        if not np.all(np.isfinite(m)) or abs(np.linalg.det(m)) == 0:
            raise DegenerateQuad("homography is not invertible")
        m.setflags(write=False)
        object.__setattr__(self, "m", m)

    @classmethod
    def identity(cls) -> "Homography":
        return cls(np.eye(3))

    @classmethod
    def translation(cls, tx: float, ty: float) -> "Homography":
        return cls(np.array([[1, 0, tx], [0, 1, ty], [0, 0, 1]], dtype=np.float64))

    @classmethod
    def scaling(cls, sx: float, sy: float) -> "Homography":
        return cls(np.diag([sx, sy, 1.0]))

    @classmethod
    def rotation(cls, degrees: float, cx: float = 0.0, cy: float = 0.0) -> "Homography":
        """Rotation by ``degrees`` about ``(cx, cy)``; positive turns +x toward +y."""
        t = math.radians(degrees)
        c, s = math.cos(t), math.sin(t)
        if degrees == 0:
            c, s = 1.0, 0.0
        m = np.array(
            [[c, -s, cx - c * cx + s * cy], [s, c, cy - s * cx - c * cy], [0, 0, 1]],
            dtype=np.float64,
        )
        return cls(m)

    @property
    def flat(self) -> list[float]:
        return [float(v) for v in self.m.ravel()]

    def __matmul__(self, other: "Homography") -> "Homography":
        return compose(self, other)

    def __repr__(self):
        return f"Homography({self.flat})"

    def inverse(self) -> "Homography":
        return invert(self)

    def apply(self, x: float, y: float) -> tuple[float, float]:
        return apply_point(self, (x, y))

    def apply_points(self, pts) -> np.ndarray:
        return apply_points(self, pts)

    def allclose(self, other: "Homography", atol: float = 1e-9) -> bool:
        return bool(np.allclose(self.m, other.m, rtol=0, atol=atol))


def homography_from_quads(src, dst) -> Homography:
    """Exact 4-point DLT: the homography mapping each ``src`` corner onto ``dst``."""
    s = as_quad(src)
    d = as_quad(dst)
    a = np.zeros((8, 8))
    b = np.zeros(8)
    for k in range(4):
        x, y = s[k]
        u, v = d[k]
        a[2 * k] = [x, y, 1, 0, 0, 0, -u * x, -u * y]
        a[2 * k + 1] = [0, 0, 0, x, y, 1, -v * x, -v * y]
        b[2 * k] = u
        b[2 * k + 1] = v
    h = _solve_linear(a, b)
    return Homography(np.append(h, 1.0))


def apply_point(h: Homography, p) -> tuple[float, float]:
    m = h.m
    x, y = float(p[0]), float(p[1])
    w = m[2, 0] * x + m[2, 1] * y + m[2, 2]
    if abs(w) < _EPS_W:
        raise PointAtInfinity(f"point ({x}, {y}) maps to infinity")
    return ((m[0, 0] * x + m[0, 1] * y + m[0, 2]) / w, (m[1, 0] * x + m[1, 1] * y + m[1, 2]) / w)


def apply_points(h: Homography, pts) -> np.ndarray:
    p = np.asarray(pts, dtype=np.float64).reshape(-1, 2)
    m = h.m
    w = m[2, 0] * p[:, 0] + m[2, 1] * p[:, 1] + m[2, 2]
    if np.any(np.abs(w) < _EPS_W):
        raise PointAtInfinity("a point maps to infinity")
    x = (m[0, 0] * p[:, 0] + m[0, 1] * p[:, 1] + m[0, 2]) / w
    y = (m[1, 0] * p[:, 0] + m[1, 1] * p[:, 1] + m[1, 2]) / w
    return np.stack([x, y], axis=1)


def compose(a: Homography, b: Homography) -> Homography:
    """``compose(a, b)`` applies ``b`` first, then ``a``."""
    return Homography(a.m @ b.m)


def invert(h: Homography) -> Homography:
    return Homography(np.linalg.inv(h.m))


# ---------------------------------------------------------------- raster ops


def _bilinear_gather(img: np.ndarray, sx: np.ndarray, sy: np.ndarray) -> np.ndarray:
    """Bilinear samples at continuous coordinates (pixel centers at +0.5), clamp-to-edge."""
    h, w = img.shape[:2]
    fx = sx - 0.5
    fy = sy - 0.5
    x0 = np.floor(fx)
    y0 = np.floor(fy)
    ax = fx - x0
    ay = fy - y0
    x0 = x0.astype(np.intp)
    y0 = y0.astype(np.intp)
    x1 = np.clip(x0 + 1, 0, w - 1)
    y1 = np.clip(y0 + 1, 0, h - 1)
    x0 = np.clip(x0, 0, w - 1)
    y0 = np.clip(y0, 0, h - 1)
    # gather through flat row indices; much faster than 2-D fancy indexing
    c = img.shape[2] if img.ndim == 3 else 1
    flat = np.ascontiguousarray(img).reshape(h * w, c)
    r0 = y0 * w
    r1 = y1 * w
    if img.ndim == 3:
        ax = ax[..., None]
        ay = ay[..., None]

    def at(idx):
        v = flat.take(idx.ravel(), axis=0).reshape(idx.shape + (c,))
        return v if img.ndim == 3 else v[..., 0]

    # top = a*(1-ax) + b*ax etc., with uint8 operands promoted exactly inside the ufuncs
    omx = 1 - ax
    top = np.multiply(at(r0 + x0), omx)
    top += np.multiply(at(r0 + x1), ax)
    bot = np.multiply(at(r1 + x0), omx)
    bot += np.multiply(at(r1 + x1), ax)
    top *= 1 - ay
    bot *= ay
    top += bot
    return top


def warp_image(img: np.ndarray, h: Homography, out_w: int, out_h: int, fill=(0, 0, 0)) -> np.ndarray:
    """Inverse-map each output pixel center through ``h^-1`` and sample bilinearly.

    Works on ``(H, W, C)`` images and ``(H, W)`` masks; samples whose source
    position falls outside ``[0, W) x [0, H)`` take ``fill``.
    """
    src_h, src_w = img.shape[:2]
    hinv = invert(h).m
    xs = np.arange(out_w, dtype=np.float64)[None, :] + 0.5
    ys = np.arange(out_h, dtype=np.float64)[:, None] + 0.5
    w = hinv[2, 0] * xs + hinv[2, 1] * ys + hinv[2, 2]
    valid = w > _EPS_W
    w = np.where(valid, w, 1.0)
    sx = (hinv[0, 0] * xs + hinv[0, 1] * ys + hinv[0, 2]) / w
    sy = (hinv[1, 0] * xs + hinv[1, 1] * ys + hinv[1, 2]) / w
    valid &= (sx >= 0) & (sx < src_w) & (sy >= 0) & (sy < src_h)
    sx = np.where(valid, sx, 0.5)
    sy = np.where(valid, sy, 0.5)
    out = round_u8(_bilinear_gather(img, sx, sy))
    fill_arr = np.asarray(fill, dtype=np.uint8)
    if img.ndim == 2:
        fill_arr = fill_arr.reshape(-1)[0]
    out[~valid] = fill_arr
    return out


def alpha_blend(dst: np.ndarray, src: np.ndarray, mask: np.ndarray, origin=(0, 0)) -> np.ndarray:
    """Composite ``src`` over ``dst`` at integer ``origin`` weighted by ``mask`` (0..255)."""
    ox, oy = int(origin[0]), int(origin[1])
    if ox != origin[0] or oy != origin[1]:
        raise ValueError("alpha_blend origin must be integral")
    if src.shape[:2] != mask.shape:
        raise ValueError("src and mask dimensions differ")
    out = dst.copy()
    dh, dw = dst.shape[:2]
    sh, sw = src.shape[:2]
    x0, y0 = max(ox, 0), max(oy, 0)
    x1, y1 = min(ox + sw, dw), min(oy + sh, dh)
    if x0 >= x1 or y0 >= y1:
        return out
    a = mask[y0 - oy:y1 - oy, x0 - ox:x1 - ox].astype(np.int64)[..., None]
    s = src[y0 - oy:y1 - oy, x0 - ox:x1 - ox].astype(np.int64)
    d = dst[y0:y1, x0:x1].astype(np.int64)
    num = a * s + (255 - a) * d
    # exact integer round-half-up of num / 255 (num >= 0)
    out[y0:y1, x0:x1] = ((2 * num + 255) // 510).astype(np.uint8)
    return out


def resize_bilinear(img: np.ndarray, out_w: int, out_h: int) -> np.ndarray:
    """Bilinear resize under the pixel-center convention (no antialiasing)."""
    h, w = img.shape[:2]
    if (w, h) == (out_w, out_h):
        return img.copy()
    xs = (np.arange(out_w, dtype=np.float64) + 0.5) * (w / out_w)
    ys = (np.arange(out_h, dtype=np.float64) + 0.5) * (h / out_h)
    sx, sy = np.meshgrid(xs, ys)
    return round_u8(_bilinear_gather(img, sx, sy))
