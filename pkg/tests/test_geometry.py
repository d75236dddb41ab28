import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ocrforge.errors import DegenerateQuad, PointAtInfinity
from ocrforge.geometry import (
    Homography,
    alpha_blend,
    apply_point,
    as_quad,
    compose,
    homography_from_quads,
    invert,
    polygon_mask,
    rect_quad,
    round_u8,
    warp_image,
)

UNIT = rect_quad(0, 0, 1, 1)


def lstsq_homography(src, dst):
    """Oracle: LAPACK solve of the same 8x8 system."""
    rows, rhs = [], []
    for (x, y), (u, v) in zip(src, dst):
        rows.append([x, y, 1, 0, 0, 0, -u * x, -u * y])
        rows.append([0, 0, 0, x, y, 1, -v * x, -v * y])
        rhs += [u, v]
    h = np.linalg.solve(np.array(rows), np.array(rhs))
    return np.append(h, 1).reshape(3, 3)


def random_quad(rng, scale=100.0):
    # convex quad by perturbing a rectangle
    x0, y0 = rng.uniform(0, scale, 2)
    w, h = rng.uniform(10, scale, 2)
    base = rect_quad(x0, y0, x0 + w, y0 + h)
    return base + rng.uniform(-0.2, 0.2, (4, 2)) * np.array([w, h])


class TestHomographyFromQuads:
    def test_identity(self):
        h = homography_from_quads(UNIT, UNIT)
        np.testing.assert_allclose(h.m, np.eye(3), atol=1e-12)

    def test_translation(self):
        h = homography_from_quads(UNIT, UNIT + [5, 3])
        np.testing.assert_allclose(h.flat, [1, 0, 5, 0, 1, 3, 0, 0, 1], atol=1e-12)

    def test_anisotropic_scale(self):
        dst = [(0, 0), (2, 0), (2, 1), (0, 1)]
        h = homography_from_quads(UNIT, dst)
        np.testing.assert_allclose(h.m, lstsq_homography(UNIT, dst), atol=1e-12)
        np.testing.assert_allclose(h.m, np.diag([2.0, 1.0, 1.0]), atol=1e-12)

    def test_collinear_corners_rejected(self):
        with pytest.raises(DegenerateQuad):
            homography_from_quads(UNIT, [(0, 0), (1, 0), (2, 0), (3, 0)])

    def test_self_intersecting_rejected(self):
        with pytest.raises(DegenerateQuad):
            as_quad([(0, 0), (1, 1), (1, 0), (0, 1)])

    def test_quad_transport_1000_pairs(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            a, b = random_quad(rng), random_quad(rng)
            h = homography_from_quads(a, b)
            np.testing.assert_allclose(h.apply_points(a), b, atol=1e-9, rtol=0)
            np.testing.assert_allclose(h.m, lstsq_homography(a, b), rtol=1e-7, atol=1e-9)


class TestApplyPoint:
    def test_identity(self):
        assert apply_point(Homography.identity(), (3.5, 7)) == (3.5, 7)

    def test_rotation_90(self):
        h = Homography(np.array([0, -1, 0, 1, 0, 0, 0, 0, 1], dtype=float))
        assert apply_point(h, (1, 0)) == pytest.approx((0, 1))

    def test_translation(self):
        assert apply_point(Homography.translation(5, 3), (1, 1)) == (6, 4)

    def test_point_at_infinity(self):
        h = Homography(np.array([[1, 0, 0], [0, 1, 0], [1, 0, 1]], dtype=float))
        with pytest.raises(PointAtInfinity):
            apply_point(h, (-1, 0))


class TestCompose:
    def test_identity_left(self):
        h = Homography(np.array([[1.2, 0.1, 3], [0.2, 0.9, -1], [0.001, 0.002, 1]]))
        assert compose(Homography.identity(), h).allclose(h, 1e-15)

    def test_translations(self):
        t = compose(Homography.translation(1, 0), Homography.translation(0, 1))
        np.testing.assert_array_equal(t.m, Homography.translation(1, 1).m)

    def test_inverse_round_trip(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            m = np.eye(3) + rng.uniform(-0.3, 0.3, (3, 3)) * [[1, 1, 10], [1, 1, 10], [0.001, 0.001, 0]]
            if abs(np.linalg.det(m)) < 1e-6:
                continue
            h = Homography(m)
            r = compose(h, invert(h))
            np.testing.assert_allclose(r.m, np.eye(3), atol=1e-9, rtol=0)

    def test_application_order(self):
        a = Homography.rotation(30, 5, 5)
        b = Homography(np.array([[1, 0.1, 2], [0, 1.1, 1], [0.001, 0, 1]]))
        p = (3.0, 4.0)
        np.testing.assert_allclose(apply_point(compose(a, b), p), apply_point(a, apply_point(b, p)), atol=1e-9)


def brute_force_warp(img, h, out_w, out_h, fill):
    """Per-pixel loop oracle for warp_image."""
    hinv = np.linalg.inv(h.m)
    H, W = img.shape[:2]
    out = np.zeros((out_h, out_w, 3), dtype=np.uint8)
    for j in range(out_h):
        for i in range(out_w):
            x, y = i + 0.5, j + 0.5
            w = hinv[2, 0] * x + hinv[2, 1] * y + hinv[2, 2]
            if w <= 1e-12:
                out[j, i] = fill
                continue
            u = (hinv[0, 0] * x + hinv[0, 1] * y + hinv[0, 2]) / w
            v = (hinv[1, 0] * x + hinv[1, 1] * y + hinv[1, 2]) / w
            if not (0 <= u < W and 0 <= v < H):
                out[j, i] = fill
                continue
            fx, fy = u - 0.5, v - 0.5
            x0, y0 = math.floor(fx), math.floor(fy)
            ax, ay = fx - x0, fy - y0

            def px(c, r):
                return img[min(max(r, 0), H - 1), min(max(c, 0), W - 1)].astype(float)

            val = (px(x0, y0) * (1 - ax) + px(x0 + 1, y0) * ax) * (1 - ay) + (
                px(x0, y0 + 1) * (1 - ax) + px(x0 + 1, y0 + 1) * ax
            ) * ay
            out[j, i] = [min(255, math.floor(c + 0.5)) for c in val]
    return out


class TestWarp:
    def test_identity_bit_exact(self):
        img = np.random.default_rng(2).integers(0, 256, (13, 17, 3), dtype=np.uint8)
        np.testing.assert_array_equal(warp_image(img, Homography.identity(), 17, 13), img)

    def test_integer_translation_checkerboard(self):
        img = np.zeros((2, 2, 3), dtype=np.uint8)
        img[0, 0] = img[1, 1] = 255
        out = warp_image(img, Homography.translation(1, 0), 2, 2, fill=(0, 0, 0))
        np.testing.assert_array_equal(out[:, 0], 0)
        np.testing.assert_array_equal(out[:, 1], img[:, 0])

    def test_constant_image(self):
        img = np.full((8, 8, 3), 77, dtype=np.uint8)
        h = Homography(np.array([[0.9, 0.2, 1.3], [-0.1, 1.1, 0.4], [0.01, 0.005, 1]]))
        out = warp_image(img, h, 8, 8, fill=(1, 2, 3))
        oracle = brute_force_warp(img, h, 8, 8, (1, 2, 3))
        np.testing.assert_array_equal(out, oracle)
        filled = np.all(out == [1, 2, 3], axis=2)
        assert np.all(out[~filled] == 77)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(3)
        img = rng.integers(0, 256, (9, 11, 3), dtype=np.uint8)
        h = compose(Homography.rotation(17, 5, 4), Homography.scaling(1.1, 0.9))
        out = warp_image(img, h, 12, 10, fill=(128, 128, 128))
        np.testing.assert_array_equal(out, brute_force_warp(img, h, 12, 10, (128, 128, 128)))

    def test_mask_warp(self):
        m = np.zeros((5, 5), dtype=np.uint8)
        m[2, 2] = 255
        out = warp_image(m, Homography.translation(1, 1), 5, 5, fill=0)
        assert out[3, 3] == 255 and out.sum() == 255


class TestAlphaBlend:
    def setup_method(self):
        rng = np.random.default_rng(4)
        self.dst = rng.integers(0, 256, (6, 7, 3), dtype=np.uint8)
        self.src = rng.integers(0, 256, (3, 4, 3), dtype=np.uint8)

    def test_zero_alpha(self):
        out = alpha_blend(self.dst, self.src, np.zeros((3, 4), np.uint8), (2, 1))
        np.testing.assert_array_equal(out, self.dst)

    def test_full_alpha(self):
        out = alpha_blend(self.dst, self.src, np.full((3, 4), 255, np.uint8), (2, 1))
        np.testing.assert_array_equal(out[1:4, 2:6], self.src)
        untouched = np.ones((6, 7), bool)
        untouched[1:4, 2:6] = False
        np.testing.assert_array_equal(out[untouched], self.dst[untouched])

    def test_half_alpha_arithmetic(self):
        out = alpha_blend(np.zeros((1, 1, 3), np.uint8), np.full((1, 1, 3), 255, np.uint8),
                          np.full((1, 1), 128, np.uint8))
        assert out[0, 0, 0] == 128

    def test_partial_overlap_clips(self):
        out = alpha_blend(self.dst, self.src, np.full((3, 4), 255, np.uint8), (5, -1))
        np.testing.assert_array_equal(out[0:2, 5:7], self.src[1:3, 0:2])

    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, 255), st.integers(0, 255), st.integers(0, 255))
    def test_blend_partition(self, a, s, d):
        out = alpha_blend(np.full((1, 1, 3), d, np.uint8), np.full((1, 1, 3), s, np.uint8),
                          np.full((1, 1), a, np.uint8))
        assert min(s, d) <= out[0, 0, 0] <= max(s, d)
        assert out[0, 0, 0] == math.floor((a * s + (255 - a) * d) / 255 + 0.5)


def test_round_half_away():
    np.testing.assert_array_equal(round_u8([0.5, 1.5, 2.49, 254.5, 300, -3]), [1, 2, 2, 255, 255, 0])


def test_polygon_mask_rect():
    m = polygon_mask(rect_quad(2, 1, 5, 3), 6, 8)
    expect = np.zeros((6, 8), bool)
    expect[1:3, 2:5] = True
    np.testing.assert_array_equal(m, expect)
    d = polygon_mask(rect_quad(2, 1, 5, 3), 6, 8, dilate=1.0)
    assert d[0, 2] and d[3, 4] and not d[0, 0]
