"""Image file reading and byte-stable PNG writing."""
from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

PNG_COMPRESS_LEVEL = 1


def read_image(path) -> np.ndarray:
    """Read PNG (8-bit RGB/RGBA, alpha dropped), PPM P6 or any Pillow format as RGB uint8."""
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"), dtype=np.uint8).copy()


def read_mask(path) -> np.ndarray:
    """Read an 8-bit grayscale mask (255 = text)."""
    with Image.open(path) as im:
        if im.mode not in ("L", "1", "P"):
            im = im.convert("RGB").convert("L")
        return np.asarray(im.convert("L"), dtype=np.uint8).copy()


def write_png(path, array: np.ndarray) -> None:
    """Write with fixed encoder settings and no metadata chunks."""
    a = np.ascontiguousarray(array, dtype=np.uint8)
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(a).save(path, format="PNG", compress_level=PNG_COMPRESS_LEVEL, optimize=False)


def write_ppm(path, array: np.ndarray) -> None:
    a = np.ascontiguousarray(array, dtype=np.uint8)
    h, w = a.shape[:2]
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(a.tobytes())
