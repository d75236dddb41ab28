"""Glyph sources for text rasterization.

The built-in :class:`BitmapFont` is an embedded 8x16 monospace face covering
printable ASCII and Latin-1. Codepoints outside that set draw a hollow box so
that any script still flows through layout with correct metrics. Scaling is
integer nearest-neighbour only, which keeps renders bit-exact everywhere.
"""
from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple, Protocol

import numpy as np

from ._font8x16 import GLYPHS as _HEX


class Glyph(NamedTuple):
    bitmap: np.ndarray  # (height, width) uint8, 0 or 255
    advance: int
    ascent: int
    descent: int


class GlyphSource(Protocol):
    def glyph(self, codepoint: int, scale: int) -> Glyph: ...


def _decode(hex16: str) -> np.ndarray:
    rows = np.frombuffer(bytes.fromhex(hex16), dtype=np.uint8)
    bits = np.unpackbits(rows[:, None], axis=1)
    return (bits * 255).astype(np.uint8)


def _box() -> np.ndarray:
    b = np.zeros((16, 8), dtype=np.uint8)
    b[2:14, 1] = b[2:14, 6] = 255
    b[2, 1:7] = b[13, 1:7] = 255
    return b


class BitmapFont:
    CELL_W = 8
    CELL_H = 16
    ASCENT = 12
    DESCENT = 4

    def __init__(self):
        self._base = {cp: _decode(h) for cp, h in _HEX.items()}
        self._box = _box()
        self._blank = np.zeros((16, 8), dtype=np.uint8)

    def covers(self, codepoint: int) -> bool:
        return codepoint in self._base

    def _bitmap(self, codepoint: int) -> np.ndarray:
        if codepoint in self._base:
            return self._base[codepoint]
        if chr(codepoint).isspace():
            return self._blank
        return self._box

    def glyph(self, codepoint: int, scale: int) -> Glyph:
        return _scaled(self, codepoint, scale)

    def __hash__(self):
        return id(self)


@lru_cache(maxsize=8192)
def _scaled(font: BitmapFont, codepoint: int, scale: int) -> Glyph:
    if scale < 1:
        raise ValueError("glyph scale must be >= 1")
    bmp = font._bitmap(codepoint)
    if scale > 1:
        bmp = np.repeat(np.repeat(bmp, scale, axis=0), scale, axis=1)
    bmp.setflags(write=False)
    return Glyph(bmp, font.CELL_W * scale, font.ASCENT * scale, font.DESCENT * scale)


DEFAULT_FONT = BitmapFont()


def line_metrics(text: str, glyphs: GlyphSource, scale: int) -> tuple[int, int]:
    """Total advance and line height of ``text`` at ``scale``."""
    if isinstance(glyphs, BitmapFont):
        return len(text) * glyphs.CELL_W * scale, glyphs.CELL_H * scale
    advance = 0
    ascent = descent = 0
    for ch in text:
        g = glyphs.glyph(ord(ch), scale)
        advance += g.advance
        ascent = max(ascent, g.ascent)
        descent = max(descent, g.descent)
    if not text:
        g = glyphs.glyph(ord(" "), scale)
        ascent, descent = g.ascent, g.descent
    return advance, ascent + descent


def max_fitting_scale(text: str, width: float, height: float, glyphs: GlyphSource,
                      max_scale: int = 256) -> int:
    """Largest integer scale whose line fits ``width x height``; 0 if none."""
    best = 0
    for s in range(1, max_scale + 1):
        adv, lh = line_metrics(text, glyphs, s)
        if adv > width or lh > height:
            break
        best = s
    return best
