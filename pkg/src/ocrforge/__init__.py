"""Synthetic scene-text data with in-place translation and OCR scoring."""

__version__ = "0.1.0"
