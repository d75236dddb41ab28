"""End-to-end dataset generation and batch translation.

Sample ``i`` of a run with master seed ``m`` depends only on
``derive_seed(m, i)`` and the configuration, so output is identical for any
worker count and any completion order.
"""

from __future__ import annotations

import logging
import multiprocessing as mp
import os
import shutil
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import (
    ParallelTextPair,
    TextSample,
    check_lang,
    default_lexicon,
    default_templates,
    load_lexicon,
    load_templates,
    pair_translation,
    sample_source_text,
)
from .degrade import apply_chain, parse_chain, resolve_chain
from .errors import MissingTargetText, OcrForgeError, UnsupportedKind, UsageError
from .glyphs import DEFAULT_FONT
from .imageio import read_image, write_png
from .manifest import RegionRecord, SampleRecord, format_id, read_manifest, resolve_image, write_manifest
from .render import BACKGROUND_KINDS, LAYOUT_KINDS, LayoutStyle, compose_scene
from .rng import Rng, derive_seed

log = logging.getLogger(__name__)

RANDOM_BG = ("solid", "gradient", "noise_texture")
IMAGE_DIR = "images"


def default_workers() -> int:
    env = os.environ.get("OCRFORGE_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise UsageError(f"OCRFORGE_THREADS must be an integer, got {env!r}") from None
        if n < 1:
            raise UsageError("OCRFORGE_THREADS must be >= 1")
        return n
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)


@dataclass
class GenerateConfig:
    count: int
    seed: int = 0
    langs: list[str] = field(default_factory=lambda: ["en"])
    tgt_lang: str | None = None
    templates: str | None = None
    lexicon: str | None = None
    style: str = "document"
    bg: str = "random"
    bg_image: str | None = None
    chain: str = ""
    width: int = 512
    height: int = 320

    def validate(self) -> None:
        """Check every parameter before any sample is drawn."""
        if self.count < 0:
            raise UsageError("--count must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise UsageError("--seed must be a uint64")
        if not self.langs:
            raise UsageError("--langs is empty")
        for lang in self.langs + ([self.tgt_lang] if self.tgt_lang else []):
            check_lang(lang)
        if self.style not in LAYOUT_KINDS:
            raise UnsupportedKind(f"--style must be one of {LAYOUT_KINDS}")
        if self.bg != "random" and self.bg not in BACKGROUND_KINDS:
            raise UnsupportedKind(f"--bg must be 'random' or one of {BACKGROUND_KINDS}")
        if self.bg == "imported" and not self.bg_image:
            raise UsageError("--bg imported needs --bg-image")
        if not (16 <= self.width <= 8192 and 16 <= self.height <= 8192):
            raise UsageError("--width/--height must lie in [16, 8192]")
        parse_chain(self.chain)


class _Generator:
    """Per-process state: parsed resources shared by every sample."""

    def __init__(self, cfg: GenerateConfig, out_dir: Path):
        self.cfg = cfg
        self.out_dir = out_dir
        self.templates = load_templates(cfg.templates) if cfg.templates else default_templates()
        self.lexicon = load_lexicon(cfg.lexicon) if cfg.lexicon else default_lexicon()
        self.style = LayoutStyle(kind=cfg.style)
        self.chain = parse_chain(cfg.chain)
        self.imported = read_image(cfg.bg_image) if cfg.bg_image else None

    def make(self, index: int) -> tuple[SampleRecord, np.ndarray]:
        cfg = self.cfg
        seed = derive_seed(cfg.seed, index)
        rng = Rng(seed)
        text_rng, scene_rng = rng.spawn(), rng.spawn()
        lang = cfg.langs[rng.below(len(cfg.langs))]
        bg = RANDOM_BG[rng.below(len(RANDOM_BG))] if cfg.bg == "random" else cfg.bg
        src = sample_source_text(self.templates, lang, text_rng)
        if cfg.tgt_lang:
            pair = pair_translation(src, self.lexicon, cfg.tgt_lang)
        else:
            pair = ParallelTextPair(src, src, 0.0, [False] * len(src.lines))
        rendered = compose_scene(pair, cfg.width, cfg.height, self.style, bg, DEFAULT_FONT, scene_rng,
                                 family=self.templates.family_of(src.template_id), imported=self.imported)
        degraded = apply_chain(rendered, resolve_chain(self.chain, seed))
        rid = format_id(index)
        regions = [RegionRecord(r.quad, r.text, r.line_index, r.occluded_fraction, r.clipped)
                   for r in degraded.regions]
        rec = SampleRecord(
            id=rid,
            image_path=f"{IMAGE_DIR}/{rid}.png",
            width=cfg.width,
            height=cfg.height,
            language_src=lang,
            language_tgt=cfg.tgt_lang,
            regions=regions,
            full_text_src="\n".join(src.lines),
            full_text_tgt="\n".join(pair.tgt.lines) if cfg.tgt_lang else None,
            degradations=list(degraded.applied),
            condition_tags=list(degraded.condition_tags),
            master_seed=cfg.seed,
            sample_index=index,
        )
        return rec, degraded.image

    def write(self, index: int) -> SampleRecord:
        rec, image = self.make(index)
        write_png(self.out_dir / rec.image_path, image)
        return rec


_worker: _Generator | None = None


def _init_worker(cfg, out_dir):
    global _worker
    _worker = _Generator(cfg, out_dir)


def _work(index):
    return _worker.write(index)


def generate_sample(cfg: GenerateConfig, index: int) -> tuple[SampleRecord, np.ndarray]:
    """Build one sample in memory without touching the filesystem."""
    return _Generator(cfg, Path(".")).make(index)


@dataclass
class GenerateSummary:
    count: int
    languages: Counter
    tags: Counter

    def format(self) -> str:
        langs = ", ".join(f"{k}={v}" for k, v in sorted(self.languages.items()))
        tags = ", ".join(f"{k}={v}" for k, v in sorted(self.tags.items()))
        return f"{self.count} samples\nlanguages: {langs or '-'}\ncondition tags: {tags or '-'}\n"


def run_generate(cfg: GenerateConfig, out_dir, workers: int = 1, progress=None) -> GenerateSummary:
    """Generate ``cfg.count`` samples into ``out_dir`` with a single ordered manifest writer.

    On failure every image written by this run is removed and no manifest
    is left behind.
    """
    cfg.validate()
    out_dir = Path(out_dir)
    created_out = not out_dir.exists()
    out_dir.mkdir(parents=True, exist_ok=True)
    img_dir = out_dir / IMAGE_DIR
    created_img = not img_dir.exists()
    img_dir.mkdir(exist_ok=True)
    written: list[Path] = []
    langs, tags = Counter(), Counter()

    def records():
        if workers <= 1 or cfg.count <= 1:
            gen = _Generator(cfg, out_dir)
            results = (gen.write(i) for i in range(cfg.count))
            pool = None
        else:
            ctx = mp.get_context("fork") if "fork" in mp.get_all_start_methods() else mp.get_context()
            pool = ctx.Pool(workers, initializer=_init_worker, initargs=(cfg, out_dir))
            chunk = max(1, min(16, cfg.count // (workers * 4)))
            results = pool.imap(_work, range(cfg.count), chunksize=chunk)
        try:
            for k, rec in enumerate(results, start=1):
                written.append(out_dir / rec.image_path)
                langs[rec.language_src] += 1
                tags.update(rec.condition_tags)
                if progress:
                    progress(k, cfg.count)
                yield rec
        finally:
            if pool is not None:
                pool.terminate()
                pool.join()

    try:
        write_manifest(records(), out_dir / "manifest.jsonl")
    except BaseException:
        # images from other workers may exist beyond those already yielded
        for i in range(cfg.count):
            p = img_dir / f"{format_id(i)}.png"
            if p.exists():
                p.unlink()
        if created_img:
            shutil.rmtree(img_dir, ignore_errors=True)
        if created_out:
            shutil.rmtree(out_dir, ignore_errors=True)
        raise
    return GenerateSummary(cfg.count, langs, tags)


# ---------------------------------------------------------------- translation


@dataclass
class TranslateConfig:
    manifest: str
    mask_source: str = "ground_truth"
    lexicon: str | None = None
    tgt_lang: str | None = None
    out: str | None = None
    mask_dir: str | None = None


def target_lines(rec: SampleRecord, tgt_lang: str | None, lexicon) -> tuple[str, list[str]]:
    """Target language and lines for a record, from the manifest or the lexicon."""
    if rec.full_text_tgt is not None and (tgt_lang is None or tgt_lang == rec.language_tgt):
        return rec.language_tgt, rec.full_text_tgt.split("\n")
    if lexicon is None or tgt_lang is None:
        raise MissingTargetText(f"record {rec.id} has no target text and no lexicon/target language was given")
    lines = [r.text for r in sorted(rec.regions, key=lambda r: r.line_index)]
    pair = pair_translation(TextSample(lines, rec.language_src, "manifest"), lexicon, tgt_lang)
    return tgt_lang, pair.tgt.lines


def translate_record(manifest_path: Path, rec: SampleRecord, lang: str, lines: list[str], source: str,
                     mask_dir: Path | None = None) -> dict:
    """Translate one record's image and write it beside the original; returns a result row."""
    from .viztrans import build_job, preserved_outside, translate_image

    src_path = resolve_image(manifest_path, rec)
    image = read_image(src_path)
    regions = sorted(rec.regions, key=lambda r: r.line_index)
    masks = None
    if source == "imported":
        mdir = mask_dir or src_path.parent
        masks = mdir / f"{Path(rec.image_path).stem}.mask.png"
    job = build_job(image, regions, lines, source, masks=masks)
    out, report = translate_image(job)
    out_rel = str(Path(rec.image_path).with_suffix(f".{lang}.png"))
    write_png(manifest_path.parent / out_rel, out)
    return {
        "id": rec.id,
        "image_path": out_rel,
        "language_tgt": lang,
        "ok": all(o.ok for o in report),
        "preserved": preserved_outside(image, out, job),
        "regions": [o.to_json() for o in report],
    }


def run_translate(cfg: TranslateConfig, progress=None) -> list[dict]:
    manifest_path = Path(cfg.manifest)
    records = read_manifest(manifest_path)
    lexicon = load_lexicon(cfg.lexicon) if cfg.lexicon else (default_lexicon() if cfg.tgt_lang else None)
    if cfg.tgt_lang:
        check_lang(cfg.tgt_lang)
    # resolve every target before touching any image
    targets = [target_lines(rec, cfg.tgt_lang, lexicon) for rec in records]
    rows = []
    mask_dir = Path(cfg.mask_dir) if cfg.mask_dir else None
    for k, (rec, (lang, lines)) in enumerate(zip(records, targets), start=1):
        try:
            row = translate_record(manifest_path, rec, lang, lines, cfg.mask_source, mask_dir)
        except (OcrForgeError, OSError) as exc:  # per-record failure model: log and continue
            log.error("record %s failed: %s", rec.id, exc)
            row = {"id": rec.id, "image_path": None, "language_tgt": lang, "ok": False, "preserved": None,
                   "regions": [], "error": f"{type(exc).__name__}: {exc}"}
        rows.append(row)
        if progress:
            progress(k, len(records))
    return rows
