"""JSON-lines dataset manifest.

One record per line, keys in a fixed order, floats in shortest round-trip
form and uint64 seeds as decimal strings, so equal datasets serialize to
identical bytes. A non-empty manifest starts with the header line
``{"schema_version": 1}``; a manifest with no records is an empty file.
Image paths are relative to the manifest's directory.

Prediction files are JSON lines of ``{"id": ..., "text": ...}``.
"""

from __future__ import annotations

import json
import logging
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import check_lang
from .degrade import DegradationSpec
from .errors import (
    DataError,
    DuplicateId,
    DuplicatePredictionId,
    InvariantViolation,
    IoFailure,
    MalformedLine,
)
from .rng import MASK64, derive_seed  # noqa: F401  (re-exported)

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
HEADER = {"schema_version": SCHEMA_VERSION}

RECORD_KEYS = (
    "id", "image_path", "width", "height", "language_src", "language_tgt", "regions",
    "full_text_src", "full_text_tgt", "degradations", "condition_tags", "master_seed", "sample_index",
)
REGION_KEYS = ("quad", "text", "line_index", "occluded_fraction", "clipped")


def format_id(index: int, width: int = 6) -> str:
    return f"{index:0{width}d}"


@dataclass
class RegionRecord:
    quad: np.ndarray
    text: str
    line_index: int
    occluded_fraction: float = 0.0
    clipped: bool = False

    def to_json(self) -> dict:
        return {
            "quad": [[float(x), float(y)] for x, y in np.asarray(self.quad, dtype=np.float64)],
            "text": self.text,
            "line_index": int(self.line_index),
            "occluded_fraction": float(self.occluded_fraction),
            "clipped": bool(self.clipped),
        }

    def __eq__(self, other):
        if not isinstance(other, RegionRecord):
            return NotImplemented
        return (np.array_equal(self.quad, other.quad) and self.text == other.text
                and self.line_index == other.line_index
                and self.occluded_fraction == other.occluded_fraction and self.clipped == other.clipped)


@dataclass
class SampleRecord:
    id: str
    image_path: str
    width: int
    height: int
    language_src: str
    language_tgt: str | None
    regions: list[RegionRecord]
    full_text_src: str
    full_text_tgt: str | None = None
    degradations: list[DegradationSpec] = field(default_factory=list)
    condition_tags: list[str] = field(default_factory=lambda: ["clean"])
    master_seed: int = 0
    sample_index: int = 0

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "image_path": self.image_path,
            "width": int(self.width),
            "height": int(self.height),
            "language_src": self.language_src,
            "language_tgt": self.language_tgt,
            "regions": [r.to_json() for r in self.regions],
            "full_text_src": self.full_text_src,
            "full_text_tgt": self.full_text_tgt,
            "degradations": [d.to_json() for d in self.degradations],
            "condition_tags": list(self.condition_tags),
            "master_seed": str(int(self.master_seed)),
            "sample_index": int(self.sample_index),
        }

    @property
    def tgt_lines(self) -> list[str] | None:
        return None if self.full_text_tgt is None else self.full_text_tgt.split("\n")


def dumps_record(rec: SampleRecord) -> str:
    return json.dumps(rec.to_json(), ensure_ascii=False, separators=(", ", ": "), allow_nan=False)


# ---------------------------------------------------------------- writing


def write_manifest(records, path) -> int:
    """Write ``records`` atomically; returns the record count.

    The file is assembled under a temporary name and moved into place, so
    a failure never leaves a partial manifest.
    """
    path = Path(path)
    seen = set()
    try:
        fd, tmp = tempfile.mkstemp(prefix=".manifest-", dir=path.parent or ".")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
    n = 0
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            for rec in records:
                if rec.id in seen:
                    raise DuplicateId(f"duplicate record id {rec.id!r}")
                seen.add(rec.id)
                if n == 0:
                    fh.write(json.dumps(HEADER) + "\n")
                fh.write(dumps_record(rec) + "\n")
                n += 1
        os.replace(tmp, path)
    except BaseException as exc:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        if isinstance(exc, OSError):
            raise IoFailure(f"cannot write {path}: {exc}") from exc
        raise
    return n


# ---------------------------------------------------------------- reading


class Manifest(list):
    """Records read from a manifest plus the number of unknown keys skipped."""

    unknown_keys: int = 0


def _require(obj, key, types, line_no):
    if key not in obj:
        raise InvariantViolation(line_no, key, "missing")
    v = obj[key]
    types = types if isinstance(types, tuple) else (types,)
    if not isinstance(v, types) or (isinstance(v, bool) and bool not in types):
        raise InvariantViolation(line_no, key, f"unexpected type {type(v).__name__}")
    return v


def _uint64_str(obj, key, line_no) -> int:
    s = _require(obj, key, str, line_no)
    if not s.isdigit() or int(s) > MASK64:
        raise InvariantViolation(line_no, key, f"not a uint64 decimal string: {s!r}")
    return int(s)


def _parse_region(obj, line_no, unknown) -> RegionRecord:
    if not isinstance(obj, dict):
        raise InvariantViolation(line_no, "regions", "region is not an object")
    unknown[0] += len(set(obj) - set(REGION_KEYS))
    quad = _require(obj, "quad", list, line_no)
    try:
        q = np.array(quad, dtype=np.float64)
    except (TypeError, ValueError):
        raise InvariantViolation(line_no, "quad", "not numeric") from None
    if q.shape != (4, 2) or not np.all(np.isfinite(q)):
        raise InvariantViolation(line_no, "quad", "expected 4 finite [x, y] corners")
    li = _require(obj, "line_index", int, line_no)
    if li < 0:
        raise InvariantViolation(line_no, "line_index", "negative")
    occ = _require(obj, "occluded_fraction", (int, float), line_no)
    if not 0 <= occ <= 1:
        raise InvariantViolation(line_no, "occluded_fraction", "outside [0, 1]")
    clipped = obj.get("clipped", False)
    if not isinstance(clipped, bool):
        raise InvariantViolation(line_no, "clipped", "not a boolean")
    return RegionRecord(q, _require(obj, "text", str, line_no), li, float(occ), clipped)


def parse_record(obj, line_no: int, unknown=None) -> SampleRecord:
    """Validate one decoded manifest object; ``unknown`` is a one-item counter list."""
    unknown = unknown if unknown is not None else [0]
    if not isinstance(obj, dict):
        raise MalformedLine(line_no, "record is not a JSON object")
    unknown[0] += len(set(obj) - set(RECORD_KEYS))
    rid = _require(obj, "id", str, line_no)
    if not rid:
        raise InvariantViolation(line_no, "id", "empty")
    width = _require(obj, "width", int, line_no)
    height = _require(obj, "height", int, line_no)
    for k, v in (("width", width), ("height", height)):
        if not 0 < v <= 0xFFFFFFFF:
            raise InvariantViolation(line_no, k, "outside uint32 range")
    lang_src = _require(obj, "language_src", str, line_no)
    lang_tgt = obj.get("language_tgt")
    for k, v in (("language_src", lang_src), ("language_tgt", lang_tgt)):
        if v is None and k == "language_tgt":
            continue
        try:
            check_lang(v)
        except (DataError, TypeError):
            raise InvariantViolation(line_no, k, f"bad language code {v!r}") from None
    regions = [_parse_region(r, line_no, unknown) for r in _require(obj, "regions", list, line_no)]
    full_src = _require(obj, "full_text_src", str, line_no)
    joined = "\n".join(r.text for r in sorted(regions, key=lambda r: r.line_index))
    if joined != full_src:
        raise InvariantViolation(line_no, "full_text_src", "does not match region texts in line order")
    full_tgt = obj.get("full_text_tgt")
    if full_tgt is not None and not isinstance(full_tgt, str):
        raise InvariantViolation(line_no, "full_text_tgt", "not a string")
    degr = []
    for d in _require(obj, "degradations", list, line_no):
        try:
            if not isinstance(d, dict) or not isinstance(d.get("seed", "0"), str):
                raise ValueError("bad degradation object")
            degr.append(DegradationSpec.from_json(d))
        except (DataError, ValueError, TypeError, KeyError) as exc:
            raise InvariantViolation(line_no, "degradations", str(exc)) from None
    tags = _require(obj, "condition_tags", list, line_no)
    if not tags or not all(isinstance(t, str) and t for t in tags):
        raise InvariantViolation(line_no, "condition_tags", "expected non-empty list of strings")
    index = _require(obj, "sample_index", int, line_no)
    if not 0 <= index <= MASK64:
        raise InvariantViolation(line_no, "sample_index", "outside uint64 range")
    return SampleRecord(
        id=rid,
        image_path=_require(obj, "image_path", str, line_no),
        width=width,
        height=height,
        language_src=lang_src,
        language_tgt=lang_tgt,
        regions=regions,
        full_text_src=full_src,
        full_text_tgt=full_tgt,
        degradations=degr,
        condition_tags=list(tags),
        master_seed=_uint64_str(obj, "master_seed", line_no),
        sample_index=index,
    )


def _json_lines(path):
    """Yield ``(line_no, decoded)`` for each non-blank line, 1-based."""
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    lines = data.split(b"\n")
    for i, raw in enumerate(lines, start=1):
        if not raw.strip():
            continue
        try:
            yield i, json.loads(raw.decode("utf-8"), parse_constant=_reject_constant)
        except (UnicodeDecodeError, json.JSONDecodeError, ValueError) as exc:
            raise MalformedLine(i, str(exc)) from None


def _reject_constant(name):
    raise ValueError(f"non-finite number {name}")


def read_manifest(path) -> Manifest:
    """Parse and validate a manifest; unknown keys are counted and skipped."""
    out = Manifest()
    unknown = [0]
    seen: set[str] = set()
    for line_no, obj in _json_lines(path):
        if line_no == 1 and isinstance(obj, dict) and "schema_version" in obj:
            if obj["schema_version"] != SCHEMA_VERSION:
                raise MalformedLine(line_no, f"unsupported schema_version {obj['schema_version']!r}")
            continue
        rec = parse_record(obj, line_no, unknown)
        if rec.id in seen:
            raise InvariantViolation(line_no, "id", f"duplicate id {rec.id!r}")
        seen.add(rec.id)
        out.append(rec)
    out.unknown_keys = unknown[0]
    if unknown[0]:
        log.warning("%s: ignored %d unknown key(s)", path, unknown[0])
    return out


def read_predictions(path) -> dict[str, str]:
    """Map prediction id to text; rejects duplicates and malformed lines."""
    preds: dict[str, str] = {}
    for line_no, obj in _json_lines(path):
        if not isinstance(obj, dict) or not isinstance(obj.get("id"), str) or not isinstance(obj.get("text"), str):
            raise MalformedLine(line_no, 'expected {"id": string, "text": string}')
        if obj["id"] in preds:
            raise DuplicatePredictionId(f"line {line_no}: duplicate prediction id {obj['id']!r}")
        preds[obj["id"]] = obj["text"]
    return preds


def write_predictions(preds, path) -> None:
    """Write ``(id, text)`` pairs as a prediction file."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for pid, text in preds:
            fh.write(json.dumps({"id": pid, "text": text}, ensure_ascii=False) + "\n")


def resolve_image(manifest_path, rec: SampleRecord) -> Path:
    return Path(manifest_path).parent / rec.image_path
