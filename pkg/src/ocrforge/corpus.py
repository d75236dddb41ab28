"""Source-text sampling and lexicon-based target pairing.

Template file (JSON, UTF-8)::

    {
      "vocab": {"en": {"food": ["coffee", "ice cream"], ...}, ...},
      "templates": [
        {
          "template_id": "en-receipt",
          "language": "en",
          "family": "receipt",
          "lines": ["{shop}", {"pattern": "{item} {price}", "repeat": [2, 4]}, "TOTAL {total}"],
          "slots": {
            "shop": {"kind": "word", "vocab": "shop"},
            "item": {"kind": "word", "vocab": "food"},
            "price": {"kind": "price", "min": 150, "max": 1200, "step": 10},
            "total": {"kind": "total"}
          }
        }
      ]
    }

Slot kinds: ``word`` (draw from ``vocab[language][vocab]``), ``choice``
(draw from an inline ``values`` list), ``price`` (integer cents in
``[min, max]`` on a ``step`` grid, formatted ``D.CC``), ``int`` (integer in
``[min, max]``) and ``total`` (sum of every price emitted before it).

Lexicon file (TSV, UTF-8): ``key<TAB>fr=cafe<TAB>es=cafe...``. Blank lines
and lines starting with ``#`` are skipped.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    EmptyTemplateSet,
    InsufficientInputs,
    MissingLexiconForLanguage,
    TemplateError,
)
from .rng import Rng

LANG_RE = re.compile(r"^[a-z][a-z-]{1,7}$")
_SLOT_RE = re.compile(r"\{([A-Za-z_][A-Za-z0-9_]*)\}")
_SPACE_SPLIT = re.compile(r"(\s+)")
_HAS_DIGIT = re.compile(r"\d")


def check_lang(code: str) -> str:
    if not isinstance(code, str) or not LANG_RE.match(code):
        raise TemplateError(f"malformed language code {code!r}")
    return code


def format_cents(cents: int) -> str:
    return f"{cents // 100}.{cents % 100:02d}"


@dataclass(frozen=True)
class LexiconEntry:
    key: str
    translations: dict[str, str]

    def __post_init__(self):
        if not self.key.strip():
            raise TemplateError("lexicon key must be non-empty")
        for lang in self.translations:
            check_lang(lang)


@dataclass
class TextSample:
    lines: list[str]
    language: str
    template_id: str
    numeric_fields: list[tuple[int, str]] = field(default_factory=list)
    line_languages: list[str] | None = None

    def __post_init__(self):
        if not self.lines:
            raise TemplateError("a text sample needs at least one line")
        for line in self.lines:
            if not line.strip():
                raise TemplateError("text sample lines must be non-empty")
        if self.line_languages is None:
            self.line_languages = [self.language] * len(self.lines)

    @property
    def text(self) -> str:
        return "\n".join(self.lines)


@dataclass
class ParallelTextPair:
    src: TextSample
    tgt: TextSample
    coverage: float
    translated: list[bool]

    def __post_init__(self):
        if len(self.src.lines) != len(self.tgt.lines):
            raise TemplateError("source and target line counts differ")
        expect = sum(self.translated) / len(self.translated) if self.translated else 0.0
        if abs(expect - self.coverage) > 1e-12:
            raise TemplateError("coverage inconsistent with per-line flags")


@dataclass(frozen=True)
class Template:
    template_id: str
    language: str
    family: str
    lines: tuple  # of (pattern, (min_repeat, max_repeat))
    slots: dict


@dataclass
class TemplateSet:
    templates: list[Template]
    vocab: dict[str, dict[str, list[str]]]

    def for_language(self, lang: str) -> list[Template]:
        return [t for t in self.templates if t.language == lang]

    @property
    def languages(self) -> list[str]:
        return sorted({t.language for t in self.templates})

    def family_of(self, template_id: str) -> str:
        for t in self.templates:
            if t.template_id == template_id:
                return t.family
        return "generic"


# ---------------------------------------------------------------- loading


def _parse_template(raw: dict) -> Template:
    try:
        tid = raw["template_id"]
        lang = check_lang(raw["language"])
        slots = dict(raw.get("slots", {}))
        lines = []
        for item in raw["lines"]:
            if isinstance(item, str):
                lines.append((item, (1, 1)))
            else:
                lo, hi = item.get("repeat", [1, 1])
                if not 0 <= lo <= hi:
                    raise TemplateError(f"{tid}: bad repeat range {lo}..{hi}")
                lines.append((item["pattern"], (int(lo), int(hi))))
    except KeyError as exc:
        raise TemplateError(f"template missing field {exc}") from None
    for pattern, _ in lines:
        for name in _SLOT_RE.findall(pattern):
            if name not in slots:
                raise TemplateError(f"{tid}: undeclared slot {{{name}}}")
    for name, decl in slots.items():
        if decl.get("kind") not in ("word", "choice", "price", "int", "total"):
            raise TemplateError(f"{tid}: slot {name!r} has unknown kind {decl.get('kind')!r}")
    return Template(tid, lang, raw.get("family", "generic"), tuple(lines), slots)


def parse_templates(data: dict) -> TemplateSet:
    templates = [_parse_template(t) for t in data.get("templates", [])]
    ids = [t.template_id for t in templates]
    if len(set(ids)) != len(ids):
        raise TemplateError("duplicate template_id")
    return TemplateSet(templates, data.get("vocab", {}))


def load_templates(path) -> TemplateSet:
    with open(path, encoding="utf-8") as fh:
        return parse_templates(json.load(fh))


def load_lexicon(path) -> list[LexiconEntry]:
    entries = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            cols = line.split("\t")
            translations = {}
            for col in cols[1:]:
                if not col:
                    continue
                lang, sep, text = col.partition("=")
                if not sep:
                    raise TemplateError(f"{path}:{line_no}: expected lang=translation, got {col!r}")
                translations[check_lang(lang.strip())] = text
            entries.append(LexiconEntry(cols[0].strip(), translations))
    return entries


def default_data_dir() -> Path:
    return Path(__file__).parent / "data"


def default_templates() -> TemplateSet:
    return load_templates(default_data_dir() / "templates.json")


def default_lexicon() -> list[LexiconEntry]:
    return load_lexicon(default_data_dir() / "lexicon.tsv")


# ---------------------------------------------------------------- sampling


def sample_source_text(templates: TemplateSet, lang: str, rng: Rng) -> TextSample:
    """Instantiate one uniformly chosen template of ``lang``."""
    if not templates.templates:
        raise EmptyTemplateSet("template set is empty")
    pool = templates.for_language(lang)
    if not pool:
        raise EmptyTemplateSet(f"no templates for language {lang!r}")
    tpl = pool[rng.below(len(pool))]
    vocab = templates.vocab.get(lang)

    lines: list[str] = []
    numeric: list[tuple[int, str]] = []
    price_sum = 0

    for pattern, (lo, hi) in tpl.lines:
        for _ in range(rng.randint(lo, hi)):
            line_idx = len(lines)
            pieces = []
            pos = 0
            for m in _SLOT_RE.finditer(pattern):
                pieces.append(pattern[pos:m.start()])
                pos = m.end()
                decl = tpl.slots[m.group(1)]
                kind = decl["kind"]
                if kind == "word":
                    if vocab is None:
                        raise MissingLexiconForLanguage(f"no vocabulary for language {lang!r}")
                    words = vocab.get(decl["vocab"])
                    if not words:
                        raise MissingLexiconForLanguage(
                            f"vocabulary {decl['vocab']!r} missing for language {lang!r}")
                    pieces.append(words[rng.below(len(words))])
                elif kind == "choice":
                    pieces.append(rng.choice(decl["values"]))
                elif kind == "price":
                    step = int(decl.get("step", 1))
                    lo_c, hi_c = int(decl["min"]), int(decl["max"])
                    cents = lo_c + step * rng.below((hi_c - lo_c) // step + 1)
                    price_sum += cents
                    text = format_cents(cents)
                    numeric.append((line_idx, text))
                    pieces.append(text)
                elif kind == "int":
                    v = rng.randint(int(decl["min"]), int(decl["max"]))
                    numeric.append((line_idx, str(v)))
                    pieces.append(str(v))
                else:  # total
                    text = format_cents(price_sum)
                    numeric.append((line_idx, text))
                    pieces.append(text)
            pieces.append(pattern[pos:])
            line = "".join(pieces).strip()
            if line:
                lines.append(line)
    return TextSample(lines, lang, tpl.template_id, numeric)


# ---------------------------------------------------------------- translation


class _LexiconIndex:
    def __init__(self, lexicon: list[LexiconEntry], tgt_lang: str):
        self.table: dict[tuple[str, ...], str] = {}
        for entry in lexicon:
            if tgt_lang in entry.translations:
                key = tuple(w.casefold() for w in entry.key.split())
                # first entry wins on duplicate keys
                self.table.setdefault(key, entry.translations[tgt_lang])
        self.max_words = max((len(k) for k in self.table), default=0)

    def translate_line(self, line: str) -> tuple[str, bool]:
        parts = _SPACE_SPLIT.split(line)
        words = parts[0::2]
        seps = parts[1::2]
        out: list[str] = []
        hit = False
        i = 0
        while i < len(words):
            matched = 0
            for k in range(min(self.max_words, len(words) - i), 0, -1):
                span = words[i:i + k]
                if any(_HAS_DIGIT.search(w) for w in span):
                    continue
                key = tuple(w.casefold() for w in span)
                if key in self.table:
                    repl = self.table[key]
                    joined = " ".join(span)
                    if joined.isupper():
                        repl = repl.upper()
                    out.append(repl)
                    matched = k
                    hit = True
                    break
            if not matched:
                out.append(words[i])
                matched = 1
            i += matched
            if i - 1 < len(seps) and i < len(words):
                out.append(seps[i - 1])
        return "".join(out), hit


def pair_translation(src: TextSample, lexicon: list[LexiconEntry], tgt_lang: str) -> ParallelTextPair:
    """Replace lexicon keys line by line, longest match first, left to right.

    Tokens carrying digits are never translated; unmatched words pass through.
    """
    check_lang(tgt_lang)
    index = _LexiconIndex(lexicon, tgt_lang)
    tgt_lines, flags = [], []
    for line in src.lines:
        text, hit = index.translate_line(line)
        tgt_lines.append(text)
        flags.append(hit)
    coverage = sum(flags) / len(flags)
    tgt = TextSample(tgt_lines, tgt_lang, src.template_id, list(src.numeric_fields))
    return ParallelTextPair(src, tgt, coverage, flags)


def mix_languages(samples: list[TextSample], rng: Rng) -> TextSample:
    """Randomly interleave lines of samples in different languages.

    Each input keeps its internal line order; per-line languages are kept in
    ``line_languages``.
    """
    if len(samples) < 2 or len({s.language for s in samples}) < 2:
        raise InsufficientInputs("mixing needs at least two samples in distinct languages")
    cursors = [0] * len(samples)
    lines: list[str] = []
    langs: list[str] = []
    numeric: list[tuple[int, str]] = []
    while True:
        live = [k for k, s in enumerate(samples) if cursors[k] < len(s.lines)]
        if not live:
            break
        k = live[rng.below(len(live))]
        s = samples[k]
        src_idx = cursors[k]
        out_idx = len(lines)
        lines.append(s.lines[src_idx])
        langs.append(s.line_languages[src_idx])
        numeric.extend((out_idx, v) for li, v in s.numeric_fields if li == src_idx)
        cursors[k] += 1
    tid = "+".join(s.template_id for s in samples)
    return TextSample(lines, "mixed", tid, numeric, langs)
