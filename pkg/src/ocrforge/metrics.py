"""Token-level OCR and translation metrics.

Tokenization: NFC normalize, lowercase, then scan codepoints. Letters,
digits and combining marks extend a token; ``.``, ``,`` and ``:`` extend it
only between two digits (so ``5.99`` is one token and a trailing period is
not). Every CJK ideograph or kana is a token on its own, as is every
Hangul syllable.
Everything else separates tokens.

All three metrics count clipped multiset matches
``sum_w min(hyp[w], ref[w])``. Hallucination is measured against the
reference transcription, not against visual evidence.
"""

from __future__ import annotations

import json
import math
import unicodedata
from collections import Counter
from dataclasses import dataclass, field

from .errors import EmptyCorpus, EmptyQuery, MissingTargetText, UnknownId

_NUMERIC_JOINERS = ".,:"
_SINGLETON_RANGES = (
    (0x3040, 0x309F),  # Hiragana
    (0x30A0, 0x30FF),  # Katakana
    (0x31F0, 0x31FF),  # Katakana phonetic extensions
    (0xFF66, 0xFF9F),  # halfwidth Katakana
    (0x3400, 0x4DBF),  # CJK extension A
    (0x4E00, 0x9FFF),  # CJK unified
    (0xF900, 0xFAFF),  # CJK compatibility
    (0x20000, 0x3134F),  # CJK extensions B..G
    (0xAC00, 0xD7A3),  # Hangul syllables
)


def is_singleton(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _SINGLETON_RANGES)


def _is_word_char(ch: str) -> bool:
    cat = unicodedata.category(ch)
    return cat[0] in "LM" or cat == "Nd"


def _is_digit(ch: str) -> bool:
    return unicodedata.category(ch) == "Nd"


def normalize(text: str) -> str:
    return unicodedata.normalize("NFC", unicodedata.normalize("NFC", text).lower())


def tokenize_list(text: str) -> list[str]:
    s = normalize(text)
    tokens: list[str] = []
    cur: list[str] = []

    def flush():
        if cur:
            tokens.append("".join(cur))
            cur.clear()

    n = len(s)
    for i, ch in enumerate(s):
        if is_singleton(ch):
            flush()
            tokens.append(ch)
        elif _is_word_char(ch):
            cur.append(ch)
        elif (ch in _NUMERIC_JOINERS and cur and 0 < i < n - 1
              and _is_digit(s[i - 1]) and _is_digit(s[i + 1])):
            cur.append(ch)
        else:
            flush()
    flush()
    return tokens


@dataclass(frozen=True)
class TokenBag:
    tokens: tuple[str, ...]
    counts: Counter = field(compare=False, repr=False)

    @classmethod
    def of(cls, tokens) -> "TokenBag":
        toks = tuple(tokens)
        if any(not t for t in toks):
            raise ValueError("tokens must be non-empty")
        return cls(toks, Counter(toks))

    def __len__(self):
        return len(self.tokens)


def tokenize(text: str, lang_hint: str | None = None) -> TokenBag:
    """Token bag of ``text``; ``lang_hint`` is accepted for interface stability and unused."""
    return TokenBag.of(tokenize_list(text))


def _bag(x) -> TokenBag:
    if isinstance(x, TokenBag):
        return x
    if isinstance(x, str):
        return tokenize(x)
    return TokenBag.of(x)


def clipped_matches(hyp, ref) -> int:
    h, r = _bag(hyp), _bag(ref)
    return sum(min(c, r.counts[w]) for w, c in h.counts.items())


def ocr_completeness(hyp, ref) -> float:
    h, r = _bag(hyp), _bag(ref)
    if not r.tokens:
        return 100.0
    return 100.0 * clipped_matches(h, r) / len(r)


def hallucination_rate(hyp, ref) -> float:
    h, r = _bag(hyp), _bag(ref)
    if not h.tokens:
        return 0.0
    return 100.0 * (len(h) - clipped_matches(h, r)) / len(h)


def _bleu_from_counts(matches: int, hyp_len: int, ref_len: int) -> float:
    if hyp_len == 0:
        return 0.0
    p1 = matches / hyp_len
    bp = 1.0 if hyp_len >= ref_len else math.exp(1.0 - ref_len / hyp_len)
    return bp * p1


def bleu1(hyp, ref) -> float:
    h, r = _bag(hyp), _bag(ref)
    return _bleu_from_counts(clipped_matches(h, r), len(h), len(r))


def corpus_bleu1(rows) -> float:
    """Corpus-level BLEU-1: matches and lengths are summed before the ratio and penalty."""
    rows = list(rows)
    if not rows:
        raise EmptyCorpus("corpus BLEU needs at least one row")
    m = hl = rl = 0
    for hyp, ref in rows:
        h, r = _bag(hyp), _bag(ref)
        m += clipped_matches(h, r)
        hl += len(h)
        rl += len(r)
    return _bleu_from_counts(m, hl, rl)


# ---------------------------------------------------------------- evaluation


@dataclass
class ScoreRow:
    id: str
    completeness: float
    hallucination: float
    bleu1: float
    condition_tags: list[str]

    def to_json(self) -> dict:
        return {"id": self.id, "completeness": self.completeness, "hallucination": self.hallucination,
                "bleu1": self.bleu1, "condition_tags": list(self.condition_tags)}


@dataclass
class GroupScore:
    count: int
    completeness: float
    hallucination: float
    bleu1: float  # corpus level, x100

    def to_json(self) -> dict:
        return {"count": self.count, "completeness": self.completeness,
                "hallucination": self.hallucination, "bleu1": self.bleu1}


@dataclass
class EvalReport:
    mode: str
    rows: list[ScoreRow]
    groups: dict[str, GroupScore]
    overall: GroupScore
    missing: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "overall": self.overall.to_json(),
            "groups": {k: g.to_json() for k, g in self.groups.items()},
            "missing_predictions": list(self.missing),
            "rows": [r.to_json() for r in self.rows],
        }


# Display order for condition rows; clean first, then degradations.
TAG_ORDER = ("clean", "blur", "rotation", "perspective", "occlusion", "compression",
             "low_resolution", "low_contrast", "clutter")


def tag_label(tag: str) -> str:
    return tag.replace("_", " ").capitalize()


def _sorted_tags(tags) -> list[str]:
    known = [t for t in TAG_ORDER if t in tags]
    return known + sorted(t for t in tags if t not in TAG_ORDER)


def _group(rows: list[ScoreRow], pairs: dict[str, tuple[TokenBag, TokenBag]]) -> GroupScore:
    n = len(rows)
    return GroupScore(
        count=n,
        completeness=sum(r.completeness for r in rows) / n,
        hallucination=sum(r.hallucination for r in rows) / n,
        bleu1=100.0 * corpus_bleu1(pairs[r.id] for r in rows),
    )


def evaluate(predictions: dict[str, str], records, mode: str = "ocr") -> EvalReport:
    """Score predictions against manifest records, per condition tag and overall.

    Records without a prediction are scored as an empty hypothesis and
    listed in ``missing``.
    """
    if mode not in ("ocr", "translation"):
        raise ValueError(f"mode must be 'ocr' or 'translation', got {mode!r}")
    by_id = {r.id: r for r in records}
    for pid in predictions:
        if pid not in by_id:
            raise UnknownId(f"prediction id {pid!r} is not in the manifest")
    if not by_id:
        raise EmptyCorpus("manifest has no records")
    rows, pairs, missing = [], {}, []
    for rid in sorted(by_id):
        rec = by_id[rid]
        if mode == "translation":
            if rec.full_text_tgt is None:
                raise MissingTargetText(f"record {rid} has no full_text_tgt")
            ref_text = rec.full_text_tgt
            lang = rec.language_tgt
        else:
            ref_text, lang = rec.full_text_src, rec.language_src
        if rid not in predictions:
            missing.append(rid)
        h = tokenize(predictions.get(rid, ""), lang)
        r = tokenize(ref_text, lang)
        pairs[rid] = (h, r)
        rows.append(ScoreRow(rid, ocr_completeness(h, r), hallucination_rate(h, r), bleu1(h, r),
                             list(rec.condition_tags)))
    tags = {t for row in rows for t in row.condition_tags}
    groups = {t: _group([row for row in rows if t in row.condition_tags], pairs) for t in _sorted_tags(tags)}
    return EvalReport(mode, rows, groups, _group(rows, pairs), missing)


def format_table(report: EvalReport) -> str:
    """Aligned plain-text table: one row per condition tag, then overall."""
    header = ("Condition", "N", "Completeness", "Hallucination", "BLEU-1")
    body = [(tag_label(t), str(g.count), f"{g.completeness:.1f}", f"{g.hallucination:.1f}", f"{g.bleu1:.1f}")
            for t, g in report.groups.items()]
    o = report.overall
    body.append(("Overall", str(o.count), f"{o.completeness:.1f}", f"{o.hallucination:.1f}", f"{o.bleu1:.1f}"))
    widths = [max(len(r[i]) for r in [header] + body) for i in range(len(header))]

    def fmt(r):
        return "  ".join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(r, widths)))

    rule = "-" * len(fmt(header))
    lines = [f"mode: {report.mode}", fmt(header), rule] + [fmt(r) for r in body[:-1]] + [rule, fmt(body[-1])]
    return "\n".join(lines) + "\n"


def report_json(report: EvalReport) -> str:
    return json.dumps(report.to_json(), ensure_ascii=False, indent=2) + "\n"


# ---------------------------------------------------------------- prompting


COT_BULLETS = (
    "- Examine the entire image to first understand the overall scene and global context.",
    "- If the question involves small, distant, or off-center objects or text, systematically search "
    "different image regions, including the foreground, background, left, and right areas, while focusing "
    "on potentially relevant details.",
    "- If the text appears blurry, low-contrast, partially occluded, or rotated, reason as if mentally "
    "focusing on, enhancing, or re-orienting the relevant region to improve readability.",
    "- When appropriate, briefly explain the visual evidence or reasoning process used to derive the answer.",
    "- Finally, provide a clear and precise answer grounded in the observed image evidence.",
)
COT_TEMPLATE = "\n".join(COT_BULLETS)


def build_cot_prompt(query: str) -> str:
    """Fixed step-by-step visual reasoning instructions followed by the question."""
    if not query or not query.strip():
        raise EmptyQuery("query must be non-empty")
    return f"{COT_TEMPLATE}\n\nQuestion: {query}"
