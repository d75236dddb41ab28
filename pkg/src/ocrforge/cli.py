"""Command line entry point: ``ocrforge {generate,translate,evaluate,inspect,prompt}``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
Progress goes to stderr; results and reports go to stdout.

Every subcommand accepts ``--config FILE``, a UTF-8 JSON object whose keys
are the long flag names (dashes or underscores). Flags given on the
command line win over config values.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import DataError, OcrForgeError, UsageError

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3

MASK_SOURCES = {"gt": "ground_truth", "imported": "imported", "detector": "baseline_detector"}

# built-in defaults, applied after config values
DEFAULTS = {
    "generate": {"seed": 0, "langs": "en", "tgt_lang": None, "templates": None, "lexicon": None,
                 "style": "document", "bg": "random", "bg_image": None, "chain": "", "width": 512,
                 "height": 320, "workers": None, "count": None, "out": None},
    "translate": {"manifest": None, "mask_source": "gt", "mask_dir": None, "lexicon": None,
                  "tgt_lang": None, "out": None},
    "evaluate": {"manifest": None, "pred": None, "mode": "ocr", "report": None},
    "inspect": {"manifest": None, "overlay": None},
    "prompt": {"query": None},
}
REQUIRED = {
    "generate": ("count", "out"),
    "translate": ("manifest",),
    "evaluate": ("manifest", "pred"),
    "inspect": ("manifest",),
    "prompt": ("query",),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _uint64(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("must be a uint64")
    return v


def _count(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ocrforge", description="Synthetic scene-text data with in-place translation and OCR scoring.")
    p.add_argument("-q", "--quiet", action="store_true", help="no progress output on stderr")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)

    def cmd(name, help_text):
        sp = sub.add_parser(name, help=help_text, description=help_text)
        sp.add_argument("--config", metavar="FILE", help="JSON file with default values for this command's flags")
        return sp

    g = cmd("generate", "generate a degraded synthetic dataset with its manifest")
    g.add_argument("--count", type=_count, help="number of samples (required)")
    g.add_argument("--seed", type=_uint64, help="master seed, uint64 (default 0)")
    g.add_argument("--langs", help="comma-separated source languages drawn per sample (default en)")
    g.add_argument("--tgt-lang", help="target language; adds lexicon translations to the manifest")
    g.add_argument("--templates", metavar="FILE", help="template JSON file (default: bundled)")
    g.add_argument("--lexicon", metavar="FILE", help="parallel lexicon TSV (default: bundled)")
    g.add_argument("--style", choices=("document", "scattered"), help="text layout (default document)")
    g.add_argument("--bg", choices=("random", "solid", "gradient", "noise_texture", "imported"),
                   help="background kind; random draws a built-in kind per sample (default random)")
    g.add_argument("--bg-image", metavar="FILE", help="source image for --bg imported")
    g.add_argument("--chain", help='degradation chain "kind:key=val[,key=val][;kind:...]"; '
                                   'values may be ranges lo..hi sampled per image')
    g.add_argument("--width", type=int, help="image width in pixels (default 512)")
    g.add_argument("--height", type=int, help="image height in pixels (default 320)")
    g.add_argument("--workers", type=int, help="worker processes (default: OCRFORGE_THREADS or all cores)")
    g.add_argument("--out", metavar="DIR", help="output directory (required)")

    t = cmd("translate", "replace the text in dataset images with its translation")
    t.add_argument("--manifest", metavar="FILE", help="input manifest (required)")
    t.add_argument("--mask-source", choices=tuple(MASK_SOURCES), help="where text masks come from (default gt)")
    t.add_argument("--mask-dir", metavar="DIR",
                   help="directory of <image stem>.mask.png files for --mask-source imported "
                        "(default: beside each image)")
    t.add_argument("--lexicon", metavar="FILE", help="lexicon TSV used when the manifest lacks target text")
    t.add_argument("--tgt-lang", help="target language (default: the manifest's)")
    t.add_argument("--out", metavar="FILE", help="results JSON-lines file (default translations.jsonl beside the manifest)")

    e = cmd("evaluate", "score predictions against a manifest per image condition")
    e.add_argument("--manifest", metavar="FILE", help="manifest (required)")
    e.add_argument("--pred", metavar="FILE", help='predictions, JSON lines of {"id", "text"} (required)')
    e.add_argument("--mode", choices=("ocr", "translation"), help="reference text to score against (default ocr)")
    e.add_argument("--report", metavar="FILE",
                   help="write the JSON report here, plus a .txt table and a .png chart beside it")

    i = cmd("inspect", "summarize a manifest")
    i.add_argument("--manifest", metavar="FILE", help="manifest (required)")
    i.add_argument("--overlay", metavar="DIR", help="write <id>.overlay.png images with region quads drawn")

    pr = cmd("prompt", "print the step-by-step visual reasoning prompt for a question")
    pr.add_argument("--query", help="the question (required)")
    return p


def resolve_options(command: str, args: argparse.Namespace) -> dict:
    """Merge command-line flags over config-file values over built-in defaults."""
    defaults = DEFAULTS[command]
    config = {}
    if getattr(args, "config", None):
        try:
            raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(raw, dict):
            raise UsageError("config file must hold a JSON object")
        for key, value in raw.items():
            k = key.replace("-", "_")
            if k not in defaults:
                raise UsageError(f"unknown config key {key!r} for {command}")
            config[k] = value
    opts = {}
    for k, default in defaults.items():
        flag = getattr(args, k, None)
        opts[k] = flag if flag is not None else config.get(k, default)
    missing = [k for k in REQUIRED[command] if opts[k] is None]
    if missing:
        raise UsageError(f"{command}: missing " + ", ".join("--" + m.replace("_", "-") for m in missing))
    return opts


class Progress:
    def __init__(self, label: str, quiet: bool):
        self.label = label
        self.quiet = quiet
        self.last = -1

    def __call__(self, done: int, total: int):
        if self.quiet or total == 0:
            return
        pct = 100 * done // total
        if pct != self.last and (pct % 5 == 0 or done == total):
            self.last = pct
            print(f"\r{self.label}: {done}/{total} ({pct}%)", end="\n" if done == total else "",
                  file=sys.stderr, flush=True)


# ---------------------------------------------------------------- commands


def cmd_generate(opts: dict, quiet: bool) -> int:
    from .pipeline import GenerateConfig, default_workers, run_generate

    langs = [s.strip() for s in str(opts["langs"]).split(",") if s.strip()]
    cfg = GenerateConfig(
        count=int(opts["count"]), seed=int(opts["seed"]), langs=langs, tgt_lang=opts["tgt_lang"],
        templates=opts["templates"], lexicon=opts["lexicon"], style=opts["style"], bg=opts["bg"],
        bg_image=opts["bg_image"], chain=opts["chain"] or "", width=int(opts["width"]), height=int(opts["height"]),
    )
    workers = opts["workers"] if opts["workers"] is not None else default_workers()
    if workers < 1:
        raise UsageError("--workers must be >= 1")
    summary = run_generate(cfg, opts["out"], workers=workers, progress=Progress("generate", quiet))
    sys.stdout.write(summary.format())
    return EXIT_OK


def cmd_translate(opts: dict, quiet: bool) -> int:
    from .pipeline import TranslateConfig, run_translate

    manifest = Path(opts["manifest"])
    out = Path(opts["out"]) if opts["out"] else manifest.parent / "translations.jsonl"
    cfg = TranslateConfig(str(manifest), MASK_SOURCES[opts["mask_source"]], opts["lexicon"],
                          opts["tgt_lang"], str(out), opts["mask_dir"])
    rows = run_translate(cfg, progress=Progress("translate", quiet))
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
    ok = sum(1 for r in rows if r["ok"])
    preserved = sum(1 for r in rows if r["preserved"])
    print(f"{len(rows)} records translated, {ok} fully ok, background preserved in {preserved}")
    print(f"results: {out}")
    failed = any(not r["ok"] or not r["preserved"] for r in rows)
    return EXIT_DATA if failed else EXIT_OK


def cmd_evaluate(opts: dict, quiet: bool) -> int:
    from .manifest import read_manifest, read_predictions
    from .metrics import evaluate, format_table, report_json

    records = read_manifest(opts["manifest"])
    preds = read_predictions(opts["pred"])
    report = evaluate(preds, records, opts["mode"])
    table = format_table(report)
    sys.stdout.write(table)
    if report.missing:
        print(f"warning: {len(report.missing)} record(s) had no prediction and were scored as empty",
              file=sys.stderr)
    if opts["report"]:
        from .plotting import plot_report

        path = Path(opts["report"])
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(report_json(report), encoding="utf-8")
        path.with_suffix(".txt").write_text(table, encoding="utf-8")
        plot_report(report, path.with_suffix(".png"))
        print(f"report: {path}", file=sys.stderr)
    return EXIT_OK


def draw_overlay(image, quads, color=(255, 0, 0)):
    """Copy of ``image`` with each quad's outline stroked one pixel wide."""
    from PIL import Image, ImageDraw

    im = Image.fromarray(image)
    draw = ImageDraw.Draw(im)
    for q in quads:
        # drawing coordinates put pixel centers on integers; ours are at +0.5
        pts = [(float(x) - 0.5, float(y) - 0.5) for x, y in q]
        draw.line(pts + [pts[0]], fill=color, width=1)
    import numpy as np

    return np.asarray(im)


def cmd_inspect(opts: dict, quiet: bool) -> int:
    from .imageio import read_image, write_png
    from .manifest import read_manifest, resolve_image

    records = read_manifest(opts["manifest"])
    print(f"{len(records)} records")
    for rec in records:
        langs = rec.language_src + (f"->{rec.language_tgt}" if rec.language_tgt else "")
        print(f"{rec.id}  {rec.width}x{rec.height}  {langs}  tags={','.join(rec.condition_tags)}  "
              f"regions={len(rec.regions)}  {rec.image_path}")
    if records.unknown_keys:
        print(f"warning: {records.unknown_keys} unknown key(s) ignored", file=sys.stderr)
    if opts["overlay"]:
        out = Path(opts["overlay"])
        out.mkdir(parents=True, exist_ok=True)
        for rec in records:
            image = read_image(resolve_image(opts["manifest"], rec))
            write_png(out / f"{rec.id}.overlay.png", draw_overlay(image, [r.quad for r in rec.regions]))
    return EXIT_OK


def cmd_prompt(opts: dict, quiet: bool) -> int:
    from .metrics import build_cot_prompt

    sys.stdout.write(build_cot_prompt(opts["query"]) + "\n")
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "translate": cmd_translate,
    "evaluate": cmd_evaluate,
    "inspect": cmd_inspect,
    "prompt": cmd_prompt,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        opts = resolve_options(args.command, args)
        return COMMANDS[args.command](opts, args.quiet)
    except UsageError as exc:
        print(f"ocrforge: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"ocrforge: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OcrForgeError as exc:
        print(f"ocrforge: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except SystemExit as exc:  # --help
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except KeyboardInterrupt:
        return 130
    except Exception as exc:  # anything else is a bug
        logging.getLogger(__name__).exception("internal error: %s", exc)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
