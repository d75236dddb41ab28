"""Regenerate src/ocrforge/_font8x16.py from DejaVu Sans Mono Bold.

Run once; the generated module is committed so the package never needs the TTF.
"""
import sys
from pathlib import Path

from PIL import Image, ImageDraw, ImageFont

TTF = "/usr/share/fonts/truetype/dejavu/DejaVuSansMono-Bold.ttf"
CODEPOINTS = list(range(0x20, 0x7F)) + list(range(0xA0, 0x100))


def main(out):
    font = ImageFont.truetype(TTF, 13)
    rows = []
    for cp in CODEPOINTS:
        im = Image.new("1", (8, 16), 0)
        draw = ImageDraw.Draw(im)
        draw.fontmode = "1"
        draw.text((0, 12), chr(cp), font=font, fill=1, anchor="ls")
        data = bytearray()
        for y in range(16):
            byte = 0
            for x in range(8):
                if im.getpixel((x, y)):
                    byte |= 0x80 >> x
            data.append(byte)
        rows.append(f"    0x{cp:04X}: \"{data.hex()}\",")
    body = "\n".join(rows)
    Path(out).write_text(
        '"""8x16 monospace bitmap face (printable ASCII + Latin-1), rows MSB-left.\n\n'
        'Generated by tools/build_font.py from DejaVu Sans Mono Bold; do not edit.\n"""\n\n'
        f"GLYPHS = {{\n{body}\n}}\n",
        encoding="utf-8",
    )


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "src/ocrforge/_font8x16.py")
