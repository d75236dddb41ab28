"""Regenerate tests/data/derive_seed_golden.tsv.

Uses its own copy of the SplitMix64 finalizer so the golden values do not
depend on the package. The file is permanent: never regenerate it to make a
failing test pass.
"""

import random
from pathlib import Path

M = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15


def finalize(z):
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M
    return z ^ (z >> 31)


def main():
    rnd = random.Random(20240601)
    pairs = [(0, 0), (0, 1), (1, 0), (7, 0), (7, 199), (M, 0), (M, M), (0, M), (GAMMA, 1), (12345, 67890)]
    while len(pairs) < 256:
        bits = rnd.choice((8, 32, 64))
        pairs.append((rnd.getrandbits(bits), rnd.getrandbits(rnd.choice((4, 20, 64)))))
    out = Path(__file__).resolve().parents[1] / "tests" / "data" / "derive_seed_golden.tsv"
    with open(out, "w") as fh:
        fh.write("# master\tindex\tseed\n")
        for m, i in pairs:
            fh.write(f"{m}\t{i}\t{finalize(m ^ ((i * GAMMA) & M))}\n")


if __name__ == "__main__":
    main()
