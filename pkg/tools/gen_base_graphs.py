#!/usr/bin/env python3
"""Regenerate the vendored NR-like base-graph data files.

The protograph supports follow the 5G NR BG1/BG2 layout: a four-row
dual-diagonal encoder core over the parity columns, a degree-1 identity
extension, and heavily connected first two (punctured) columns.  The
per-lifting-set cyclic shifts are synthesized deterministically from a
fixed seed and screened against short cycles for every lifting size in
each set, so the generated graphs are well-conditioned for
belief-propagation decoding but are not copies of the 3GPP tables.

Run from the repository root:

    python tools/gen_base_graphs.py
"""
from __future__ import annotations

import pathlib

import numpy as np

OUT_DIR = pathlib.Path(__file__).resolve().parent.parent / "src" / "ldpcbench" / "data"
SEED = 0x5ECC0DE

# Lifting sets: i_LS -> ascending lifting sizes (38.212 Table 5.3.2-1 layout).
LIFTING_SETS = [
    [2, 4, 8, 16, 32, 64, 128, 256],
    [3, 6, 12, 24, 48, 96, 192, 384],
    [5, 10, 20, 40, 80, 160, 320],
    [7, 14, 28, 56, 112, 224],
    [9, 18, 36, 72, 144, 288],
    [11, 22, 44, 88, 176, 352],
    [13, 26, 52, 104, 208],
    [15, 30, 60, 120, 240],
]

# BG2 protograph: 42 x 52, 10 information columns.  Row supports are the
# standard BG2 layout (197 entries: 4 core rows + 38 identity-extension rows).
BG2_SUPPORT = [
    [0, 1, 2, 3, 6, 9, 10, 11],
    [0, 3, 4, 5, 6, 7, 8, 9, 11, 12],
    [0, 1, 3, 4, 8, 10, 12, 13],
    [1, 2, 4, 5, 6, 7, 8, 9, 10, 13],
    [0, 1, 11, 14],
    [0, 1, 5, 7, 11, 15],
    [0, 5, 7, 9, 11, 16],
    [1, 5, 7, 11, 13, 17],
    [0, 1, 12, 18],
    [1, 8, 10, 11, 19],
    [0, 1, 6, 7, 20],
    [0, 7, 9, 13, 21],
    [1, 3, 11, 22],
    [0, 1, 8, 13, 23],
    [1, 6, 11, 13, 24],
    [0, 10, 11, 25],
    [1, 9, 11, 12, 26],
    [1, 5, 11, 12, 27],
    [0, 6, 7, 28],
    [0, 1, 10, 29],
    [1, 4, 11, 30],
    [0, 8, 13, 31],
    [1, 2, 32],
    [0, 3, 5, 33],
    [1, 2, 9, 34],
    [0, 5, 35],
    [2, 7, 12, 13, 36],
    [0, 6, 37],
    [1, 2, 5, 38],
    [0, 4, 39],
    [2, 5, 7, 9, 40],
    [1, 13, 41],
    [0, 5, 12, 42],
    [2, 7, 10, 43],
    [0, 12, 13, 44],
    [1, 5, 11, 45],
    [0, 2, 7, 46],
    [10, 13, 47],
    [1, 5, 11, 48],
    [0, 7, 12, 49],
    [2, 10, 13, 50],
    [1, 5, 11, 51],
]

# BG1 core rows (46 x 68, 22 information columns).  The extension-row
# supports are generated below with a degree profile matching the BG1
# shape (316 entries total).
BG1_CORE = [
    [0, 1, 2, 3, 5, 6, 9, 10, 11, 12, 13, 15, 16, 18, 19, 20, 21, 22, 23],
    [0, 2, 3, 4, 5, 7, 8, 9, 11, 12, 14, 15, 16, 17, 19, 21, 22, 23, 24],
    [0, 1, 2, 4, 5, 6, 7, 8, 9, 10, 13, 14, 15, 17, 18, 19, 20, 24, 25],
    [0, 1, 3, 4, 6, 7, 8, 10, 11, 12, 13, 14, 16, 17, 18, 20, 21, 22, 25],
]

# Per-extension-row total degree (identity column included); sums to 240.
BG1_EXT_DEGREES = [
    3, 8, 9, 7, 10, 9, 7, 8, 7, 6, 7, 7, 6, 6, 6, 6, 6, 6, 5, 5, 6,
    5, 5, 4, 5, 5, 5, 5, 5, 5, 4, 5, 5, 4, 5, 4, 5, 5, 4, 5, 5, 5,
]


def gen_bg1_support(rng: np.random.Generator) -> list[list[int]]:
    assert sum(BG1_EXT_DEGREES) == 240 and len(BG1_EXT_DEGREES) == 42
    support = [list(r) for r in BG1_CORE]
    counts = np.zeros(26, dtype=np.int64)
    for row in support:
        for c in row:
            counts[c] += 1
    for i, deg in enumerate(BG1_EXT_DEGREES):
        r = 4 + i
        row = [r % 2]  # every extension row touches one punctured column
        # bias remaining picks toward lightly used columns
        cand = np.arange(2, 26)
        for _ in range(deg - 2):
            free = np.array([c for c in cand if c not in row])
            w = 1.0 / (1.0 + counts[free])
            row.append(int(rng.choice(free, p=w / w.sum())))
        for c in row:
            counts[c] += 1
        support.append(sorted(row) + [22 + 4 + i])
    total = sum(len(r) for r in support)
    assert total == 316, total
    return support


def structural_zero(bg: int, info_cols: int, r: int, c: int) -> bool:
    """Entries pinned to shift 0: the dual diagonal of the encoder core and
    the identity extension.  The zero pattern is the same for both graphs;
    only the position of the second free core shift differs (row 1 for BG1,
    row 2 for BG2)."""
    kb = info_cols
    if r >= 4:
        return c == kb + r  # identity extension column
    if r == 0:
        return c == kb + 1
    if r == 1:
        return c in (kb + 1, kb + 2)
    if r == 2:
        return c in (kb + 2, kb + 3)
    if r == 3:
        return c == kb + 3
    return False


def synthesize_shifts(
    support: list[list[int]], info_cols: int, bg: int, rng: np.random.Generator
) -> dict[tuple[int, int], list[int]]:
    kb = info_cols
    pa_rc = [(0, kb), (3, kb)]  # shared shift (row 0 and row 3 of the core)
    pb_rc = (1, kb) if bg == 1 else (2, kb)
    shifts: dict[tuple[int, int], list[int]] = {}
    row_sets = [set(r) for r in support]

    for i_ls, zset in enumerate(LIFTING_SETS):
        zmax = max(zset)
        pa = int(rng.integers(1, zmax))
        pb = int(rng.integers(1, zmax))
        col = {}
        for r, cols in enumerate(support):
            for c in cols:
                if structural_zero(bg, kb, r, c):
                    col[(r, c)] = 0
                elif (r, c) in pa_rc:
                    col[(r, c)] = pa
                elif (r, c) == pb_rc:
                    col[(r, c)] = pb
                else:
                    col[(r, c)] = int(rng.integers(0, zmax))

        frozen = set(k for k in col if structural_zero(bg, kb, *k))
        frozen |= set(pa_rc) | {pb_rc}

        def cycle_free(r1, r2, c1, c2, z):
            d = col[(r1, c1)] - col[(r1, c2)] + col[(r2, c2)] - col[(r2, c1)]
            return d % z != 0

        for r1 in range(len(support)):
            for r2 in range(r1 + 1, len(support)):
                shared = sorted(row_sets[r1] & row_sets[r2])
                for a in range(len(shared)):
                    for b in range(a + 1, len(shared)):
                        c1, c2 = shared[a], shared[b]
                        movable = [
                            k
                            for k in ((r2, c2), (r2, c1), (r1, c2), (r1, c1))
                            if k not in frozen
                        ]
                        for _ in range(80):
                            if all(cycle_free(r1, r2, c1, c2, z) for z in zset):
                                break
                            if not movable:
                                break
                            col[movable[0]] = int(rng.integers(0, zmax))

        for key, val in col.items():
            shifts.setdefault(key, []).append(val)
    return shifts


def write_graph(path: pathlib.Path, bg: int, support, info_cols, shifts) -> None:
    rows = len(support)
    cols = max(max(r) for r in support) + 1
    lines = [
        f"# NR-like base graph {bg}: {rows} rows x {cols} cols, "
        f"{info_cols} information columns.",
        "# Row supports follow the 5G NR BG%d protograph layout (dual-diagonal" % bg,
        "# encoder core, degree-1 identity extension, punctured columns 0-1).",
        "# Cyclic shifts are synthesized deterministically (seed 0x%X) and" % SEED,
        "# screened against length-4 cycles for every lifting size of each of",
        "# the 8 lifting sets; they are not the 3GPP 38.212 shift values.",
        "# Format: 'r c s0 s1 s2 s3 s4 s5 s6 s7' (one shift per lifting set).",
        f"BG {bg} rows={rows} cols={cols}",
    ]
    for r, rcols in enumerate(support):
        for c in rcols:
            svals = " ".join(str(s) for s in shifts[(r, c)])
            lines.append(f"{r} {c} {svals}")
    path.write_text("\n".join(lines) + "\n")
    print(f"wrote {path} ({sum(len(r) for r in support)} entries)")


def write_lifting(path: pathlib.Path) -> None:
    pairs = sorted((z, i) for i, zs in enumerate(LIFTING_SETS) for z in zs)
    lines = [
        "# Lifting sizes and their lifting-set index (38.212 Table 5.3.2-1).",
        "# Format: 'Z i_LS'.",
    ]
    lines += [f"{z} {i}" for z, i in pairs]
    path.write_text("\n".join(lines) + "\n")
    print(f"wrote {path} ({len(pairs)} sizes)")


def main() -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(SEED)
    bg1_support = gen_bg1_support(rng)
    write_graph(OUT_DIR / "bg1.txt", 1, bg1_support, 22, synthesize_shifts(bg1_support, 22, 1, rng))
    write_graph(OUT_DIR / "bg2.txt", 2, BG2_SUPPORT, 10, synthesize_shifts(BG2_SUPPORT, 10, 2, rng))
    write_lifting(OUT_DIR / "lifting_sizes.txt")


if __name__ == "__main__":
    main()
