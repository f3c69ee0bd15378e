"""NR-like QC-LDPC code construction.

Builds code instances from the vendored base-graph data files: base-graph
selection, lifting-size selection, and expansion of the protograph into a
lifted sparse parity-check matrix.  Construction is pure; the resulting
objects are immutable and safe to share across threads.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources

import numpy as np

from .errors import ConstructionError, DataFileError

MAX_LIFTING_SIZE = 384

#: Largest K the BG2 path supports without the small-K info-column
#: reduction, which this library does not implement.
MIN_BG2_K = 200


class BgId(str, Enum):
    BG1 = "BG1"
    BG2 = "BG2"


INFO_COLS = {BgId.BG1: 22, BgId.BG2: 10}
BG_DIMS = {BgId.BG1: (46, 68), BgId.BG2: (42, 52)}
NUM_SHIFT_SETS = 8


@dataclass(frozen=True)
class BaseGraph:
    """Protograph description: entry (row, col, shifts) triples where
    ``shifts`` holds one cyclic shift per lifting set."""

    id: BgId | None
    rows: int
    cols: int
    info_cols: int
    entries: tuple[tuple[int, int, tuple[int, ...]], ...]

    def row_support(self, r: int) -> list[int]:
        return [c for (rr, c, _) in self.entries if rr == r]

    @property
    def num_entries(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class CodeConfig:
    """Everything defining one code instance."""

    k_info: int
    n_coded: int
    bg_id: BgId
    z: int
    k_lifted: int
    num_filler: int

    @property
    def code_rate(self) -> float:
        return self.k_info / self.n_coded

    @property
    def base_cols(self) -> int:
        return BG_DIMS[self.bg_id][1]

    @property
    def base_rows(self) -> int:
        return BG_DIMS[self.bg_id][0]

    @property
    def n_lifted(self) -> int:
        return self.base_cols * self.z

    def describe(self) -> dict:
        return {
            "k_info": self.k_info,
            "n_coded": self.n_coded,
            "code_rate": self.code_rate,
            "bg_id": self.bg_id.value,
            "z": self.z,
            "k_lifted": self.k_lifted,
            "num_filler": self.num_filler,
        }


@dataclass(frozen=True, eq=False)
class ParityCheckMatrix:
    """Lifted sparse parity-check matrix.

    ``indptr``/``indices`` give the per-row column lists of the lifted
    matrix in CSR form; the base-entry arrays (``ent_row``, ``ent_col``,
    ``ent_shift`` with shifts already reduced mod Z and sorted by (row,
    col)) carry the quasi-cyclic structure used by the encoder and the
    decoder kernels.  Expansion is deterministic: identical (BaseGraph, Z)
    inputs produce bit-identical matrices.
    """

    base_rows: int
    base_cols: int
    info_cols: int
    z: int
    ent_row: np.ndarray
    ent_col: np.ndarray
    ent_shift: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray

    @property
    def n_rows(self) -> int:
        return self.base_rows * self.z

    @property
    def n_cols(self) -> int:
        return self.base_cols * self.z

    @property
    def num_ones(self) -> int:
        return int(self.indices.size)

    def row_cols(self, r: int) -> np.ndarray:
        """Column indices of lifted row ``r``."""
        return self.indices[self.indptr[r]:self.indptr[r + 1]]

    def check_codewords(self, bits: np.ndarray) -> np.ndarray:
        """Per-row H @ c^T == 0 over GF(2) for a (N, n_cols) bit matrix."""
        bits = np.atleast_2d(np.asarray(bits, dtype=np.uint8))
        z = self.z
        blocks = bits.reshape(bits.shape[0], self.base_cols, z)
        ok = np.ones(bits.shape[0], dtype=bool)
        for r in range(self.base_rows):
            sel = self.ent_row == r
            acc = np.zeros((bits.shape[0], z), dtype=np.uint8)
            for c, s in zip(self.ent_col[sel], self.ent_shift[sel]):
                acc ^= np.roll(blocks[:, c, :], -int(s), axis=1)
            ok &= ~acc.any(axis=1)
        return ok


def _data_lines(text: str) -> list[tuple[int, str]]:
    out = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((ln, line))
    return out


def _read_data_file(name: str) -> str:
    return resources.files("ldpcbench.data").joinpath(name).read_text("utf-8")


def parse_lifting_table(text: str) -> tuple[tuple[int, int], ...]:
    """(Z, i_LS) pairs from lifting-size file text, ascending in Z."""
    pairs = []
    for ln, line in _data_lines(text):
        parts = line.split()
        if len(parts) != 2:
            raise DataFileError(f"lifting_sizes.txt:{ln}: expected 'Z i_LS', got {line!r}")
        try:
            z, i_ls = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise DataFileError(f"lifting_sizes.txt:{ln}: non-integer field") from exc
        if z < 2 or not 0 <= i_ls < NUM_SHIFT_SETS:
            raise DataFileError(f"lifting_sizes.txt:{ln}: out-of-range value {line!r}")
        pairs.append((z, i_ls))
    pairs.sort()
    if len(pairs) != len({z for z, _ in pairs}):
        raise DataFileError("lifting_sizes.txt: duplicate lifting size")
    return tuple(pairs)


@functools.cache
def load_lifting_table() -> tuple[tuple[int, int], ...]:
    return parse_lifting_table(_read_data_file("lifting_sizes.txt"))


def lifting_set_index(z: int) -> int:
    for zz, i_ls in load_lifting_table():
        if zz == z:
            return i_ls
    raise ConstructionError(f"Z={z} is not a member of the lifting-size set")


def parse_base_graph(text: str, name: str, bg_id: BgId) -> BaseGraph:
    """Parse and validate base-graph file text."""
    lines = _data_lines(text)
    if not lines:
        raise DataFileError(f"{name}: empty file")
    ln, header = lines[0]
    parts = header.split()
    if (
        len(parts) != 4
        or parts[0] != "BG"
        or not parts[2].startswith("rows=")
        or not parts[3].startswith("cols=")
    ):
        raise DataFileError(f"{name}:{ln}: bad header {header!r}")
    rows, cols = int(parts[2][5:]), int(parts[3][5:])
    if (rows, cols) != BG_DIMS[bg_id]:
        raise DataFileError(
            f"{name}:{ln}: dimensions {rows}x{cols} do not match {bg_id.value}"
        )
    entries = []
    seen = set()
    for ln, line in lines[1:]:
        parts = line.split()
        if len(parts) != 2 + NUM_SHIFT_SETS:
            raise DataFileError(
                f"{name}:{ln}: expected 'r c' plus {NUM_SHIFT_SETS} shifts, got {line!r}"
            )
        try:
            vals = [int(p) for p in parts]
        except ValueError as exc:
            raise DataFileError(f"{name}:{ln}: non-integer field") from exc
        r, c, shifts = vals[0], vals[1], vals[2:]
        if not (0 <= r < rows and 0 <= c < cols):
            raise DataFileError(f"{name}:{ln}: entry ({r},{c}) out of bounds")
        if any(s < 0 for s in shifts):
            raise DataFileError(f"{name}:{ln}: negative shift")
        if (r, c) in seen:
            raise DataFileError(f"{name}:{ln}: duplicate entry ({r},{c})")
        seen.add((r, c))
        entries.append((r, c, tuple(shifts)))
    entries.sort()
    return BaseGraph(
        id=bg_id, rows=rows, cols=cols, info_cols=INFO_COLS[bg_id],
        entries=tuple(entries),
    )


@functools.cache
def load_base_graph(bg_id: BgId) -> BaseGraph:
    name = "bg1.txt" if bg_id == BgId.BG1 else "bg2.txt"
    return parse_base_graph(_read_data_file(name), name, bg_id)


def select_base_graph(k_info: int, code_rate: float) -> BgId:
    """Base-graph selection rule: BG2 for short or low-rate blocks."""
    if k_info <= 0 or not 0 < code_rate < 1:
        raise ConstructionError(
            f"need k_info > 0 and 0 < rate < 1, got ({k_info}, {code_rate})"
        )
    if k_info <= 292 or (k_info <= 3824 and code_rate <= 0.67) or code_rate <= 0.25:
        return BgId.BG2
    return BgId.BG1


def select_lifting_size(k_info: int, bg_id: BgId) -> tuple[int, int, int]:
    """Smallest vendored lifting size Z with info_cols * Z >= k_info.

    Returns (Z, k_lifted, num_filler).
    """
    info_cols = INFO_COLS[bg_id]
    max_k = info_cols * MAX_LIFTING_SIZE
    if k_info > max_k:
        raise ConstructionError(
            f"k_info={k_info} too large for {bg_id.value} (max supported K is {max_k})"
        )
    for z, _ in load_lifting_table():
        if info_cols * z >= k_info:
            return z, info_cols * z, info_cols * z - k_info
    raise ConstructionError(f"no lifting size fits k_info={k_info}")  # pragma: no cover


def make_code_config(k_info: int, n_coded: int) -> CodeConfig:
    """Derive the full code configuration for a (K, E) target."""
    if n_coded <= k_info:
        raise ConstructionError(f"need n_coded > k_info, got ({k_info}, {n_coded})")
    bg_id = select_base_graph(k_info, k_info / n_coded)
    if bg_id == BgId.BG2 and k_info < MIN_BG2_K:
        raise ConstructionError(
            f"k_info={k_info} below supported BG2 minimum {MIN_BG2_K} "
            "(small-K info-column reduction not implemented)"
        )
    z, k_lifted, num_filler = select_lifting_size(k_info, bg_id)
    return CodeConfig(
        k_info=k_info, n_coded=n_coded, bg_id=bg_id, z=z,
        k_lifted=k_lifted, num_filler=num_filler,
    )


def expand(bg: BaseGraph, z: int) -> ParityCheckMatrix:
    """Lift a base graph: each entry (r, c, shift) becomes a Z x Z identity
    cyclically shifted by (shift mod Z), placed at block (r, c)."""
    i_ls = lifting_set_index(z)
    ent_row = np.empty(bg.num_entries, dtype=np.int32)
    ent_col = np.empty(bg.num_entries, dtype=np.int32)
    ent_shift = np.empty(bg.num_entries, dtype=np.int32)
    for k, (r, c, shifts) in enumerate(bg.entries):
        if len(shifts) <= i_ls:
            raise DataFileError(
                f"entry ({r},{c}) is missing a shift for lifting set {i_ls}"
            )
        ent_row[k], ent_col[k], ent_shift[k] = r, c, shifts[i_ls] % z

    # lifted CSR: row r*z+i holds {c*z + (i+s) % z} sorted ascending
    lane = np.arange(z, dtype=np.int32)
    indptr = np.zeros(bg.rows * z + 1, dtype=np.int64)
    chunks = []
    for r in range(bg.rows):
        sel = np.flatnonzero(ent_row == r)
        cols = ent_col[sel]
        shifts = ent_shift[sel]
        block = cols[None, :] * z + (lane[:, None] + shifts[None, :]) % z
        block.sort(axis=1)
        chunks.append(block.reshape(-1))
        indptr[r * z + 1:(r + 1) * z + 1] = indptr[r * z] + np.arange(1, z + 1) * len(sel)
    indices = np.concatenate(chunks).astype(np.int32)
    for arr in (ent_row, ent_col, ent_shift, indptr, indices):
        arr.setflags(write=False)
    return ParityCheckMatrix(
        base_rows=bg.rows, base_cols=bg.cols, info_cols=bg.info_cols, z=z,
        ent_row=ent_row, ent_col=ent_col, ent_shift=ent_shift,
        indptr=indptr, indices=indices,
    )


@dataclass(frozen=True)
class LdpcCode:
    """Convenience bundle: configuration, base graph, and lifted matrix."""

    config: CodeConfig
    base_graph: BaseGraph
    pcm: ParityCheckMatrix

    @classmethod
    def build(cls, k_info: int, n_coded: int) -> "LdpcCode":
        cfg = make_code_config(k_info, n_coded)
        bg = load_base_graph(cfg.bg_id)
        return cls(config=cfg, base_graph=bg, pcm=expand(bg, cfg.z))
