"""Systematic QC-LDPC encoding, rate matching/recovery, and batched
fixed-iteration belief-propagation decoding.

Sign convention: a positive LLR means bit = 0 (LLR = log P(b=0)/P(b=1)).
Known-zero filler bits are therefore injected as +LLR_SAT.  All soft values
are 32-bit floats and every message is clamped to +/-LLR_SAT per iteration.
"""
from __future__ import annotations

import functools
import weakref
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ._mskernel import min_sum_kernel
from .construction import CodeConfig, ParityCheckMatrix
from .errors import ConstructionError, InputError, UnsupportedConfigError

#: Message saturation magnitude (natural-log LLR units).
LLR_SAT = np.float32(30.0)

#: Default scale factor for the normalized min-sum check-node rule.
DEFAULT_NMS_ALPHA = 0.75

# Largest |tanh| fed to arctanh; keeps the sum-product update finite in f32.
_ONE_MINUS = np.nextafter(np.float32(1.0), np.float32(0.0))

# Codewords per internal kernel chunk; bounds working-set memory and keeps
# the hot arrays cache-resident independent of the requested batch size.
KERNEL_CHUNK = 512


class CnRule(str, Enum):
    SUM_PRODUCT = "sum_product"
    NORMALIZED_MIN_SUM = "normalized_min_sum"


@dataclass(frozen=True)
class DecodeParams:
    """Decoder knobs: fixed iteration budget and check-node rule."""

    iterations: int
    cn_rule: CnRule = CnRule.SUM_PRODUCT
    nms_alpha: float = DEFAULT_NMS_ALPHA
    early_stop: bool = False

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise InputError(f"iterations must be >= 1, got {self.iterations}")
        if not 0.0 < self.nms_alpha <= 1.0:
            raise InputError(f"nms_alpha must be in (0, 1], got {self.nms_alpha}")


@dataclass(frozen=True)
class Codeword:
    """Pre-rate-match lifted codeword; fillers included and zero."""

    bits: np.ndarray


@dataclass(frozen=True)
class RateMatchedWord:
    """Length-E transmitted word plus the lifted positions it came from."""

    bits: np.ndarray
    selection: np.ndarray


@dataclass(frozen=True)
class DecodeOutcome:
    """Hard-decision info bits plus per-codeword parity state."""

    info_bits: np.ndarray        # (N, K) uint8
    parity_satisfied: np.ndarray  # (N,) bool
    iterations_run: int


# ---------------------------------------------------------------------------
# encoding
# ---------------------------------------------------------------------------

def _shift_apply(v: np.ndarray, s: int) -> np.ndarray:
    # (shifted identity) @ v : out[i] = v[(i + s) % Z], batch in leading axes
    return np.roll(v, -int(s), axis=-1)


@dataclass(frozen=True)
class _CorePlan:
    """Dual-diagonal encoder structure detected on a base graph."""

    variant: str                 # "pb-row1" (BG1 layout) or "pb-row2" (BG2 layout)
    kb: int
    pa: int
    pb: int
    core_info: tuple[tuple[tuple[int, int], ...], ...]  # per core row: (col, shift)
    ext_rows: tuple[tuple[tuple[int, int], ...], ...]   # per ext row: inputs (col, shift)


def _entry_map(pcm: ParityCheckMatrix) -> dict[tuple[int, int], int]:
    return {
        (int(r), int(c)): int(s)
        for r, c, s in zip(pcm.ent_row, pcm.ent_col, pcm.ent_shift)
    }


def _detect_core(pcm: ParityCheckMatrix) -> _CorePlan | None:
    kb = pcm.info_cols
    if pcm.base_cols - kb != pcm.base_rows or pcm.base_rows < 5:
        return None
    ent = _entry_map(pcm)
    zeros = [(0, kb + 1), (1, kb + 1), (1, kb + 2), (2, kb + 2), (2, kb + 3), (3, kb + 3)]
    if any(ent.get(rc) != 0 for rc in zeros):
        return None
    if (0, kb) not in ent or ent.get((3, kb)) != ent[(0, kb)]:
        return None
    if (1, kb) in ent and (2, kb) not in ent:
        variant, pb = "pb-row1", ent[(1, kb)]
    elif (2, kb) in ent and (1, kb) not in ent:
        variant, pb = "pb-row2", ent[(2, kb)]
    else:
        return None
    core_cols = {
        0: {kb, kb + 1},
        1: {kb + 1, kb + 2} | ({kb} if variant == "pb-row1" else set()),
        2: {kb + 2, kb + 3} | ({kb} if variant == "pb-row2" else set()),
        3: {kb, kb + 3},
    }
    rows: list[list[tuple[int, int]]] = [[] for _ in range(pcm.base_rows)]
    for (r, c), s in ent.items():
        rows[r].append((c, s))
    core_info = []
    for r in range(4):
        parity = {c for c, _ in rows[r] if c >= kb}
        if parity != core_cols[r]:
            return None
        core_info.append(tuple(sorted((c, s) for c, s in rows[r] if c < kb)))
    ext_rows = []
    for r in range(4, pcm.base_rows):
        out_col = kb + r
        cols = {c for c, _ in rows[r]}
        if out_col not in cols or ent[(r, out_col)] != 0:
            return None
        if any(c >= kb + 4 and c != out_col for c in cols):
            return None
        ext_rows.append(tuple(sorted((c, s) for c, s in rows[r] if c != out_col)))
    return _CorePlan(
        variant=variant, kb=kb, pa=ent[(0, kb)], pb=pb,
        core_info=tuple(core_info), ext_rows=tuple(ext_rows),
    )


def _gf2_parity_solver(pcm: ParityCheckMatrix) -> np.ndarray:
    """Dense GF(2) inverse of the parity part of H (generic fallback for
    graphs without the dual-diagonal core; intended for small codes)."""
    k_lift = pcm.info_cols * pcm.z
    n_par = pcm.n_cols - k_lift
    if n_par != pcm.n_rows:
        raise ConstructionError("parity part of H is not square; cannot encode")
    a = np.zeros((pcm.n_rows, n_par), dtype=np.uint8)
    for r in range(pcm.n_rows):
        cols = pcm.row_cols(r)
        par = cols[cols >= k_lift] - k_lift
        a[r, par] = 1
    inv = np.eye(n_par, dtype=np.uint8)
    a = a.copy()
    for col in range(n_par):
        piv = col + np.flatnonzero(a[col:, col])
        if piv.size == 0:
            raise ConstructionError("singular parity core; cannot encode")
        p = piv[0]
        if p != col:
            a[[col, p]] = a[[p, col]]
            inv[[col, p]] = inv[[p, col]]
        elim = np.flatnonzero(a[:, col])
        elim = elim[elim != col]
        a[elim] ^= a[col]
        inv[elim] ^= inv[col]
    return inv


_CORE_PLANS: "weakref.WeakKeyDictionary[ParityCheckMatrix, object]" = weakref.WeakKeyDictionary()


def _plan_for(pcm: ParityCheckMatrix):
    try:
        return _CORE_PLANS[pcm]
    except KeyError:
        plan = _detect_core(pcm)
        if plan is None:
            plan = _gf2_parity_solver(pcm)
        _CORE_PLANS[pcm] = plan
        return plan


def encode_batch(info: np.ndarray, cfg: CodeConfig, pcm: ParityCheckMatrix) -> np.ndarray:
    """Encode a (N, K) bit matrix into (N, cols*Z) lifted codewords."""
    info = np.atleast_2d(np.asarray(info, dtype=np.uint8))
    if info.shape[1] != cfg.k_info:
        raise InputError(f"info length {info.shape[1]} != K_info {cfg.k_info}")
    n = info.shape[0]
    z = pcm.z
    plan = _plan_for(pcm)
    if isinstance(plan, _CorePlan):
        kb = plan.kb
        u = np.zeros((n, kb, z), dtype=np.uint8)
        u.reshape(n, -1)[:, : cfg.k_info] = info
        acc = np.zeros((n, 4, z), dtype=np.uint8)
        for r in range(4):
            for c, s in plan.core_info[r]:
                acc[:, r, :] ^= _shift_apply(u[:, c, :], s)
        ssum = acc[:, 0] ^ acc[:, 1] ^ acc[:, 2] ^ acc[:, 3]
        p0 = np.roll(ssum, plan.pb, axis=-1)  # P_B^{-1} applied
        pa_p0 = _shift_apply(p0, plan.pa)
        p1 = acc[:, 0] ^ pa_p0
        if plan.variant == "pb-row1":
            p2 = acc[:, 1] ^ _shift_apply(p0, plan.pb) ^ p1
        else:
            p2 = acc[:, 1] ^ p1
        p3 = acc[:, 3] ^ pa_p0
        cw = np.zeros((n, pcm.base_cols, z), dtype=np.uint8)
        cw[:, :kb] = u
        cw[:, kb], cw[:, kb + 1], cw[:, kb + 2], cw[:, kb + 3] = p0, p1, p2, p3
        for i, row in enumerate(plan.ext_rows):
            r = 4 + i
            out = cw[:, kb + r]
            for c, s in row:
                out ^= _shift_apply(cw[:, c, :], s)
        return cw.reshape(n, -1)
    # generic GF(2) path
    k_lift = cfg.k_lifted
    u = np.zeros((n, k_lift), dtype=np.uint8)
    u[:, : cfg.k_info] = info
    b = np.zeros((n, pcm.n_rows), dtype=np.uint8)
    for r in range(pcm.n_rows):
        cols = pcm.row_cols(r)
        icols = cols[cols < k_lift]
        if icols.size:
            b[:, r] = np.bitwise_xor.reduce(u[:, icols], axis=1)
    parity = (b @ plan.T) % 2
    return np.concatenate([u, parity.astype(np.uint8)], axis=1)


def encode(info: np.ndarray, cfg: CodeConfig, pcm: ParityCheckMatrix) -> Codeword:
    """Encode one K-bit message; info bits land in the systematic positions,
    fillers are zero, and H @ c^T = 0."""
    info = np.asarray(info, dtype=np.uint8)
    if info.ndim != 1:
        raise InputError("encode expects a 1-D bit vector; use encode_batch for matrices")
    bits = encode_batch(info[None, :], cfg, pcm)[0]
    bits.setflags(write=False)
    return Codeword(bits=bits)


# ---------------------------------------------------------------------------
# rate matching
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=32)
def rate_match_selection(cfg: CodeConfig) -> np.ndarray:
    """Lifted positions transmitted for ``cfg``, in circular-buffer order.

    The buffer starts after the 2Z punctured systematic positions and skips
    filler positions; redundancy version 0 starts at buffer offset 0.  E may
    wrap the buffer at most once (repetition beyond one wrap unsupported).
    """
    n_lift = cfg.n_lifted
    pos = np.arange(2 * cfg.z, n_lift, dtype=np.int32)
    keep = (pos < cfg.k_info) | (pos >= cfg.k_lifted)
    buffer = pos[keep]
    e = cfg.n_coded
    if e <= buffer.size:
        sel = buffer[:e]
    elif e <= 2 * buffer.size:
        sel = np.concatenate([buffer, buffer[: e - buffer.size]])
    else:
        raise UnsupportedConfigError(
            f"E={e} exceeds one full circular-buffer pass plus wrap "
            f"({2 * buffer.size} bits)"
        )
    sel.setflags(write=False)
    return sel


def rate_match(cw: Codeword | np.ndarray, cfg: CodeConfig) -> RateMatchedWord:
    bits = cw.bits if isinstance(cw, Codeword) else np.asarray(cw, dtype=np.uint8)
    if bits.shape[-1] != cfg.n_lifted:
        raise InputError(f"codeword length {bits.shape[-1]} != cols*Z {cfg.n_lifted}")
    sel = rate_match_selection(cfg)
    out = bits[..., sel]
    out.setflags(write=False)
    return RateMatchedWord(bits=out, selection=sel)


def rate_recover(llr_in: np.ndarray, cfg: CodeConfig) -> np.ndarray:
    """Scatter E received LLRs back to the lifted positions.

    Untransmitted (punctured) positions read exactly 0.0; filler positions
    read exactly +LLR_SAT; positions transmitted twice (wrap) accumulate.
    """
    llr = np.asarray(llr_in, dtype=np.float32)
    squeeze = llr.ndim == 1
    llr = np.atleast_2d(llr)
    if llr.shape[1] != cfg.n_coded:
        raise InputError(f"LLR length {llr.shape[1]} != E {cfg.n_coded}")
    sel = rate_match_selection(cfg)
    out = np.zeros((llr.shape[0], cfg.n_lifted), dtype=np.float32)
    nb = min(sel.size, np.unique(sel).size)
    out[:, sel[:nb]] = llr[:, :nb]
    if nb < sel.size:  # wrapped tail: soft-combine repeats
        np.add.at(out, (slice(None), sel[nb:]), llr[:, nb:])
    out[:, cfg.k_info: cfg.k_lifted] = LLR_SAT
    return out[0] if squeeze else out


# ---------------------------------------------------------------------------
# check-node update (reference single-node form)
# ---------------------------------------------------------------------------

def cn_update(
    incoming: np.ndarray,
    rule: CnRule | str = CnRule.SUM_PRODUCT,
    alpha: float = DEFAULT_NMS_ALPHA,
) -> np.ndarray:
    """Leave-one-out check-node update on one check node.

    sum_product: outgoing_j = 2*atanh(prod_{i!=j} tanh(incoming_i / 2)),
    evaluated with prefix/suffix products so exact zeros propagate exactly.
    normalized_min_sum: outgoing_j = alpha * (prod_{i!=j} sign) * min_{i!=j}|.|.
    Inputs are clamped to +/-LLR_SAT first.  Both paths use the identical
    arithmetic (and f32 precision) as the batched kernel.
    """
    rule = CnRule(rule)
    x = np.asarray(incoming, dtype=np.float32)
    if x.ndim != 1 or x.size < 2:
        raise InputError("cn_update needs a 1-D array of degree >= 2")
    x = np.clip(x, -LLR_SAT, LLR_SAT)
    d = x.size
    if rule == CnRule.SUM_PRODUCT:
        t = np.tanh(x * np.float32(0.5))
        pre = np.ones(d, dtype=np.float32)
        suf = np.ones(d, dtype=np.float32)
        for k in range(1, d):
            pre[k] = pre[k - 1] * t[k - 1]
        for k in range(d - 2, -1, -1):
            suf[k] = suf[k + 1] * t[k + 1]
        loo = np.clip(pre * suf, -_ONE_MINUS, _ONE_MINUS)
        return np.clip(np.arctanh(loo) * np.float32(2.0), -LLR_SAT, LLR_SAT)
    mag = np.abs(x)
    sb = np.signbit(x)
    m1 = mag.min()
    eq = mag == m1
    # with a tied minimum the leave-one-out min is m1 everywhere
    m2 = m1 if eq.sum() > 1 else np.min(np.where(eq, np.float32(np.inf), mag))
    out = np.where(eq, m2, m1).astype(np.float32)
    np.multiply(out, np.float32(alpha), out=out)
    par = np.bitwise_xor.reduce(sb)
    np.negative(out, out=out, where=par ^ sb)
    return np.clip(out, -LLR_SAT, LLR_SAT)


# ---------------------------------------------------------------------------
# batched flooding decoder kernel
# ---------------------------------------------------------------------------

class DecodeTables:
    """Static edge tables for the flooding kernel, derived from one
    ParityCheckMatrix.  Messages live in edge-major (Ne, batch) arrays; the
    two permutations map message slots between the check-node layout
    (entries sorted by base row) and the variable-node layout (sorted by
    base column)."""

    def __init__(self, pcm: ParityCheckMatrix):
        z = pcm.z
        order = np.lexsort((pcm.ent_col, pcm.ent_row))  # row-major entry order
        rows = pcm.ent_row[order]
        cols = pcm.ent_col[order]
        shifts = pcm.ent_shift[order]
        nnz = rows.size
        self.pcm = pcm
        self.z = z
        self.nnz = nnz
        self.ne = nnz * z
        self.n_lift = pcm.n_cols
        self.base_rows = pcm.base_rows
        self.base_cols = pcm.base_cols
        self.row_ptr = np.searchsorted(rows, np.arange(pcm.base_rows + 1)).astype(np.int64)
        self.ent_col_cn = np.ascontiguousarray(cols, dtype=np.int32)
        self.ent_shift_cn = np.ascontiguousarray(shifts, dtype=np.int32)
        col_order = np.argsort(cols, kind="stable")
        self.col_ptr = np.searchsorted(cols[col_order], np.arange(pcm.base_cols + 1))
        lane = np.arange(z, dtype=np.int64)
        # cn slot p*Z+i <-> vn slot q*Z+j with j = (i + shift) % Z
        self.cn2vn = np.empty(self.ne, dtype=np.int32)
        self.vn2cn = np.empty(self.ne, dtype=np.int32)
        self.var_of_cn = np.empty(self.ne, dtype=np.int32)
        for q, p in enumerate(col_order):
            s = int(shifts[p])
            j = lane
            i = (j - s) % z
            self.cn2vn[q * z + j] = (p * z + i).astype(np.int32)
            self.vn2cn[p * z + i] = (q * z + j).astype(np.int32)
        for p in range(nnz):
            i = lane
            self.var_of_cn[p * z + i] = (cols[p] * z + (i + shifts[p]) % z).astype(np.int32)
        self.max_row_deg = int(np.max(np.diff(self.row_ptr))) if nnz else 0
        self.vn_col_of_slot = np.repeat(cols[col_order], z).astype(np.int32)


_TABLES: "weakref.WeakKeyDictionary[ParityCheckMatrix, DecodeTables]" = weakref.WeakKeyDictionary()


def decode_tables(pcm: ParityCheckMatrix) -> DecodeTables:
    try:
        return _TABLES[pcm]
    except KeyError:
        t = DecodeTables(pcm)
        _TABLES[pcm] = t
        return t


class Workspace:
    """Preallocated kernel buffers for one (tables, chunk-width) shape."""

    def __init__(self, tables: DecodeTables, batch: int):
        ne, nl, z = tables.ne, tables.n_lift, tables.z
        d = max(tables.max_row_deg, 1)
        self.batch = batch
        f32 = np.float32
        self.state = np.empty((ne, batch), f32)   # messages, CN layout
        self.vbuf = np.empty((ne, batch), f32)    # messages, VN layout
        self.llr_t = np.empty((nl, batch), f32)
        self.tot = np.empty((nl, batch), f32)
        self.tblk = np.empty((z, batch), f32)
        self.pre = np.empty((d, z * batch), f32)
        self.suf = np.empty((d, z * batch), f32)
        self.m1 = np.empty(z * batch, f32)
        self.m2 = np.empty(z * batch, f32)
        self.eq = np.empty((d, z * batch), bool)
        self.sb = np.empty((d, z * batch), bool)
        self.par = np.empty(z * batch, bool)
        self.cnt = np.empty(z * batch, np.int16)


def _cn_pass(tables: DecodeTables, ws: Workspace, params: DecodeParams) -> None:
    """In-place check-node update on ws.state (CN layout)."""
    z, b = tables.z, ws.batch
    state2 = ws.state.reshape(tables.nnz, z * b)
    sum_product = params.cn_rule == CnRule.SUM_PRODUCT
    if sum_product:
        np.multiply(state2, np.float32(0.5), out=state2)
        np.tanh(state2, out=state2)
    alpha = np.float32(params.nms_alpha)
    for r in range(tables.base_rows):
        p0, p1 = tables.row_ptr[r], tables.row_ptr[r + 1]
        d = p1 - p0
        if d == 0:
            continue
        t = state2[p0:p1]
        if sum_product:
            pre, suf = ws.pre[:d], ws.suf[:d]
            pre[0] = 1.0
            for k in range(1, d):
                np.multiply(pre[k - 1], t[k - 1], out=pre[k])
            suf[d - 1] = 1.0
            for k in range(d - 2, -1, -1):
                np.multiply(suf[k + 1], t[k + 1], out=suf[k])
            np.multiply(pre, suf, out=t)
            np.clip(t, -_ONE_MINUS, _ONE_MINUS, out=t)
            np.arctanh(t, out=t)
            np.multiply(t, np.float32(2.0), out=t)
        else:
            mag, sb = ws.pre[:d], ws.sb[:d]
            np.signbit(t, out=sb)
            np.abs(t, out=mag)
            np.min(mag, axis=0, out=ws.m1)
            np.equal(mag, ws.m1[None, :], out=ws.eq[:d])
            np.sum(ws.eq[:d], axis=0, dtype=np.int16, out=ws.cnt)
            masked = ws.suf[:d]
            np.copyto(masked, mag)
            np.copyto(masked, np.float32(np.inf), where=ws.eq[:d])
            np.min(masked, axis=0, out=ws.m2)
            np.copyto(ws.m2, ws.m1, where=ws.cnt > 1)  # ties: min survives loo
            np.copyto(t, np.broadcast_to(ws.m1[None, :], t.shape))
            np.copyto(t, np.broadcast_to(ws.m2[None, :], t.shape), where=ws.eq[:d])
            np.multiply(t, alpha, out=t)
            np.bitwise_xor.reduce(sb, axis=0, out=ws.par)
            np.bitwise_xor(sb, ws.par[None, :], out=sb)
            np.negative(t, out=t, where=sb)
    np.clip(ws.state, -LLR_SAT, LLR_SAT, out=ws.state)


def _vn_pass(tables: DecodeTables, ws: Workspace) -> None:
    """From c2v messages in ws.vbuf (VN layout) and channel LLRs, compute
    totals into ws.tot and extrinsic v2c messages in place into ws.vbuf."""
    z, b = tables.z, ws.batch
    for c in range(tables.base_cols):
        q0, q1 = tables.col_ptr[c], tables.col_ptr[c + 1]
        lo, hi = c * z, (c + 1) * z
        if q0 == q1:
            ws.tot[lo:hi] = ws.llr_t[lo:hi]
            continue
        blk = ws.vbuf[q0 * z: q1 * z].reshape(q1 - q0, z, b)
        np.sum(blk, axis=0, out=ws.tblk)
        np.add(ws.tblk, ws.llr_t[lo:hi], out=ws.tblk)
        ws.tot[lo:hi] = ws.tblk
        np.subtract(ws.tblk[None, :, :], blk, out=blk)
    np.clip(ws.vbuf, -LLR_SAT, LLR_SAT, out=ws.vbuf)


def _syndrome_ok(tables: DecodeTables, bits_t: np.ndarray) -> np.ndarray:
    """Parity check per codeword for (n_lift, B) hard bits."""
    pcm = tables.pcm
    return pcm.check_codewords(np.ascontiguousarray(bits_t.T))


def decode_chunk(
    llr_lifted: np.ndarray,
    tables: DecodeTables,
    params: DecodeParams,
    ws: Workspace | None = None,
) -> tuple[np.ndarray, np.ndarray, int]:
    """Flooding BP on one chunk: (B, n_lift) LLRs in, hard bits out.

    Returns (bits (B, n_lift) uint8, parity_ok (B,) bool, iterations_run).
    One iteration = one check-node pass plus one variable-node pass; with
    early_stop off, exactly params.iterations are executed.

    Two engines back this entry point: the sum-product rule runs on the
    vectorized numpy path (SIMD tanh), the normalized-min-sum rule on a
    compiled per-codeword kernel that releases the GIL and so scales
    across backend lanes.  Either way the per-codeword arithmetic order is
    fixed, so results do not depend on chunking or lane count.
    """
    if params.cn_rule == CnRule.NORMALIZED_MIN_SUM and min_sum_kernel is not None:
        chunk = np.ascontiguousarray(llr_lifted, dtype=np.float32)
        n = chunk.shape[0]
        bits = np.empty((n, tables.n_lift), dtype=np.uint8)
        ok = np.empty(n, dtype=bool)
        iters = int(min_sum_kernel(
            chunk, tables.row_ptr, tables.ent_col_cn, tables.ent_shift_cn,
            tables.z, max(tables.max_row_deg, 1), params.iterations,
            np.float32(params.nms_alpha), params.early_stop, bits, ok,
        ))
        return bits, ok, iters
    b = llr_lifted.shape[0]
    if ws is None or ws.batch != b:
        ws = Workspace(tables, b)
    ws.llr_t[:] = llr_lifted.T
    np.clip(ws.llr_t, -LLR_SAT, LLR_SAT, out=ws.llr_t)
    np.take(ws.llr_t, tables.var_of_cn, axis=0, out=ws.state)  # v2c init
    iters_run = 0
    for _ in range(params.iterations):
        _cn_pass(tables, ws, params)
        np.take(ws.state, tables.cn2vn, axis=0, out=ws.vbuf)
        _vn_pass(tables, ws)
        iters_run += 1
        if params.early_stop:
            bits_t = ws.tot < 0
            if _syndrome_ok(tables, bits_t).all():
                break
        if iters_run < params.iterations:
            np.take(ws.vbuf, tables.vn2cn, axis=0, out=ws.state)
    bits = np.ascontiguousarray((ws.tot < 0).T).astype(np.uint8)
    ok = tables.pcm.check_codewords(bits)
    return bits, ok, iters_run


def decode_batch(
    llrs,
    params: DecodeParams,
    cfg: CodeConfig,
    pcm: ParityCheckMatrix,
    backend=None,
) -> DecodeOutcome:
    """Run fixed-iteration flooding BP over a batch of rate-matched LLRs.

    ``llrs`` is an (N, E) float array or any object with an ``llrs``
    attribute of that shape (e.g. a frozen LlrBatch).  Rate recovery happens
    here; the systematic info bits (fillers excluded) come back hard-decided
    as sign(total LLR) with positive meaning bit 0.  Results are identical
    for every backend and lane count given identical inputs.
    """
    from .backends import get_backend  # late import; backends depend on codec

    arr = np.asarray(getattr(llrs, "llrs", llrs), dtype=np.float32)
    arr = np.atleast_2d(arr)
    if arr.shape[1] != cfg.n_coded:
        raise InputError(f"LLR batch shape {arr.shape} does not match E={cfg.n_coded}")
    if backend is None or isinstance(backend, str):
        backend = get_backend(backend or "ref-st")
    lifted = rate_recover(arr, cfg)
    bits, ok, iters = backend.decode_lifted(lifted, pcm, params)
    info = np.ascontiguousarray(bits[:, : cfg.k_info])
    return DecodeOutcome(info_bits=info, parity_satisfied=ok, iterations_run=iters)
