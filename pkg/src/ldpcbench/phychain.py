"""Deterministic generation of frozen decoder-input LLR tensors.

Chain: random info bits -> systematic encode -> rate match -> 16-QAM ->
AWGN -> soft demap.  Every random draw comes from a counter-based keyed
PRNG (Philox) keyed by (seed, stream, codeword index), so generation is
order-independent and reproducible for any parallelization of the batch.
"""
from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass

import numpy as np

from . import codec
from .construction import CodeConfig, ParityCheckMatrix
from .errors import InputError

_STREAM_BITS = 1
_STREAM_NOISE = 2

_INV_SQRT10 = np.float32(1.0 / np.sqrt(10.0))

#: All 16 symbols indexed by the 4-bit pattern (b0 b1 b2 b3), b0 = MSB.
BIT_PATTERNS = np.array(
    [[(i >> 3) & 1, (i >> 2) & 1, (i >> 1) & 1, i & 1] for i in range(16)],
    dtype=np.uint8,
)


@dataclass(frozen=True)
class ChannelConfig:
    """AWGN channel operating point; Es is normalized to 1."""

    es_over_n0_db: float = 10.0
    seed: int = 0
    noiseless: bool = False

    @property
    def n0(self) -> float:
        return float(10.0 ** (-self.es_over_n0_db / 10.0))


@dataclass(frozen=True)
class SymbolBlock:
    """One codeword's modulated and received symbols."""

    symbols: np.ndarray
    received: np.ndarray


@dataclass(frozen=True, eq=False)
class LlrBatch:
    """Frozen decoder-input tensor plus the ground truth it encodes."""

    llrs: np.ndarray        # (N_cw, E) float32, read-only
    truth_info: np.ndarray  # (N_cw, K) uint8, read-only
    fingerprint: str        # sha256 over config header + tensor contents
    header: dict

    @property
    def n_cw(self) -> int:
        return self.llrs.shape[0]

    def verify(self) -> bool:
        """Recompute the content hash; True when the tensor is untouched."""
        return _fingerprint(self.header, self.llrs, self.truth_info) == self.fingerprint


def map_16qam(bits: np.ndarray) -> np.ndarray:
    """Gray-mapped 16-QAM with unit average symbol energy.

    Per 4-bit group (b0, b1, b2, b3):
    symbol = (1/sqrt(10)) * [(1-2*b0)*(2-(1-2*b2)) + 1j*(1-2*b1)*(2-(1-2*b3))].
    """
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.shape[-1] % 4 != 0:
        raise InputError(f"bit count {bits.shape[-1]} not divisible by 4")
    b = bits.reshape(bits.shape[:-1] + (-1, 4)).astype(np.float32)
    re = (1 - 2 * b[..., 0]) * (2 - (1 - 2 * b[..., 2]))
    im = (1 - 2 * b[..., 1]) * (2 - (1 - 2 * b[..., 3]))
    return ((re + 1j * im) * _INV_SQRT10).astype(np.complex64)


CONSTELLATION = map_16qam(BIT_PATTERNS.reshape(1, 64)).reshape(16)
CONSTELLATION.setflags(write=False)


def _noise_rng(seed: int, stream: int, index: int) -> np.random.Generator:
    key = np.array([np.uint64(seed), np.uint64((stream << 48) | index)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def awgn(symbols: np.ndarray, chan: ChannelConfig, codeword_index: int = 0) -> np.ndarray:
    """Add circularly-symmetric complex Gaussian noise (variance N0/2 per
    component) from the keyed counter-based PRNG; exact passthrough when
    the channel is flagged noiseless."""
    symbols = np.asarray(symbols, dtype=np.complex64)
    if chan.noiseless:
        return symbols.copy()
    rng = _noise_rng(chan.seed, _STREAM_NOISE, codeword_index)
    scale = np.float32(np.sqrt(chan.n0 / 2.0))
    w = rng.standard_normal(2 * symbols.size, dtype=np.float32) * scale
    noise = w[0::2] + 1j * w[1::2]
    return (symbols + noise.reshape(symbols.shape)).astype(np.complex64)


def demap_16qam(received: np.ndarray, n0: float, method: str = "maxlog") -> np.ndarray:
    """Soft demap to 4 LLRs per symbol; positive LLR means bit 0.

    maxlog: LLR_i = (min_{s: b_i=1} |y-s|^2 - min_{s: b_i=0} |y-s|^2) / N0.
    exact:  log-MAP over the 16 hypotheses via logsumexp.
    """
    if n0 <= 0:
        raise InputError(f"N0 must be positive, got {n0}")
    y = np.asarray(received, dtype=np.complex64)
    d = np.abs(y[..., None] - CONSTELLATION) ** 2 / np.float32(n0)
    llr = np.empty(y.shape + (4,), dtype=np.float32)
    if method == "maxlog":
        for b in range(4):
            m1 = np.min(d[..., BIT_PATTERNS[:, b] == 1], axis=-1)
            m0 = np.min(d[..., BIT_PATTERNS[:, b] == 0], axis=-1)
            llr[..., b] = m1 - m0
    elif method == "exact":
        for b in range(4):
            s1 = _logsumexp(-d[..., BIT_PATTERNS[:, b] == 1])
            s0 = _logsumexp(-d[..., BIT_PATTERNS[:, b] == 0])
            llr[..., b] = s0 - s1
    else:
        raise InputError(f"unknown demapper '{method}' (use 'maxlog' or 'exact')")
    return llr.reshape(y.shape[:-1] + (y.shape[-1] * 4,)) if y.ndim else llr.reshape(4)


def _logsumexp(a: np.ndarray) -> np.ndarray:
    m = np.max(a, axis=-1)
    return m + np.log(np.sum(np.exp(a - m[..., None]), axis=-1))


def transmit(
    bits_tx: np.ndarray, chan: ChannelConfig, codeword_index: int = 0
) -> SymbolBlock:
    """Map one codeword's rate-matched bits and push them through the channel."""
    x = map_16qam(bits_tx)
    y = awgn(x, chan, codeword_index)
    return SymbolBlock(symbols=x, received=y)


def _fingerprint(header: dict, llrs: np.ndarray, truth: np.ndarray) -> str:
    h = hashlib.sha256()
    h.update(json.dumps(header, sort_keys=True).encode())
    h.update(np.ascontiguousarray(llrs).tobytes())
    h.update(np.ascontiguousarray(truth).tobytes())
    return h.hexdigest()


def build_llr_batch(
    n_cw: int,
    cfg: CodeConfig,
    pcm: ParityCheckMatrix,
    chan: ChannelConfig,
    demapper: str = "maxlog",
) -> LlrBatch:
    """Generate and freeze the decoder-input tensor for one batch size."""
    if n_cw < 1:
        raise InputError(f"n_cw must be >= 1, got {n_cw}")
    if cfg.n_coded % 4 != 0:
        raise InputError(f"E={cfg.n_coded} not divisible by 4 (16-QAM)")
    info = np.empty((n_cw, cfg.k_info), dtype=np.uint8)
    for i in range(n_cw):
        rng = _noise_rng(chan.seed, _STREAM_BITS, i)
        info[i] = rng.integers(0, 2, size=cfg.k_info, dtype=np.uint8)
    cw = codec.encode_batch(info, cfg, pcm)
    tx = cw[:, codec.rate_match_selection(cfg)]
    llrs = np.empty((n_cw, cfg.n_coded), dtype=np.float32)
    scale = np.float32(np.sqrt(chan.n0 / 2.0))
    step = 2048  # bounds the 16-hypothesis distance tensor
    for lo in range(0, n_cw, step):
        hi = min(lo + step, n_cw)
        x = map_16qam(tx[lo:hi])
        if chan.noiseless:
            y = x
        else:
            y = np.empty_like(x)
            nsym = x.shape[1]
            for i in range(lo, hi):
                rng = _noise_rng(chan.seed, _STREAM_NOISE, i)
                w = rng.standard_normal(2 * nsym, dtype=np.float32) * scale
                y[i - lo] = x[i - lo] + (w[0::2] + 1j * w[1::2])
        llrs[lo:hi] = demap_16qam(y, chan.n0, demapper)
    header = {
        "code": cfg.describe(),
        "es_over_n0_db": chan.es_over_n0_db,
        "seed": chan.seed,
        "noiseless": chan.noiseless,
        "demapper": demapper,
        "n_cw": n_cw,
    }
    llrs.setflags(write=False)
    info.setflags(write=False)
    return LlrBatch(
        llrs=llrs, truth_info=info,
        fingerprint=_fingerprint(header, llrs, info), header=header,
    )


# ---------------------------------------------------------------------------
# binary persistence: magic 'LLRB', little-endian header, f32 tensor,
# truth bits packed 8 per byte (row-major)
# ---------------------------------------------------------------------------

_MAGIC = b"LLRB"
_VERSION = 1


def save_llr_batch(batch: LlrBatch, path) -> None:
    n_cw, e = batch.llrs.shape
    k = batch.truth_info.shape[1]
    digest = bytes.fromhex(batch.fingerprint)
    header_json = json.dumps(batch.header, sort_keys=True).encode()
    with open(path, "wb") as f:
        f.write(_MAGIC)
        f.write(struct.pack("<H", _VERSION))
        f.write(digest)
        f.write(struct.pack("<III", n_cw, e, k))
        f.write(struct.pack("<I", len(header_json)))
        f.write(header_json)
        f.write(batch.llrs.astype("<f4").tobytes())
        f.write(np.packbits(batch.truth_info.reshape(-1)).tobytes())


def load_llr_batch(path) -> LlrBatch:
    with open(path, "rb") as f:
        if f.read(4) != _MAGIC:
            raise InputError(f"{path}: not an LLRB file")
        (version,) = struct.unpack("<H", f.read(2))
        if version != _VERSION:
            raise InputError(f"{path}: unsupported LLRB version {version}")
        digest = f.read(32)
        n_cw, e, k = struct.unpack("<III", f.read(12))
        (hlen,) = struct.unpack("<I", f.read(4))
        header = json.loads(f.read(hlen).decode())
        llrs = np.frombuffer(f.read(n_cw * e * 4), dtype="<f4").reshape(n_cw, e)
        nbits = n_cw * k
        packed = np.frombuffer(f.read((nbits + 7) // 8), dtype=np.uint8)
        truth = np.unpackbits(packed, count=nbits).reshape(n_cw, k)
    llrs = llrs.copy()
    truth = truth.copy()
    llrs.setflags(write=False)
    truth.setflags(write=False)
    batch = LlrBatch(
        llrs=llrs, truth_info=truth, fingerprint=digest.hex(), header=header
    )
    if not batch.verify():
        raise InputError(f"{path}: content hash mismatch (corrupt or modified)")
    return batch
