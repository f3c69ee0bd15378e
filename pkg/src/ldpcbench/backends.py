"""Decode backends: a registration-based interface over the flooding kernel.

Shipped backends:

* ``ref-st``  - single-threaded reference; processes the batch sequentially.
* ``par-cpu`` - partitions the batch across one lane per logical core
  (overridable); lanes share no state, so results are bit-identical to
  ``ref-st`` for any lane count.
"""
from __future__ import annotations

import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .codec import KERNEL_CHUNK, DecodeParams, Workspace, decode_chunk, decode_tables
from .construction import ParityCheckMatrix
from .errors import BackendError


@dataclass(frozen=True)
class BackendCapabilities:
    max_lanes: int


class DecodeBackend:
    """Interface contract: a name, a capability report, and a batch-decode
    entry point over rate-recovered (N, cols*Z) LLRs."""

    name: str = "abstract"

    def capabilities(self) -> BackendCapabilities:
        raise NotImplementedError

    def decode_lifted(
        self, llr_lifted: np.ndarray, pcm: ParityCheckMatrix, params: DecodeParams
    ) -> tuple[np.ndarray, np.ndarray, int]:
        """Returns (hard bits (N, cols*Z) uint8, parity_ok (N,), iterations)."""
        raise NotImplementedError

    def close(self) -> None:
        pass


class ReferenceBackend(DecodeBackend):
    """Single-threaded backend; the ground truth for backend equivalence."""

    name = "ref-st"

    def __init__(self, chunk: int = KERNEL_CHUNK):
        self._chunk = chunk
        self._ws: dict[tuple[int, int], Workspace] = {}

    def capabilities(self) -> BackendCapabilities:
        return BackendCapabilities(max_lanes=1)

    def _workspace(self, tables, batch: int) -> Workspace:
        key = (id(tables), batch)
        ws = self._ws.get(key)
        if ws is None:
            self._ws.clear()  # keep at most one table's buffers alive
            ws = Workspace(tables, batch)
            self._ws[key] = ws
        return ws

    def decode_lifted(self, llr_lifted, pcm, params):
        tables = decode_tables(pcm)
        n = llr_lifted.shape[0]
        bits = np.empty((n, pcm.n_cols), dtype=np.uint8)
        ok = np.empty(n, dtype=bool)
        iters = 0
        for lo in range(0, n, self._chunk):
            hi = min(lo + self._chunk, n)
            ws = self._workspace(tables, hi - lo)
            b, o, it = decode_chunk(llr_lifted[lo:hi], tables, params, ws)
            bits[lo:hi] = b
            ok[lo:hi] = o
            iters = max(iters, it)
        return bits, ok, iters


class ParallelCpuBackend(DecodeBackend):
    """Data-parallel CPU backend: contiguous batch slices per lane, one
    thread per lane, no cross-codeword communication."""

    name = "par-cpu"

    def __init__(self, lanes: int | None = None, chunk: int = KERNEL_CHUNK):
        self._lanes = lanes or os.cpu_count() or 1
        if self._lanes < 1:
            raise BackendError("par-cpu needs at least one lane")
        self._chunk = chunk
        self._pool: ThreadPoolExecutor | None = None
        self._ws: dict[tuple[int, int, int], Workspace] = {}
        self._lock = threading.Lock()

    def capabilities(self) -> BackendCapabilities:
        return BackendCapabilities(max_lanes=self._lanes)

    def _executor(self) -> ThreadPoolExecutor:
        if self._pool is None:
            self._pool = ThreadPoolExecutor(
                max_workers=self._lanes, thread_name_prefix="par-cpu"
            )
        return self._pool

    def _workspace(self, lane: int, tables, batch: int) -> Workspace:
        key = (lane, id(tables), batch)
        ws = self._ws.get(key)
        if ws is None:
            with self._lock:
                stale = [k for k in self._ws if k[0] == lane and k[1] != id(tables)]
                for k in stale:
                    del self._ws[k]
            ws = Workspace(tables, batch)
            self._ws[key] = ws
        return ws

    def decode_lifted(self, llr_lifted, pcm, params):
        tables = decode_tables(pcm)
        n = llr_lifted.shape[0]
        bits = np.empty((n, pcm.n_cols), dtype=np.uint8)
        ok = np.empty(n, dtype=bool)
        lanes = min(self._lanes, n)
        bounds = np.linspace(0, n, lanes + 1, dtype=int)

        def run_lane(lane: int) -> int:
            it_max = 0
            for lo in range(bounds[lane], bounds[lane + 1], self._chunk):
                hi = min(lo + self._chunk, bounds[lane + 1])
                ws = self._workspace(lane, tables, hi - lo)
                b, o, it = decode_chunk(llr_lifted[lo:hi], tables, params, ws)
                bits[lo:hi] = b
                ok[lo:hi] = o
                it_max = max(it_max, it)
            return it_max

        futures = [self._executor().submit(run_lane, lane) for lane in range(lanes)]
        try:
            iters = max(f.result() for f in futures)
        except Exception as exc:
            raise BackendError(f"backend '{self.name}' failed: {exc}") from exc
        return bits, ok, iters

    def close(self) -> None:
        if self._pool is not None:
            self._pool.shutdown(wait=True)
            self._pool = None


_REGISTRY: dict[str, type[DecodeBackend]] = {}


def register_backend(cls: type[DecodeBackend]) -> type[DecodeBackend]:
    _REGISTRY[cls.name] = cls
    return cls


register_backend(ReferenceBackend)
register_backend(ParallelCpuBackend)


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_REGISTRY))


def get_backend(name: str, **options) -> DecodeBackend:
    """Instantiate a registered backend by name."""
    try:
        cls = _REGISTRY[name]
    except KeyError:
        raise BackendError(
            f"unknown backend '{name}' (available: {', '.join(available_backends())})"
        ) from None
    return cls(**options)
