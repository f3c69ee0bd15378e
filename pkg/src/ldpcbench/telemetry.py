"""Process CPU and optional accelerator telemetry, sampled concurrently
with timed trials.

CPU usage is computed from process CPU-time deltas over wall-time deltas
(x100, so 100% = one core busy) and converted to active-core equivalents
as cpu_util_pct / 100.  Accelerator telemetry comes from a pluggable
external command expected to print ``util_pct,power_w`` per invocation.
"""
from __future__ import annotations

import csv
import queue
import shlex
import subprocess
import threading
import time
from dataclasses import dataclass
from datetime import datetime, timezone

import psutil

from .errors import ConfigError

GPU_ACTIVE_PCT = 5.0
GPU_HIGH_PCT = 80.0

TELEMETRY_COLUMNS = (
    "timestamp_utc", "mono_ns", "cpu_util_pct", "active_cores",
    "gpu_util_pct", "gpu_power_w", "backend", "n_cw", "iters", "trial",
)


@dataclass(frozen=True)
class TelemetrySample:
    timestamp_utc: str
    mono_ns: int
    cpu_util_pct: float
    active_cores: float
    gpu_util_pct: float | None = None
    gpu_power_w: float | None = None
    backend: str | None = None
    n_cw: int | None = None
    iters: int | None = None
    trial: int | None = None


@dataclass(frozen=True)
class TelemetrySummary:
    count: int
    mean_active_cores: float | None = None
    max_active_cores: float | None = None
    gpu_active_count: int | None = None
    gpu_high_count: int | None = None
    mean_gpu_power_active_w: float | None = None
    mean_gpu_power_high_w: float | None = None


def summarize(samples) -> TelemetrySummary:
    """Aggregate one trial window of samples.

    The active set holds samples with gpu_util > 5%; the high-occupancy set
    (> 80%) is a subset of it.  GPU aggregates stay absent when no sample
    carried GPU fields.
    """
    samples = list(samples)
    if not samples:
        return TelemetrySummary(count=0)
    cores = [s.active_cores for s in samples]
    gpu = [s for s in samples if s.gpu_util_pct is not None]
    active = [s for s in gpu if s.gpu_util_pct > GPU_ACTIVE_PCT]
    high = [s for s in active if s.gpu_util_pct > GPU_HIGH_PCT]

    def power_mean(subset):
        vals = [s.gpu_power_w for s in subset if s.gpu_power_w is not None]
        return sum(vals) / len(vals) if vals else None

    return TelemetrySummary(
        count=len(samples),
        mean_active_cores=sum(cores) / len(cores),
        max_active_cores=max(cores),
        gpu_active_count=len(active) if gpu else None,
        gpu_high_count=len(high) if gpu else None,
        mean_gpu_power_active_w=power_mean(active),
        mean_gpu_power_high_w=power_mean(high),
    )


def samples_in_window(samples, start_ns: int, end_ns: int):
    """Window assignment by monotonic-clock interval containment."""
    return [s for s in samples if start_ns <= s.mono_ns <= end_ns]


class GpuCommandAdapter:
    """Runs a configured command line and parses 'util_pct,power_w'."""

    def __init__(self, command: str, timeout_s: float = 2.0):
        self.argv = shlex.split(command)
        self.timeout_s = timeout_s

    def read(self) -> tuple[float, float] | None:
        try:
            out = subprocess.run(
                self.argv, capture_output=True, text=True,
                timeout=self.timeout_s, check=True,
            ).stdout
            line = out.strip().splitlines()[0]
            util_s, power_s = line.replace(" ", "").split(",")[:2]
            return float(util_s), float(power_s)
        except Exception:
            return None


class TelemetrySampler:
    """Background sampling loop with a bounded handoff queue.

    The loop never blocks the timed region: when the queue is full, samples
    are dropped and counted.  Each sample is tagged with the trial context
    current at sampling time.
    """

    def __init__(
        self,
        period_s: float = 1.0,
        gpu_cmd: str | None = None,
        queue_size: int = 8192,
    ):
        if period_s <= 0:
            raise ConfigError(f"sampling period must be positive, got {period_s}")
        self.period_s = period_s
        self.adapter = GpuCommandAdapter(gpu_cmd) if gpu_cmd else None
        self._queue: "queue.Queue[TelemetrySample]" = queue.Queue(maxsize=queue_size)
        self.dropped = 0
        self._context: tuple = (None, None, None, None)
        self._ctx_lock = threading.Lock()
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None
        self._proc = psutil.Process()

    def set_context(self, backend=None, n_cw=None, iters=None, trial=None) -> None:
        with self._ctx_lock:
            self._context = (backend, n_cw, iters, trial)

    def clear_context(self) -> None:
        self.set_context()

    def _sample_once(self, prev_cpu: float, prev_wall: float) -> tuple[TelemetrySample, float, float]:
        wall = time.monotonic()
        ct = self._proc.cpu_times()
        cpu = ct.user + ct.system
        dt = wall - prev_wall
        pct = 100.0 * (cpu - prev_cpu) / dt if dt > 0 else 0.0
        gpu_util = gpu_power = None
        if self.adapter is not None:
            reading = self.adapter.read()
            if reading is not None:
                gpu_util, gpu_power = reading
        with self._ctx_lock:
            backend, n_cw, iters, trial = self._context
        sample = TelemetrySample(
            timestamp_utc=datetime.now(timezone.utc).isoformat(),
            mono_ns=time.monotonic_ns(),
            cpu_util_pct=pct,
            active_cores=pct / 100.0,
            gpu_util_pct=gpu_util,
            gpu_power_w=gpu_power,
            backend=backend, n_cw=n_cw, iters=iters, trial=trial,
        )
        return sample, cpu, wall

    def _run(self) -> None:
        ct = self._proc.cpu_times()
        prev_cpu, prev_wall = ct.user + ct.system, time.monotonic()
        next_tick = prev_wall + self.period_s
        while not self._stop.is_set():
            delay = next_tick - time.monotonic()
            if delay > 0 and self._stop.wait(delay):
                break
            next_tick += self.period_s
            sample, prev_cpu, prev_wall = self._sample_once(prev_cpu, prev_wall)
            try:
                self._queue.put_nowait(sample)
            except queue.Full:
                self.dropped += 1

    def start(self) -> None:
        if self._thread is not None:
            return
        self._stop.clear()
        self._thread = threading.Thread(target=self._run, name="telemetry", daemon=True)
        self._thread.start()

    def stop(self) -> None:
        if self._thread is None:
            return
        self._stop.set()
        self._thread.join()
        self._thread = None

    def drain(self) -> list[TelemetrySample]:
        out = []
        while True:
            try:
                out.append(self._queue.get_nowait())
            except queue.Empty:
                return out


def write_telemetry_csv(path, samples, append: bool = False) -> None:
    mode = "a" if append else "w"
    with open(path, mode, newline="") as f:
        w = csv.writer(f)
        if f.tell() == 0:
            w.writerow(TELEMETRY_COLUMNS)
        for s in samples:
            w.writerow([
                s.timestamp_utc, s.mono_ns,
                f"{s.cpu_util_pct:.9g}", f"{s.active_cores:.9g}",
                "" if s.gpu_util_pct is None else f"{s.gpu_util_pct:.9g}",
                "" if s.gpu_power_w is None else f"{s.gpu_power_w:.9g}",
                s.backend or "", "" if s.n_cw is None else s.n_cw,
                "" if s.iters is None else s.iters,
                "" if s.trial is None else s.trial,
            ])


def read_telemetry_csv(path) -> list[TelemetrySample]:
    samples = []
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None:
            return []
        missing = set(TELEMETRY_COLUMNS) - set(reader.fieldnames)
        if missing:
            raise ConfigError(
                f"telemetry file {path} missing columns: {', '.join(sorted(missing))}"
            )
        for row in reader:
            samples.append(TelemetrySample(
                timestamp_utc=row["timestamp_utc"],
                mono_ns=int(row["mono_ns"]),
                cpu_util_pct=float(row["cpu_util_pct"]),
                active_cores=float(row["active_cores"]),
                gpu_util_pct=float(row["gpu_util_pct"]) if row["gpu_util_pct"] else None,
                gpu_power_w=float(row["gpu_power_w"]) if row["gpu_power_w"] else None,
                backend=row["backend"] or None,
                n_cw=int(row["n_cw"]) if row["n_cw"] else None,
                iters=int(row["iters"]) if row["iters"] else None,
                trial=int(row["trial"]) if row["trial"] else None,
            ))
    return samples
