"""Measurement protocol: sweep plans, warm-up + timed inner repetitions,
outer trials, and metric derivation.

Per configuration (backend, N_cw, I): one untimed warm-up decode, then M
timed decodes summarized as one trial (t_dec = mean of the M samples),
repeated for R trials.  Derived metrics: throughput T_thr = N_cw*K/t_dec
and amortized per-codeword service time t_cb = t_dec/N_cw.  The harness
driver is single-threaded; no two timed regions ever overlap.
"""
from __future__ import annotations

import csv
import json
import os
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import codec, phychain
from .backends import DecodeBackend, get_backend
from .construction import CodeConfig, LdpcCode, ParityCheckMatrix
from .errors import ConfigError
from .telemetry import TelemetrySampler, TelemetrySummary, summarize, samples_in_window

BASELINE_BATCHES = tuple(2 ** i for i in range(11))          # 1 .. 1024
DENSE_BATCHES = tuple(2048 * j for j in range(1, 11))        # 2048 .. 20480
ITERATION_LADDER = tuple(range(4, 23, 2))                    # 4, 6, ..., 22
DENSE_THRESHOLD = 2048

DEFAULT_INNER_REPS = 10   # M
DEFAULT_TRIALS = 10       # R

RESULT_COLUMNS = (
    "backend", "n_cw", "iters", "trial", "t_dec_ms", "t_cb_ms", "thr_bps",
    "regime", "llr_hash", "cn_rule", "esn0_db", "timestamp_utc",
)


def regime_of(n_cw: int) -> str:
    return "dense" if n_cw >= DENSE_THRESHOLD else "baseline"


@dataclass(frozen=True)
class SweepPlan:
    batch_sizes: tuple[int, ...]
    iteration_budgets: tuple[int, ...]
    regimes: tuple[str, ...]
    inner_reps: int = DEFAULT_INNER_REPS
    trial_count: int = DEFAULT_TRIALS
    backends: tuple[str, ...] = ("ref-st", "par-cpu")

    def configurations(self) -> list[tuple[int, int]]:
        """All (N_cw, I) pairs, batch-size major."""
        return [(n, i) for n in self.batch_sizes for i in self.iteration_budgets]

    @property
    def configs_per_backend(self) -> int:
        return len(self.batch_sizes) * len(self.iteration_budgets)


def _validated(values, what: str) -> tuple[int, ...]:
    vals = sorted(set(int(v) for v in values))
    if not vals:
        raise ConfigError(f"{what} list is empty")
    if vals[0] < 1:
        raise ConfigError(f"{what} values must be positive, got {vals[0]}")
    return tuple(vals)


def build_sweep(
    preset: str = "full",
    batches=None,
    iters=None,
    inner_reps: int | None = None,
    trials: int | None = None,
    backends=None,
) -> SweepPlan:
    """Assemble a sweep plan from a named preset plus overrides.

    Presets: 'baseline' (N_cw = 1..1024 in powers of two), 'dense'
    (2048..20480 step 2048), 'full' (both; 21 x 10 = 210 configurations
    per backend), 'custom' (batch list required).
    """
    if preset == "baseline":
        sizes = BASELINE_BATCHES
    elif preset == "dense":
        sizes = DENSE_BATCHES
    elif preset == "full":
        sizes = BASELINE_BATCHES + DENSE_BATCHES
    elif preset == "custom":
        if not batches:
            raise ConfigError("custom preset needs an explicit batch list")
        sizes = ()
    else:
        raise ConfigError(f"unknown preset '{preset}'")
    if batches is not None:
        sizes = _validated(batches, "batch-size")
    budgets = ITERATION_LADDER if iters is None else _validated(iters, "iteration")
    m = DEFAULT_INNER_REPS if inner_reps is None else int(inner_reps)
    r = DEFAULT_TRIALS if trials is None else int(trials)
    if m < 1 or r < 1:
        raise ConfigError(f"inner_reps and trials must be >= 1, got M={m}, R={r}")
    names = ("ref-st", "par-cpu") if backends is None else tuple(backends)
    if not names:
        raise ConfigError("backend list is empty")
    return SweepPlan(
        batch_sizes=tuple(sizes),
        iteration_budgets=budgets,
        regimes=tuple(regime_of(n) for n in sizes),
        inner_reps=m, trial_count=r, backends=names,
    )


@dataclass(frozen=True)
class BenchRecord:
    """One (backend, N_cw, I, trial) measurement."""

    backend: str
    n_cw: int
    iters: int
    trial: int
    inner_ms: tuple[float, ...]
    t_dec_ms: float
    t_cb_ms: float
    thr_bps: float
    median_t_dec_ms: float
    regime: str
    llr_hash: str
    cn_rule: str
    esn0_db: float
    timestamp_utc: str
    telemetry: TelemetrySummary | None = None

    @classmethod
    def from_samples(
        cls, backend: str, n_cw: int, iters: int, trial: int,
        inner_ms, k_info: int, llr_hash: str, cn_rule: str, esn0_db: float,
        telemetry: TelemetrySummary | None = None,
    ) -> "BenchRecord":
        inner = tuple(float(v) for v in inner_ms)
        t_dec = float(np.mean(inner))
        return cls(
            backend=backend, n_cw=n_cw, iters=iters, trial=trial,
            inner_ms=inner,
            t_dec_ms=t_dec,
            t_cb_ms=t_dec / n_cw,
            thr_bps=throughput_bps(n_cw, k_info, t_dec),
            median_t_dec_ms=float(np.median(inner)),
            regime=regime_of(n_cw),
            llr_hash=llr_hash, cn_rule=cn_rule, esn0_db=esn0_db,
            timestamp_utc=datetime.now(timezone.utc).isoformat(),
            telemetry=telemetry,
        )


def throughput_bps(n_cw: int, k_info: int, t_dec_ms: float) -> float:
    """Information throughput N_cw * K / t_dec in bits per second."""
    return n_cw * k_info / (t_dec_ms / 1000.0)


def run_trial(
    backend: DecodeBackend,
    batch: phychain.LlrBatch,
    cfg: CodeConfig,
    pcm: ParityCheckMatrix,
    params: codec.DecodeParams,
    inner_reps: int = DEFAULT_INNER_REPS,
    trial: int = 0,
    sampler: TelemetrySampler | None = None,
    esn0_db: float | None = None,
) -> BenchRecord:
    """One outer trial: 1 untimed warm-up decode, then M timed decodes.

    The timed region covers exactly decode_batch (rate recovery, all BP
    iterations, hard decision, backend synchronization) on a monotonic
    nanosecond clock.  The warm-up never contributes a sample.
    """
    if sampler is not None:
        sampler.set_context(backend.name, batch.n_cw, params.iterations, trial)
    try:
        codec.decode_batch(batch, params, cfg, pcm, backend)  # warm-up
        inner_ms = []
        for _ in range(inner_reps):
            t0 = time.perf_counter_ns()
            codec.decode_batch(batch, params, cfg, pcm, backend)
            t1 = time.perf_counter_ns()
            inner_ms.append((t1 - t0) / 1e6)
    finally:
        if sampler is not None:
            sampler.clear_context()
    return BenchRecord.from_samples(
        backend=backend.name, n_cw=batch.n_cw, iters=params.iterations,
        trial=trial, inner_ms=inner_ms, k_info=cfg.k_info,
        llr_hash=batch.fingerprint, cn_rule=params.cn_rule.value,
        esn0_db=batch.header["es_over_n0_db"] if esn0_db is None else esn0_db,
    )


def record_row(rec: BenchRecord) -> list:
    return [
        rec.backend, rec.n_cw, rec.iters, rec.trial,
        f"{rec.t_dec_ms:.9g}", f"{rec.t_cb_ms:.9g}", f"{rec.thr_bps:.9g}",
        rec.regime, rec.llr_hash, rec.cn_rule, f"{rec.esn0_db:.9g}",
        rec.timestamp_utc,
    ]


def read_results_csv(path) -> list[dict]:
    rows = []
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        for row in reader:
            rows.append({
                "backend": row["backend"],
                "n_cw": int(row["n_cw"]),
                "iters": int(row["iters"]),
                "trial": int(row["trial"]),
                "t_dec_ms": float(row["t_dec_ms"]),
                "t_cb_ms": float(row["t_cb_ms"]),
                "thr_bps": float(row["thr_bps"]),
                "regime": row["regime"],
                "llr_hash": row["llr_hash"],
                "cn_rule": row["cn_rule"],
                "esn0_db": float(row["esn0_db"]),
                "timestamp_utc": row["timestamp_utc"],
            })
    return rows


@dataclass
class CampaignResult:
    records: list[BenchRecord] = field(default_factory=list)
    failures: list[tuple] = field(default_factory=list)
    skipped: int = 0
    results_path: Path | None = None
    telemetry_path: Path | None = None


def run_campaign(
    plan: SweepPlan,
    code: LdpcCode,
    chan: phychain.ChannelConfig,
    out_dir,
    params_base: codec.DecodeParams | None = None,
    telemetry_on: bool = True,
    telemetry_period_s: float = 1.0,
    gpu_cmd: str | None = None,
    resume: bool = False,
    backend_options: dict | None = None,
) -> CampaignResult:
    """Execute the full sweep: backends x configurations x trials.

    One LlrBatch is generated per batch size and reused across iteration
    budgets, trials, and backends.  Records stream to results.csv as they
    complete (append + flush), so a crash preserves finished work; with
    ``resume`` the completed (backend, n_cw, iters, trial) tuples found in
    an existing results file are skipped.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    results_path = out / "results.csv"
    telemetry_path = out / "telemetry.csv"
    manifest_path = out / "campaign_manifest.json"
    cfg, pcm = code.config, code.pcm
    base = params_base or codec.DecodeParams(iterations=ITERATION_LADDER[0])

    done: set[tuple] = set()
    if resume and results_path.exists():
        for row in read_results_csv(results_path):
            done.add((row["backend"], row["n_cw"], row["iters"], row["trial"]))
    elif results_path.exists() and not resume:
        raise ConfigError(
            f"{results_path} already exists; pass resume=True (--resume) "
            "or choose a fresh output directory"
        )

    manifest = {
        "plan": {
            "batch_sizes": list(plan.batch_sizes),
            "iteration_budgets": list(plan.iteration_budgets),
            "inner_reps": plan.inner_reps,
            "trial_count": plan.trial_count,
            "backends": list(plan.backends),
        },
        "code": cfg.describe(),
        "channel": {
            "es_over_n0_db": chan.es_over_n0_db,
            "seed": chan.seed,
            "noiseless": chan.noiseless,
        },
        "cn_rule": base.cn_rule.value,
        "telemetry": telemetry_on,
        "started_utc": datetime.now(timezone.utc).isoformat(),
        "status": "running",
    }
    manifest_path.write_text(json.dumps(manifest, indent=2))

    sampler = None
    if telemetry_on:
        sampler = TelemetrySampler(period_s=telemetry_period_s, gpu_cmd=gpu_cmd)
        sampler.start()

    backend_options = backend_options or {}
    result = CampaignResult(results_path=results_path, telemetry_path=telemetry_path)
    new_file = not results_path.exists()
    rf = open(results_path, "a", newline="")
    writer = csv.writer(rf)
    if new_file:
        writer.writerow(RESULT_COLUMNS)
        rf.flush()
    try:
        backends = {
            name: get_backend(name, **backend_options.get(name, {}))
            for name in plan.backends
        }
        for n_cw in plan.batch_sizes:
            batch = phychain.build_llr_batch(n_cw, cfg, pcm, chan)
            for name in plan.backends:
                backend = backends[name]
                for iters in plan.iteration_budgets:
                    params = codec.DecodeParams(
                        iterations=iters, cn_rule=base.cn_rule,
                        nms_alpha=base.nms_alpha, early_stop=base.early_stop,
                    )
                    for trial in range(plan.trial_count):
                        key = (name, n_cw, iters, trial)
                        if key in done:
                            result.skipped += 1
                            continue
                        try:
                            rec = run_trial(
                                backend, batch, cfg, pcm, params,
                                inner_reps=plan.inner_reps, trial=trial,
                                sampler=sampler,
                            )
                        except Exception as exc:  # trial fails, campaign continues
                            result.failures.append((key, repr(exc)))
                            continue
                        result.records.append(rec)
                        writer.writerow(record_row(rec))
                        rf.flush()
                        os.fsync(rf.fileno())
            del batch
        manifest["status"] = "complete"
    finally:
        rf.close()
        if sampler is not None:
            sampler.stop()
            from .telemetry import write_telemetry_csv

            write_telemetry_csv(telemetry_path, sampler.drain(), append=resume)
        manifest["finished_utc"] = datetime.now(timezone.utc).isoformat()
        manifest["failures"] = [list(map(str, k)) + [msg] for k, msg in result.failures]
        if manifest["status"] != "complete":
            manifest["status"] = "aborted"
            manifest["resume"] = "rerun with --resume to skip completed tuples"
        manifest_path.write_text(json.dumps(manifest, indent=2))
    return result
