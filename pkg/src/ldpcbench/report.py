"""Aggregates campaign records into table/figure datasets: throughput vs
batch size, throughput vs iteration budget over the dense regime, the
per-codeword slot-budget table, paired speedups, and utilization
histograms.  All operations consume only the results/telemetry CSV files,
so regenerating a report from the same inputs is byte-identical.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bench import read_results_csv, throughput_bps
from .errors import ConfigError, InputError
from .telemetry import read_telemetry_csv

DEFAULT_SLOT_MS = 0.5
DEFAULT_PICKS = (4, 10, 20)

CPU_HIST_BIN_CORES = 1.0
GPU_HIST_BIN_PCT = 5.0
GPU_ACTIVE_PCT = 5.0


@dataclass
class ReportTable:
    name: str
    columns: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)
    empty: bool = False

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(self.columns)
            if self.empty:
                w.writerow(["EMPTY"] + [""] * (len(self.columns) - 1))
            else:
                w.writerows(self.rows)

    def column(self, name: str) -> list:
        idx = self.columns.index(name)
        return [r[idx] for r in self.rows]


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def slot_fraction(t_cb_ms: float, slot_ms: float = DEFAULT_SLOT_MS) -> float:
    """Fraction of one slot consumed by the amortized per-codeword time."""
    if t_cb_ms < 0:
        raise InputError(f"t_cb must be non-negative, got {t_cb_ms}")
    if slot_ms <= 0:
        raise InputError(f"slot length must be positive, got {slot_ms}")
    return t_cb_ms / slot_ms


def _group(records, keys):
    groups: dict[tuple, list] = {}
    for r in records:
        k = tuple(r[key] for key in keys)
        groups.setdefault(k, []).append(r)
    return dict(sorted(groups.items()))


def _stats(values) -> tuple[float, float, float, float, int]:
    arr = np.asarray(values, dtype=float)
    return (
        float(arr.mean()), float(np.median(arr)),
        float(arr.min()), float(arr.max()), int(arr.size),
    )


def _pick_reference(records) -> tuple[str, str] | None:
    """For a two-backend record set, split into (reference, accelerated).

    A backend whose name contains 'ref' is the reference; otherwise the one
    with the lower overall mean throughput is treated as the baseline.
    """
    backends = sorted({r["backend"] for r in records})
    if len(backends) != 2:
        return None
    named = [b for b in backends if "ref" in b]
    if named:
        ref = named[0]
        return ref, next(b for b in backends if b != ref)
    means = {
        b: float(np.mean([r["thr_bps"] for r in records if r["backend"] == b]))
        for b in backends
    }
    ref = min(backends, key=lambda b: means[b])
    return ref, next(b for b in backends if b != ref)


def paired_speedup(records_a, records_b, key=("n_cw", "iters")) -> ReportTable:
    """Ratio of mean throughputs (A over B) at matched key values.

    Keys present on only one side are kept and marked incomparable rather
    than dropped.
    """
    if isinstance(key, str):
        key = (key,)
    ga, gb = _group(records_a, key), _group(records_b, key)
    name_a = records_a[0]["backend"] if records_a else "A"
    name_b = records_b[0]["backend"] if records_b else "B"
    table = ReportTable(
        name=f"speedup[{name_a}/{name_b}]",
        columns=tuple(key) + ("speedup", "mean_thr_a_bps", "mean_thr_b_bps", "status"),
    )
    for k in sorted(set(ga) | set(gb)):
        if k in ga and k in gb:
            ma = float(np.mean([r["thr_bps"] for r in ga[k]]))
            mb = float(np.mean([r["thr_bps"] for r in gb[k]]))
            table.rows.append(k + (_fmt(ma / mb), _fmt(ma), _fmt(mb), "ok"))
        else:
            have = "a-only" if k in ga else "b-only"
            table.rows.append(k + ("", "", "", f"incomparable:{have}"))
    return table


def throughput_vs_batch(records) -> ReportTable:
    """Mean throughput per (backend, N_cw), aggregated over all iteration
    budgets and trials; emits log2(N_cw) for plotting.  When exactly two
    backends are present, the smallest N_cw where the second overtakes the
    first is reported as a named crossover row."""
    if not records:
        raise InputError("no records to aggregate")
    table = ReportTable(
        name="thr_vs_batch",
        columns=("backend", "n_cw", "log2_n_cw", "mean_thr_bps", "median_thr_bps",
                 "min_thr_bps", "max_thr_bps", "n_samples"),
    )
    groups = _group(records, ("backend", "n_cw"))
    means: dict[tuple, float] = {}
    for (backend, n_cw), rows in groups.items():
        mean, med, lo, hi, n = _stats([r["thr_bps"] for r in rows])
        means[(backend, n_cw)] = mean
        table.rows.append((
            backend, n_cw, _fmt(math.log2(n_cw)), _fmt(mean), _fmt(med),
            _fmt(lo), _fmt(hi), n,
        ))
    pair = _pick_reference(records)
    if pair is not None:
        ref, par = pair
        shared = sorted(
            n for (b, n) in means if b == ref and (par, n) in means
        )
        crossover = next(
            (n for n in shared if means[(par, n)] > means[(ref, n)]), None
        )
        table.rows.append((
            f"crossover[{par}>{ref}]",
            crossover if crossover is not None else "",
            "", "", "", "", "", "",
        ))
    return table


def throughput_vs_iters_dense(records) -> ReportTable:
    """Mean throughput per (backend, I) over dense-regime records, with a
    paired speedup column when exactly two backends are present."""
    dense = [r for r in records if r["regime"] == "dense"]
    table = ReportTable(
        name="thr_vs_iters_dense",
        columns=("backend", "iters", "mean_thr_bps", "median_thr_bps",
                 "n_samples", "speedup"),
    )
    if not dense:
        table.empty = True
        return table
    groups = _group(dense, ("backend", "iters"))
    means = {}
    for (backend, iters), rows in groups.items():
        mean, med, _, _, n = _stats([r["thr_bps"] for r in rows])
        means[(backend, iters)] = mean
    pair = _pick_reference(dense)
    for (backend, iters), rows in groups.items():
        mean, med, _, _, n = _stats([r["thr_bps"] for r in rows])
        speed = ""
        if pair and backend == pair[1] and (pair[0], iters) in means:
            speed = _fmt(mean / means[(pair[0], iters)])
        table.rows.append((backend, iters, _fmt(mean), _fmt(med), n, speed))
    return table


def service_time_table(
    records, slot_ms: float = DEFAULT_SLOT_MS, picks=DEFAULT_PICKS
) -> ReportTable:
    """Mean dense-regime t_cb per (backend, I in picks) against the slot
    budget; ms formatted with 3 decimals and fractions with 2, table-style."""
    swept = sorted({r["iters"] for r in records})
    for p in picks:
        if p not in swept:
            raise ConfigError(f"pick I={p} was not swept (swept: {swept})")
    dense = [r for r in records if r["regime"] == "dense"]
    table = ReportTable(
        name="service_time",
        columns=("backend", "iters", "mean_t_cb_ms", "slot_fraction",
                 "slot_ms", "n_samples"),
    )
    groups = _group(dense, ("backend", "iters"))
    for (backend, iters), rows in groups.items():
        if iters not in picks:
            continue
        mean_t_cb = float(np.mean([r["t_cb_ms"] for r in rows]))
        table.rows.append((
            backend, iters, f"{mean_t_cb:.3f}",
            f"{slot_fraction(mean_t_cb, slot_ms):.2f}",
            _fmt(slot_ms), len(rows),
        ))
    return table


def utilization_histograms(telemetry_path) -> tuple[ReportTable, ReportTable]:
    """Active-core histogram (bin width 1 core) over all samples and GPU
    utilization histogram (bin width 5%) over active samples (util > 5%)."""
    samples = read_telemetry_csv(telemetry_path)
    cpu_table = ReportTable(
        name="cpu_hist", columns=("bin_lo_cores", "bin_hi_cores", "count"),
    )
    cores = [s.active_cores for s in samples]
    if cores:
        top = max(1.0, math.ceil(max(cores) + 1e-9))
        edges = np.arange(0.0, top + CPU_HIST_BIN_CORES, CPU_HIST_BIN_CORES)
        counts, _ = np.histogram(cores, bins=edges)
        cpu_table.rows = [
            (_fmt(edges[i]), _fmt(edges[i + 1]), int(counts[i]))
            for i in range(len(counts))
        ]
    else:
        cpu_table.empty = True
    gpu_table = ReportTable(
        name="gpu_hist", columns=("bin_lo_pct", "bin_hi_pct", "count"),
    )
    active = [
        s.gpu_util_pct for s in samples
        if s.gpu_util_pct is not None and s.gpu_util_pct > GPU_ACTIVE_PCT
    ]
    if active:
        edges = np.arange(GPU_ACTIVE_PCT, 100.0 + GPU_HIST_BIN_PCT, GPU_HIST_BIN_PCT)
        counts, _ = np.histogram(active, bins=edges)
        gpu_table.rows = [
            (_fmt(edges[i]), _fmt(edges[i + 1]), int(counts[i]))
            for i in range(len(counts))
        ]
    else:
        gpu_table.empty = True
    return cpu_table, gpu_table


def write_report(
    in_dir,
    out_dir,
    slot_ms: float = DEFAULT_SLOT_MS,
    picks=DEFAULT_PICKS,
) -> dict:
    """Produce all report CSVs plus a JSON manifest from one campaign dir."""
    in_path, out_path = Path(in_dir), Path(out_dir)
    results_csv = in_path / "results.csv"
    if not results_csv.exists():
        raise ConfigError(f"no results.csv under {in_path}")
    records = read_results_csv(results_csv)
    if not records:
        raise ConfigError(f"{results_csv} holds no records")
    out_path.mkdir(parents=True, exist_ok=True)

    tables = {
        "thr_vs_batch.csv": throughput_vs_batch(records),
        "thr_vs_iters_dense.csv": throughput_vs_iters_dense(records),
        "service_time_table.csv": service_time_table(records, slot_ms, picks),
    }
    backends = sorted({r["backend"] for r in records})
    pair = _pick_reference(records)
    if pair is not None:
        ref, par = pair
        tables["speedup.csv"] = paired_speedup(
            [r for r in records if r["backend"] == par],
            [r for r in records if r["backend"] == ref],
        )
    else:
        tables["speedup.csv"] = ReportTable(
            name="speedup", columns=("n_cw", "iters", "speedup", "status"), empty=True,
        )
    telemetry_csv = in_path / "telemetry.csv"
    if telemetry_csv.exists():
        cpu_t, gpu_t = utilization_histograms(telemetry_csv)
    else:
        cpu_t = ReportTable(name="cpu_hist", columns=("bin_lo_cores", "bin_hi_cores", "count"), empty=True)
        gpu_t = ReportTable(name="gpu_hist", columns=("bin_lo_pct", "bin_hi_pct", "count"), empty=True)
    tables["cpu_hist.csv"] = cpu_t
    tables["gpu_hist.csv"] = gpu_t

    for fname, table in tables.items():
        table.write_csv(out_path / fname)

    manifest = {
        "inputs": {"results": str(results_csv), "telemetry": str(telemetry_csv)},
        "slot_ms": slot_ms,
        "picks": list(picks),
        "record_count": len(records),
        "backends": backends,
        "llr_hashes": sorted({r["llr_hash"] for r in records}),
        "cn_rules": sorted({r["cn_rule"] for r in records}),
        "esn0_db": sorted({r["esn0_db"] for r in records}),
        "tables": {k: {"rows": len(t.rows), "empty": t.empty} for k, t in tables.items()},
    }
    campaign_manifest = in_path / "campaign_manifest.json"
    if campaign_manifest.exists():
        manifest["campaign"] = json.loads(campaign_manifest.read_text())
    (out_path / "report_manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))
    return manifest
