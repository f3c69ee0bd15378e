#!/usr/bin/env python3
"""Regenerate figures/sample_report from synthetic campaign data.

Builds a results.csv shaped like a full two-backend sweep (dense-regime
service times at the published-table scale, a launch-overhead ramp at
small batches) plus matching telemetry, then runs the primary report
writer so the checked-in sample carries the exact published CSV schema.
Requires ldpcbench (the primary package) on the path.
"""
from __future__ import annotations

import csv
import pathlib
import shutil
import tempfile

import numpy as np

from ldpcbench.bench import RESULT_COLUMNS
from ldpcbench.report import write_report
from ldpcbench.telemetry import TelemetrySample, write_telemetry_csv

OUT = pathlib.Path(__file__).resolve().parent.parent / "sample_report"

BATCHES = [2 ** i for i in range(11)] + [2048 * j for j in range(1, 11)]
# dense-regime per-codeword ms by iteration budget: (cpu-role, gpu-role)
T_CB_DENSE = {4: (0.153, 0.026), 10: (0.373, 0.064), 20: (0.725, 0.126)}
LAUNCH_MS = {"cpu-role": 0.3, "gpu-role": 3.0}
TRIALS = 3
K_INFO = 512


def main() -> None:
    rng = np.random.default_rng(2026)
    OUT.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        camp = pathlib.Path(tmp)
        with open(camp / "results.csv", "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(RESULT_COLUMNS)
            for backend in ("cpu-role", "gpu-role"):
                for n in BATCHES:
                    for iters, (cpu_cb, gpu_cb) in sorted(T_CB_DENSE.items()):
                        t_cb = cpu_cb if backend == "cpu-role" else gpu_cb
                        base = LAUNCH_MS[backend] * iters / 10.0 + n * t_cb
                        for trial in range(TRIALS):
                            t_dec = base * float(1.0 + 0.004 * rng.standard_normal())
                            w.writerow([
                                backend, n, iters, trial,
                                f"{t_dec:.9g}", f"{t_dec / n:.9g}",
                                f"{n * K_INFO / (t_dec / 1000.0):.9g}",
                                "dense" if n >= 2048 else "baseline",
                                "sample", "sum_product", "10",
                                "2026-01-01T00:00:00+00:00",
                            ])
        samples = []
        for i in range(90):
            samples.append(TelemetrySample(
                timestamp_utc="2026-01-01T00:00:00+00:00", mono_ns=i,
                cpu_util_pct=float(np.clip(rng.normal(1100, 60), 0, None)),
                active_cores=0.0, backend="cpu-role",
            ))
        for i in range(90):
            util = float(np.clip(rng.normal(92, 5), 0, 100))
            if i % 9 == 0:
                util = float(rng.uniform(0, 4))  # idle gaps between batches
            samples.append(TelemetrySample(
                timestamp_utc="2026-01-01T00:00:00+00:00", mono_ns=1000 + i,
                cpu_util_pct=float(np.clip(rng.normal(180, 30), 0, None)),
                active_cores=0.0, gpu_util_pct=util,
                gpu_power_w=float(rng.normal(30, 2)), backend="gpu-role",
            ))
        samples = [
            TelemetrySample(**{**s.__dict__, "active_cores": s.cpu_util_pct / 100.0})
            for s in samples
        ]
        write_telemetry_csv(camp / "telemetry.csv", samples)
        for f in OUT.glob("*"):
            f.unlink()
        write_report(camp, OUT, slot_ms=0.5, picks=(4, 10, 20))
        shutil.copy(camp / "telemetry.csv", OUT / "telemetry_source.csv")
    print(f"sample report written to {OUT}")


if __name__ == "__main__":
    main()
