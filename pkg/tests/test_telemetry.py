import time

import numpy as np
import pytest

from ldpcbench.errors import ConfigError
from ldpcbench.telemetry import (
    GpuCommandAdapter,
    TelemetrySample,
    TelemetrySampler,
    read_telemetry_csv,
    samples_in_window,
    summarize,
    write_telemetry_csv,
)


def sample(cores=0.0, gpu=None, power=None, mono=0, **kw):
    return TelemetrySample(
        timestamp_utc="2026-01-01T00:00:00+00:00", mono_ns=mono,
        cpu_util_pct=cores * 100.0, active_cores=cores,
        gpu_util_pct=gpu, gpu_power_w=power, **kw,
    )


class TestSummarize:
    def test_threshold_filters(self):
        s = summarize([sample(gpu=g, power=10.0 * i) for i, g in enumerate([0, 3, 50, 95])])
        assert s.gpu_active_count == 2   # 50 and 95
        assert s.gpu_high_count == 1     # 95
        assert s.mean_gpu_power_active_w == pytest.approx(25.0)
        assert s.mean_gpu_power_high_w == pytest.approx(30.0)

    def test_active_core_conversion(self):
        s = sample(cores=11.5)
        assert s.cpu_util_pct == 1150.0
        assert s.active_cores == s.cpu_util_pct / 100.0

    def test_zero_utilization(self):
        assert sample(cores=0.0).active_cores == 0.0

    def test_cpu_only_run_has_no_gpu_aggregates(self):
        s = summarize([sample(cores=2.0), sample(cores=4.0)])
        assert s.count == 2
        assert s.mean_active_cores == pytest.approx(3.0)
        assert s.gpu_active_count is None
        assert s.mean_gpu_power_active_w is None

    def test_mean_active_cores(self):
        s = summarize([sample(cores=c) for c in (10.8, 11.2, 12.0)])
        assert s.mean_active_cores == pytest.approx(11.333333333333334)
        assert s.max_active_cores == 12.0

    def test_empty_window(self):
        s = summarize([])
        assert s.count == 0
        assert s.mean_active_cores is None

    def test_high_subset_of_active(self):
        rng = np.random.default_rng(3)
        samples = [sample(gpu=float(g)) for g in rng.uniform(0, 100, 200)]
        s = summarize(samples)
        assert s.gpu_high_count <= s.gpu_active_count


class TestWindows:
    def test_interval_containment(self):
        samples = [sample(mono=t) for t in (5, 10, 15, 20)]
        assert [s.mono_ns for s in samples_in_window(samples, 10, 15)] == [10, 15]


class TestSampler:
    def test_rate_and_fields(self):
        sampler = TelemetrySampler(period_s=0.05)
        sampler.set_context("ref-st", 8, 4, 1)
        sampler.start()
        # burn CPU so utilization is visible
        t_end = time.monotonic() + 1.0
        x = np.random.default_rng(0).standard_normal(200_000)
        while time.monotonic() < t_end:
            x = np.sqrt(np.abs(x) + 1.0)
        sampler.stop()
        samples = sampler.drain()
        # 1 s at 20 Hz with <=20% jitter: expect 20 +/- 4, allow more slack
        assert 10 <= len(samples) <= 26
        for s in samples:
            assert s.active_cores == s.cpu_util_pct / 100.0
            assert s.gpu_util_pct is None
            assert (s.backend, s.n_cw, s.iters, s.trial) == ("ref-st", 8, 4, 1)
        assert max(s.active_cores for s in samples) > 0.3

    def test_context_cleared(self):
        sampler = TelemetrySampler(period_s=0.02)
        sampler.start()
        time.sleep(0.08)
        sampler.stop()
        for s in sampler.drain():
            assert s.backend is None

    def test_bad_period(self):
        with pytest.raises(ConfigError):
            TelemetrySampler(period_s=0.0)


class TestGpuAdapter:
    def test_parses_command_output(self):
        adapter = GpuCommandAdapter("echo 42.5, 101.0")
        assert adapter.read() == (42.5, 101.0)

    def test_failure_returns_none(self):
        assert GpuCommandAdapter("false").read() is None
        assert GpuCommandAdapter("echo not-a-number").read() is None

    def test_sampler_survives_adapter_failure(self):
        sampler = TelemetrySampler(period_s=0.02, gpu_cmd="false")
        sampler.start()
        time.sleep(0.1)
        sampler.stop()
        samples = sampler.drain()
        assert samples
        assert all(s.gpu_util_pct is None for s in samples)

    def test_sampler_records_gpu_fields(self):
        sampler = TelemetrySampler(period_s=0.02, gpu_cmd="echo 88.0,140.5")
        sampler.start()
        time.sleep(0.1)
        sampler.stop()
        samples = sampler.drain()
        assert samples
        assert all(s.gpu_util_pct == 88.0 and s.gpu_power_w == 140.5 for s in samples)


class TestCsv:
    def test_round_trip(self, tmp_path):
        samples = [
            sample(cores=1.5, mono=100, backend="ref-st", n_cw=4, iters=6, trial=0),
            sample(cores=0.5, gpu=91.0, power=30.25, mono=200),
        ]
        path = tmp_path / "telemetry.csv"
        write_telemetry_csv(path, samples)
        back = read_telemetry_csv(path)
        assert back == samples

    def test_missing_column_named(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("timestamp_utc,mono_ns\n2026,1\n")
        with pytest.raises(ConfigError, match="gpu_util_pct"):
            read_telemetry_csv(path)

    def test_append_mode_single_header(self, tmp_path):
        path = tmp_path / "telemetry.csv"
        write_telemetry_csv(path, [sample(mono=1)])
        write_telemetry_csv(path, [sample(mono=2)], append=True)
        lines = path.read_text().splitlines()
        assert len(lines) == 3
        assert lines[0].startswith("timestamp_utc")
