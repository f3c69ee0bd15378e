import filecmp

import numpy as np
import pytest

from ldpcbench.errors import ConfigError, InputError
from ldpcbench.report import (
    paired_speedup,
    service_time_table,
    slot_fraction,
    throughput_vs_batch,
    throughput_vs_iters_dense,
    utilization_histograms,
    write_report,
)
from ldpcbench.telemetry import TelemetrySample, write_telemetry_csv

# Published dense-regime mean t_cb (ms) and slot fractions for a 0.5 ms slot:
# four platform roles x I in {4, 10, 20}.
SLOT_TABLE = {
    4: ((0.153, 0.31), (0.026, 0.05), (0.087, 0.17), (0.006, 0.01)),
    10: ((0.373, 0.75), (0.064, 0.13), (0.213, 0.43), (0.015, 0.03)),
    20: ((0.725, 1.45), (0.126, 0.25), (0.423, 0.85), (0.029, 0.06)),
}


def fake_record(backend, n_cw, iters, trial, t_cb_ms, k_info=512):
    t_dec = t_cb_ms * n_cw
    return {
        "backend": backend, "n_cw": n_cw, "iters": iters, "trial": trial,
        "t_dec_ms": t_dec, "t_cb_ms": t_cb_ms,
        "thr_bps": n_cw * k_info / (t_dec / 1000.0),
        "regime": "dense" if n_cw >= 2048 else "baseline",
        "llr_hash": "h", "cn_rule": "sum_product", "esn0_db": 10.0,
        "timestamp_utc": "t",
    }


class TestSlotFraction:
    def test_published_table_reproduced(self):
        for _, rows in SLOT_TABLE.items():
            for t_cb, frac in rows:
                assert round(slot_fraction(t_cb, 0.5), 2) == frac

    def test_edge_values(self):
        assert slot_fraction(0.0) == 0.0
        assert slot_fraction(0.5, 0.5) == 1.0

    def test_negative_rejected(self):
        with pytest.raises(InputError):
            slot_fraction(-0.1)
        with pytest.raises(InputError):
            slot_fraction(0.1, 0.0)


class TestPairedSpeedup:
    def records_for(self, t_cb_by_iters, backend):
        recs = []
        for iters, t_cb in t_cb_by_iters.items():
            for n_cw in (2048, 4096):
                for trial in range(3):
                    recs.append(fake_record(backend, n_cw, iters, trial, t_cb))
        return recs

    def test_dense_pair_from_published_means(self):
        fast = self.records_for({4: 0.026}, "gpu-role")
        slow = self.records_for({4: 0.153}, "cpu-role")
        table = paired_speedup(fast, slow, key="iters")
        speed = float(table.rows[0][table.columns.index("speedup")])
        assert speed == pytest.approx(5.88, abs=0.01)

    def test_workstation_pair(self):
        fast = self.records_for({4: 0.006}, "gpu-role")
        slow = self.records_for({4: 0.087}, "cpu-role")
        table = paired_speedup(fast, slow, key="iters")
        assert float(table.rows[0][1]) == pytest.approx(14.5, abs=0.01)

    def test_identical_sets_give_unity(self):
        a = self.records_for({4: 0.1, 10: 0.2}, "x")
        table = paired_speedup(a, a)
        for row in table.rows:
            assert float(row[table.columns.index("speedup")]) == 1.0

    def test_symmetry_product_is_one(self):
        rng = np.random.default_rng(2)
        a = [fake_record("a", 2048, i, t, float(rng.uniform(0.01, 1)))
             for i in (4, 6) for t in range(3)]
        b = [fake_record("b", 2048, i, t, float(rng.uniform(0.01, 1)))
             for i in (4, 6) for t in range(3)]
        ab = paired_speedup(a, b)
        ba = paired_speedup(b, a)
        # table cells carry 9 significant digits, bounding the product error
        for r1, r2 in zip(ab.rows, ba.rows):
            assert float(r1[2]) * float(r2[2]) == pytest.approx(1.0, rel=1e-8)

    def test_missing_key_marked_incomparable(self):
        a = self.records_for({4: 0.1}, "a")
        b = self.records_for({4: 0.1, 10: 0.2}, "b")
        table = paired_speedup(a, b, key="iters")
        status = dict(zip(table.column("iters"), table.column("status")))
        assert status[4] == "ok"
        assert status[10].startswith("incomparable")


class TestThroughputVsBatch:
    def test_single_record_table(self):
        rec = fake_record("ref-st", 4, 6, 0, 0.25)
        table = throughput_vs_batch([rec])
        row = table.rows[0]
        cols = table.columns
        assert row[cols.index("mean_thr_bps")] == f"{rec['thr_bps']:.9g}"
        assert row[cols.index("log2_n_cw")] == "2"
        assert row[cols.index("n_samples")] == 1

    def test_aggregation_counts(self):
        recs = [
            fake_record("ref-st", 16, i, t, 0.1)
            for i in range(4, 23, 2) for t in range(10)
        ]
        table = throughput_vs_batch(recs)
        assert table.rows[0][table.columns.index("n_samples")] == 100

    def test_crossover_detection(self):
        recs = []
        for n in (1, 2, 4, 8, 16, 32):
            # par overtakes ref from 8 onward
            ref_t, par_t = 0.1, (0.2 if n < 8 else 0.05)
            for t in range(2):
                recs.append(fake_record("ref-st", n, 4, t, ref_t))
                recs.append(fake_record("par-cpu", n, 4, t, par_t))
        table = throughput_vs_batch(recs)
        cross = [r for r in table.rows if str(r[0]).startswith("crossover")]
        assert len(cross) == 1
        assert cross[0][0] == "crossover[par-cpu>ref-st]"
        assert cross[0][1] == 8

    def test_empty_rejected(self):
        with pytest.raises(InputError):
            throughput_vs_batch([])


class TestThroughputVsItersDense:
    def test_published_means_reproduced(self):
        recs = []
        for backend, t_cb in (("cpu-role", 0.153), ("gpu-role", 0.026)):
            for n in (2048, 4096):
                for t in range(3):
                    recs.append(fake_record(backend, n, 4, t, t_cb))
        table = throughput_vs_iters_dense(recs)
        means = {
            (r[0], r[1]): float(r[table.columns.index("mean_thr_bps")])
            for r in table.rows
        }
        assert means[("cpu-role", 4)] / 1e6 == pytest.approx(3.35, abs=0.01)
        assert means[("gpu-role", 4)] / 1e6 == pytest.approx(19.69, abs=0.01)

    def test_high_iteration_point(self):
        # feeding published-class means: 0.139 ms -> ~3.7 Mbit/s and
        # 0.787 ms -> ~0.65 Mbit/s
        assert 512 / (0.139 / 1000.0) / 1e6 == pytest.approx(3.7, abs=0.02)
        assert 512 / (0.787 / 1000.0) / 1e6 == pytest.approx(0.65, abs=0.01)

    def test_speedup_column(self):
        recs = []
        for t in range(2):
            recs.append(fake_record("ref-st", 2048, 4, t, 0.153))
            recs.append(fake_record("par-cpu", 2048, 4, t, 0.026))
        table = throughput_vs_iters_dense(recs)
        by_backend = {r[0]: r for r in table.rows}
        assert float(by_backend["par-cpu"][table.columns.index("speedup")]) == pytest.approx(5.88, abs=0.01)
        assert by_backend["ref-st"][table.columns.index("speedup")] == ""

    def test_baseline_only_yields_empty_marker(self):
        recs = [fake_record("ref-st", 16, 4, 0, 0.1)]
        table = throughput_vs_iters_dense(recs)
        assert table.empty and not table.rows


class TestServiceTimeTable:
    def test_published_row_format(self):
        recs = [fake_record("gpu-role", n, 10, t, 0.064)
                for n in (2048, 4096) for t in range(5)]
        table = service_time_table(recs, slot_ms=0.5, picks=(10,))
        row = table.rows[0]
        assert row[table.columns.index("mean_t_cb_ms")] == "0.064"
        assert row[table.columns.index("slot_fraction")] == "0.13"

    def test_full_slot(self):
        recs = [fake_record("x", 2048, 4, t, 0.5) for t in range(3)]
        table = service_time_table(recs, picks=(4,))
        assert table.rows[0][table.columns.index("slot_fraction")] == "1.00"

    def test_mean_is_arithmetic_over_records(self):
        recs = [
            fake_record("x", 2048, 4, 0, 0.1),
            fake_record("x", 2048, 4, 1, 0.3),
        ]
        table = service_time_table(recs, picks=(4,))
        assert table.rows[0][table.columns.index("mean_t_cb_ms")] == "0.200"

    def test_unswept_pick_rejected(self):
        recs = [fake_record("x", 2048, 4, 0, 0.1)]
        with pytest.raises(ConfigError, match="I=10"):
            service_time_table(recs, picks=(10,))


def telemetry_file(tmp_path, cores=(), gpus=()):
    samples = []
    for i, c in enumerate(cores):
        samples.append(TelemetrySample(
            timestamp_utc="t", mono_ns=i, cpu_util_pct=c * 100, active_cores=c,
        ))
    for i, g in enumerate(gpus):
        samples.append(TelemetrySample(
            timestamp_utc="t", mono_ns=1000 + i, cpu_util_pct=0.0,
            active_cores=0.0, gpu_util_pct=g,
        ))
    path = tmp_path / "telemetry.csv"
    write_telemetry_csv(path, samples)
    return path


class TestHistograms:
    def test_core_mass_in_expected_bins(self, tmp_path):
        rng = np.random.default_rng(4)
        cores = rng.uniform(10, 12, size=200)
        path = telemetry_file(tmp_path, cores=cores)
        cpu_t, _ = utilization_histograms(path)
        counts = {float(r[0]): r[2] for r in cpu_t.rows}
        assert counts[10.0] + counts[11.0] == 200

    def test_low_gpu_samples_filtered_out(self, tmp_path):
        path = telemetry_file(tmp_path, gpus=[1.0, 2.0, 3.0])
        _, gpu_t = utilization_histograms(path)
        assert gpu_t.empty

    def test_counts_sum_to_filtered_samples(self, tmp_path):
        rng = np.random.default_rng(5)
        gpus = rng.uniform(0, 100, size=300)
        path = telemetry_file(tmp_path, gpus=gpus)
        _, gpu_t = utilization_histograms(path)
        total = sum(r[2] for r in gpu_t.rows)
        assert total == int((gpus > 5.0).sum())

    def test_missing_column_is_named(self, tmp_path):
        path = tmp_path / "telemetry.csv"
        path.write_text("timestamp_utc,mono_ns\nx,1\n")
        with pytest.raises(ConfigError, match="cpu_util_pct|active_cores|gpu_util_pct"):
            utilization_histograms(path)


class TestWriteReport:
    def test_regeneration_is_byte_identical(self, paper_code, tmp_path):
        import csv

        from ldpcbench.bench import RESULT_COLUMNS, record_row

        camp = tmp_path / "camp"
        camp.mkdir()
        rng = np.random.default_rng(6)
        rows = []
        for backend in ("ref-st", "par-cpu"):
            for n in (16, 2048, 4096):
                for i in (4, 10, 20):
                    for t in range(3):
                        rows.append(fake_record(backend, n, i, t, float(rng.uniform(0.01, 0.9))))
        with open(camp / "results.csv", "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(RESULT_COLUMNS)
            for r in rows:
                w.writerow([
                    r["backend"], r["n_cw"], r["iters"], r["trial"],
                    f"{r['t_dec_ms']:.9g}", f"{r['t_cb_ms']:.9g}", f"{r['thr_bps']:.9g}",
                    r["regime"], r["llr_hash"], r["cn_rule"], f"{r['esn0_db']:.9g}",
                    r["timestamp_utc"],
                ])
        telemetry_file(camp, cores=[1.0, 2.0], gpus=[50.0, 90.0])
        write_report(camp, tmp_path / "rep1")
        write_report(camp, tmp_path / "rep2")
        for name in ("thr_vs_batch.csv", "thr_vs_iters_dense.csv",
                     "service_time_table.csv", "speedup.csv",
                     "cpu_hist.csv", "gpu_hist.csv"):
            assert filecmp.cmp(tmp_path / "rep1" / name, tmp_path / "rep2" / name, shallow=False)
