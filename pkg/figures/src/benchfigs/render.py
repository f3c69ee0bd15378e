"""Render report CSVs into publication-style figures.

Three figure kinds:

* ``thr_vs_batch_log2``  - throughput per backend over batch size, x axis at
  explicit log2 positions (one tick per swept batch size).
* ``thr_vs_iters``       - dense-regime throughput per backend over the
  iteration budget, with per-budget speedup text labels when present.
* ``histogram_pair``     - side-by-side active-core and GPU-utilization
  histogram panels.

Rendering is deterministic for identical inputs: fixed style, fixed svg
hash salt, no timestamps in the output metadata.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

matplotlib.rcParams["svg.hashsalt"] = "benchfigs"


class SchemaError(ValueError):
    """Input CSV does not carry the expected report columns."""


class FigureKind(str, Enum):
    THR_VS_BATCH_LOG2 = "thr_vs_batch_log2"
    THR_VS_ITERS = "thr_vs_iters"
    HISTOGRAM_PAIR = "histogram_pair"


REQUIRED_COLUMNS = {
    FigureKind.THR_VS_BATCH_LOG2: ("backend", "n_cw", "log2_n_cw", "mean_thr_bps"),
    FigureKind.THR_VS_ITERS: ("backend", "iters", "mean_thr_bps", "speedup"),
    FigureKind.HISTOGRAM_PAIR: ("count",),
}


@dataclass(frozen=True)
class FigureSpec:
    input_csv: Path
    kind: FigureKind
    output: Path
    title: str = ""
    dpi: int = 120


@dataclass(frozen=True)
class RenderResult:
    """What got drawn, for callers and tests: the output path, the x tick
    positions/labels of the primary axis, and any text annotations."""

    path: Path
    xticks: tuple[float, ...] = ()
    xtick_labels: tuple[str, ...] = ()
    annotations: tuple[str, ...] = ()
    empty: bool = False


def _read_table(path: Path, required: tuple[str, ...]) -> list[dict]:
    if not path.exists():
        raise SchemaError(f"{path}: no such CSV")
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: empty file")
        missing = [c for c in required if c not in reader.fieldnames]
        if missing:
            raise SchemaError(f"{path}: missing columns: {', '.join(missing)}")
        rows = [r for r in reader if r[reader.fieldnames[0]] != "EMPTY"]
    return rows


def _save(fig, spec: FigureSpec) -> None:
    spec.output.parent.mkdir(parents=True, exist_ok=True)
    fmt = spec.output.suffix.lstrip(".")
    metadata = {"Date": None} if fmt == "svg" else {}
    fig.savefig(spec.output, dpi=spec.dpi, metadata=metadata)
    plt.close(fig)


def _placeholder(spec: FigureSpec, message: str) -> RenderResult:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.text(0.5, 0.5, f"no data\n{message}", ha="center", va="center",
            fontsize=14, color="crimson", transform=ax.transAxes,
            bbox={"boxstyle": "round", "facecolor": "mistyrose"})
    ax.set_axis_off()
    _save(fig, spec)
    return RenderResult(path=spec.output, annotations=("no data",), empty=True)


def _series(rows: list[dict], key: str) -> dict[str, list[dict]]:
    out: dict[str, list[dict]] = {}
    for r in rows:
        out.setdefault(r[key], []).append(r)
    return out


def render_thr_vs_batch(spec: FigureSpec) -> RenderResult:
    rows = _read_table(spec.input_csv, REQUIRED_COLUMNS[FigureKind.THR_VS_BATCH_LOG2])
    crossovers = [r for r in rows if r["backend"].startswith("crossover")]
    rows = [r for r in rows if not r["backend"].startswith("crossover")]
    if not rows:
        return _placeholder(spec, spec.input_csv.name)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ticks: dict[float, str] = {}
    for backend, series in sorted(_series(rows, "backend").items()):
        pts = sorted(
            (float(r["log2_n_cw"]), float(r["mean_thr_bps"]) / 1e6, r["n_cw"])
            for r in series
        )
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=backend)
        ticks.update({p[0]: p[2] for p in pts})
    annotations = []
    for c in crossovers:
        if c["n_cw"]:
            x = math.log2(int(c["n_cw"]))
            ax.axvline(x, linestyle=":", color="gray")
            label = f"{c['backend']} @ {c['n_cw']}"
            ax.annotate(label, (x, ax.get_ylim()[1]), fontsize=7,
                        rotation=90, va="top", ha="right", color="gray")
            annotations.append(label)
    xt = sorted(ticks)
    ax.set_xticks(xt)
    ax.set_xticklabels([ticks[t] for t in xt], rotation=60, fontsize=7)
    ax.set_yscale("log")
    ax.set_xlabel("codewords per batch (log2-spaced)")
    ax.set_ylabel("information throughput [Mbit/s]")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    if spec.title:
        ax.set_title(spec.title)
    fig.tight_layout()
    _save(fig, spec)
    return RenderResult(
        path=spec.output, xticks=tuple(xt),
        xtick_labels=tuple(ticks[t] for t in xt),
        annotations=tuple(annotations),
    )


def render_thr_vs_iters(spec: FigureSpec) -> RenderResult:
    rows = _read_table(spec.input_csv, REQUIRED_COLUMNS[FigureKind.THR_VS_ITERS])
    if not rows:
        return _placeholder(spec, spec.input_csv.name)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    annotations = []
    budgets: set[int] = set()
    for backend, series in sorted(_series(rows, "backend").items()):
        pts = sorted((int(r["iters"]), float(r["mean_thr_bps"]) / 1e6, r["speedup"])
                     for r in series)
        budgets.update(p[0] for p in pts)
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="s", label=backend)
        for iters, thr, speed in pts:
            if speed:
                label = f"{float(speed):.1f}×"
                ax.annotate(label, (iters, thr), textcoords="offset points",
                            xytext=(0, 8), ha="center", fontsize=8)
                annotations.append(label)
    xt = sorted(budgets)
    ax.set_xticks(xt)
    ax.set_xlabel("decoder iterations")
    ax.set_ylabel("dense-regime mean throughput [Mbit/s]")
    ax.set_yscale("log")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    if spec.title:
        ax.set_title(spec.title)
    fig.tight_layout()
    _save(fig, spec)
    return RenderResult(
        path=spec.output, xticks=tuple(float(t) for t in xt),
        xtick_labels=tuple(str(t) for t in xt), annotations=tuple(annotations),
    )


def _hist_panel(ax, rows, lo_key, hi_key, color, xlabel):
    edges = [float(r[lo_key]) for r in rows] + [float(rows[-1][hi_key])]
    counts = [int(r["count"]) for r in rows]
    ax.bar(edges[:-1], counts, width=[b - a for a, b in zip(edges, edges[1:])],
           align="edge", color=color, edgecolor="black", linewidth=0.4)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("samples")
    ax.grid(True, axis="y", alpha=0.3)


def render_histogram_pair(spec: FigureSpec) -> RenderResult:
    """``input_csv`` may be the cpu-histogram CSV or the report directory;
    the GPU histogram is read from the sibling ``gpu_hist.csv``."""
    base = spec.input_csv
    cpu_path = base / "cpu_hist.csv" if base.is_dir() else base
    gpu_path = cpu_path.parent / "gpu_hist.csv"
    cpu_rows = _read_table(cpu_path, ("bin_lo_cores", "bin_hi_cores", "count"))
    try:
        gpu_rows = _read_table(gpu_path, ("bin_lo_pct", "bin_hi_pct", "count"))
    except SchemaError:
        gpu_rows = []
    if not cpu_rows and not gpu_rows:
        return _placeholder(spec, cpu_path.name)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    annotations = []
    if cpu_rows:
        _hist_panel(ax1, cpu_rows, "bin_lo_cores", "bin_hi_cores",
                    "steelblue", "active-core equivalents")
    else:
        ax1.text(0.5, 0.5, "no data", ha="center", va="center",
                 transform=ax1.transAxes, color="crimson")
        annotations.append("no data")
    if gpu_rows:
        _hist_panel(ax2, gpu_rows, "bin_lo_pct", "bin_hi_pct",
                    "seagreen", "GPU utilization [%] (active samples)")
    else:
        ax2.text(0.5, 0.5, "no data", ha="center", va="center",
                 transform=ax2.transAxes, color="crimson")
        annotations.append("no data")
    if spec.title:
        fig.suptitle(spec.title)
    fig.tight_layout()
    _save(fig, spec)
    return RenderResult(path=spec.output, annotations=tuple(annotations),
                        empty=not cpu_rows and not gpu_rows)


_RENDERERS = {
    FigureKind.THR_VS_BATCH_LOG2: render_thr_vs_batch,
    FigureKind.THR_VS_ITERS: render_thr_vs_iters,
    FigureKind.HISTOGRAM_PAIR: render_histogram_pair,
}


def render(spec: FigureSpec) -> RenderResult:
    """Render one figure; returns what was drawn."""
    return _RENDERERS[FigureKind(spec.kind)](spec)


def render_report_dir(report_dir, out_dir, fmt: str = "png") -> list[RenderResult]:
    """Render the standard three figures from a report directory."""
    report_dir, out_dir = Path(report_dir), Path(out_dir)
    if fmt not in ("png", "svg"):
        raise SchemaError(f"unsupported format '{fmt}' (use png or svg)")
    specs = [
        FigureSpec(report_dir / "thr_vs_batch.csv", FigureKind.THR_VS_BATCH_LOG2,
                   out_dir / f"thr_vs_batch.{fmt}"),
        FigureSpec(report_dir / "thr_vs_iters_dense.csv", FigureKind.THR_VS_ITERS,
                   out_dir / f"thr_vs_iters.{fmt}"),
        FigureSpec(report_dir / "cpu_hist.csv", FigureKind.HISTOGRAM_PAIR,
                   out_dir / f"utilization_hist.{fmt}"),
    ]
    return [render(spec) for spec in specs]
