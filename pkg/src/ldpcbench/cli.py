"""Command-line entry point: ``bench run`` executes a measurement campaign,
``bench report`` aggregates a campaign directory into report CSVs."""
from __future__ import annotations

import argparse
import sys

from . import bench, codec, phychain, report
from .construction import LdpcCode
from .errors import ConfigError, LdpcBenchError


def _parse_int_list(text: str, what: str) -> list[int]:
    """Accept '4,6,8' or a range 'start:stop:step' (stop inclusive)."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) not in (2, 3):
            raise ConfigError(f"bad {what} range '{text}' (use start:stop[:step])")
        start, stop = int(parts[0]), int(parts[1])
        step = int(parts[2]) if len(parts) == 3 else 1
        if step < 1:
            raise ConfigError(f"{what} range step must be >= 1")
        return list(range(start, stop + 1, step))
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad {what} list '{text}'") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="bench",
        description="QC-LDPC batched-decode microbenchmark harness",
    )
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a measurement campaign")
    run.add_argument("--preset", choices=("baseline", "dense", "full", "custom"),
                     default="full")
    run.add_argument("--backends", default="ref-st,par-cpu",
                     help="comma-separated backend names")
    run.add_argument("--iters", default=None,
                     help="iteration budgets, e.g. '4:22:2' or '4,10,20'")
    run.add_argument("--batches", default=None,
                     help="batch sizes, e.g. '1,2,4,8' (required for --preset custom)")
    run.add_argument("--seed", type=int, default=0, help="64-bit PRNG seed")
    run.add_argument("--esn0-db", type=float, default=10.0)
    run.add_argument("--noiseless", action="store_true")
    run.add_argument("--k-info", type=int, default=512)
    run.add_argument("--n-coded", type=int, default=1024)
    run.add_argument("--trials", type=int, default=None, help="outer trials R")
    run.add_argument("--inner-reps", type=int, default=None, help="timed decodes M per trial")
    run.add_argument("--cn-rule", choices=[r.value for r in codec.CnRule],
                     default=codec.CnRule.SUM_PRODUCT.value)
    run.add_argument("--nms-alpha", type=float, default=codec.DEFAULT_NMS_ALPHA)
    run.add_argument("--lanes", type=int, default=None,
                     help="lane override for par-cpu")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--telemetry", choices=("on", "off"), default="on")
    run.add_argument("--telemetry-period", type=float, default=1.0)
    run.add_argument("--gpu-cmd", default=None,
                     help="command printing 'util_pct,power_w' per call")
    run.add_argument("--resume", action="store_true",
                     help="skip (backend,n_cw,iters,trial) tuples already in results.csv")

    rep = sub.add_parser("report", help="aggregate a campaign directory")
    rep.add_argument("--in", dest="in_dir", required=True)
    rep.add_argument("--out", dest="out_dir", required=True)
    rep.add_argument("--slot-ms", type=float, default=report.DEFAULT_SLOT_MS)
    rep.add_argument("--picks", default=",".join(str(p) for p in report.DEFAULT_PICKS))
    return p


def cmd_run(args) -> int:
    plan = bench.build_sweep(
        preset=args.preset,
        batches=_parse_int_list(args.batches, "batch") if args.batches else None,
        iters=_parse_int_list(args.iters, "iteration") if args.iters else None,
        inner_reps=args.inner_reps,
        trials=args.trials,
        backends=[b.strip() for b in args.backends.split(",") if b.strip()],
    )
    code = LdpcCode.build(args.k_info, args.n_coded)
    chan = phychain.ChannelConfig(
        es_over_n0_db=args.esn0_db, seed=args.seed, noiseless=args.noiseless,
    )
    params = codec.DecodeParams(
        iterations=plan.iteration_budgets[0],
        cn_rule=codec.CnRule(args.cn_rule),
        nms_alpha=args.nms_alpha,
    )
    backend_options = {}
    if args.lanes is not None:
        backend_options["par-cpu"] = {"lanes": args.lanes}
    cfgd = code.config.describe()
    print(f"code: K={cfgd['k_info']} E={cfgd['n_coded']} "
          f"{cfgd['bg_id']} Z={cfgd['z']} fillers={cfgd['num_filler']}")
    print(f"plan: {len(plan.batch_sizes)} batch sizes x "
          f"{len(plan.iteration_budgets)} iteration budgets x "
          f"{plan.trial_count} trials (M={plan.inner_reps}) "
          f"on {', '.join(plan.backends)}")
    result = bench.run_campaign(
        plan, code, chan, args.out,
        params_base=params,
        telemetry_on=args.telemetry == "on",
        telemetry_period_s=args.telemetry_period,
        gpu_cmd=args.gpu_cmd,
        resume=args.resume,
        backend_options=backend_options,
    )
    print(f"records: {len(result.records)} new, {result.skipped} skipped, "
          f"{len(result.failures)} failed -> {result.results_path}")
    for key, msg in result.failures:
        print(f"  failed {key}: {msg}", file=sys.stderr)
    return 1 if result.failures else 0


def cmd_report(args) -> int:
    picks = tuple(_parse_int_list(args.picks, "picks"))
    manifest = report.write_report(args.in_dir, args.out_dir, args.slot_ms, picks)
    print(f"report written to {args.out_dir} "
          f"({manifest['record_count']} records, backends: {', '.join(manifest['backends'])})")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        return cmd_report(args)
    except LdpcBenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
