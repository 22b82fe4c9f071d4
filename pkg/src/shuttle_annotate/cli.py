"""Command-line entry points: run / serve / eval / export / bench."""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .config import PipelineConfig, load_config
from .evaluation import (
    MatchConfig,
    SizeBin,
    crossval_aggregate,
    evaluate_frames,
    load_predictions,
    report_table,
    size_binned_report,
    size_bins_csv,
    stratified_report,
)
from .labels import (
    Difficulty,
    LabelRecord,
    LabelStatus,
    LabelStore,
    export_split,
    holdout_split_spec,
)


def _cmd_run(args) -> int:
    from .pipeline import run_from_config

    config = load_config(args.config) if args.config else PipelineConfig()
    if args.store:
        config.store_dir = Path(args.store)
    if args.debug_masks:
        config.debug_mask_dir = Path(config.store_dir or ".") / "debug" / "masks"
    summary = run_from_config(config, Path(args.sequence) if args.sequence else None)
    print(summary)
    return 0


def _cmd_serve(args) -> int:
    from .service import serve

    serve(
        store_dir=Path(args.store),
        port=args.port,
        host=args.host,
        token=args.token,
        ui_dir=Path(args.ui) if args.ui else None,
    )
    return 0


def _load_gt_manifest(path: Path) -> dict[str, LabelRecord]:
    records: dict[str, LabelRecord] = {}
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            rec = LabelRecord.from_json(json.loads(line))
            records[rec.key] = rec
    return records


def _cmd_eval(args) -> int:
    cfg = MatchConfig(
        tau=args.tau,
        confidence_floor=args.confidence_floor,
        double_count_far=not args.single_count,
    )
    gt_records = _load_gt_manifest(Path(args.gt))
    # burn-in frames never enter the evaluation; no_object frames count as
    # ground-truth-absent
    gt_by_frame = {
        k: (r if r.bbox_px is not None else None)
        for k, r in gt_records.items()
        if r.status != LabelStatus.BURN_IN_EXCLUDED
    }
    preds = load_predictions(Path(args.pred), cfg)

    if args.by == "fold":
        folds: dict[str, dict] = {}
        for key, gt in gt_by_frame.items():
            rec = gt_records[key]
            folds.setdefault(rec.background_id or "unknown", {})[key] = gt
        fold_reports = []
        for fold_name in sorted(folds):
            subset = folds[fold_name]
            matches = evaluate_frames(
                subset, {k: preds[k] for k in subset if k in preds}, cfg, fold=fold_name
            )
            fold_reports.append(stratified_report(matches, name=fold_name))
        combined = crossval_aggregate(fold_reports)
        print(report_table(combined.pooled))
        print("Unweighted fold means: " + json.dumps(combined.unweighted_mean))
        output = combined.to_json()
    else:
        matches = evaluate_frames(gt_by_frame, preds, cfg)
        report = stratified_report(matches)
        output = report.to_json()
        print(report_table(report))
        if args.by == "size":
            rows = size_binned_report(
                matches, SizeBin(bin_width=args.bin_width, min_count=args.min_count)
            )
            output["size_bins"] = [r.to_json() for r in rows]
            if args.csv:
                Path(args.csv).write_text(size_bins_csv(rows))
                print(f"per-bin histogram written to {args.csv}")
    if args.json:
        Path(args.json).write_text(json.dumps(output, indent=2))
        print(f"report written to {args.json}")
    return 0


def _cmd_export(args) -> int:
    store = LabelStore(Path(args.store))
    spec = holdout_split_spec(store, hold_out=args.hold_out, by=args.split_by)
    difficulties = None
    if args.exclude_hard:
        difficulties = {Difficulty.EASY, Difficulty.MEDIUM}
    counts = export_split(
        store, spec, Path(args.out), difficulties=difficulties, hold_out=args.hold_out
    )
    print(json.dumps(counts, indent=2, sort_keys=True))
    return 0


def benchmark_throughput(
    width: int = 1920,
    height: int = 1200,
    frames: int = 60,
    threads: int = 0,
    precision: str = "float32",
    seed: int = 7,
) -> dict:
    """Measure update+refine throughput on a synthetic sequence."""
    from .background import BackgroundModel, GmmParams, MorphConfig, refine

    if threads > 0:
        import numba

        numba.set_num_threads(threads)
    dtype = np.float32 if precision == "float32" else np.float64
    rng = np.random.default_rng(seed)
    base = rng.integers(0, 256, (height, width, 3), dtype=np.uint8)
    # pre-render noisy frames so only update+refine is timed
    pool = [
        np.clip(
            base.astype(np.int16) + rng.integers(-4, 5, base.shape, dtype=np.int16),
            0,
            255,
        ).astype(np.uint8)
        for _ in range(8)
    ]
    model = BackgroundModel(width, height, GmmParams(), dtype=dtype)
    morph = MorphConfig()
    for i in range(3):  # warm up state and JIT
        refine(model.update(pool[i % len(pool)]), morph)
    t0 = time.perf_counter()
    for i in range(frames):
        refine(model.update(pool[i % len(pool)]), morph)
    elapsed = time.perf_counter() - t0
    return {
        "width": width,
        "height": height,
        "frames": frames,
        "seconds": elapsed,
        "fps": frames / elapsed,
        "precision": precision,
    }


def _cmd_bench(args) -> int:
    result = benchmark_throughput(
        width=args.width,
        height=args.height,
        frames=args.frames,
        threads=args.threads,
        precision=args.precision,
    )
    print(
        f"{result['frames']} frames at {result['width']}x{result['height']} "
        f"({result['precision']}): {result['seconds']:.2f} s -> {result['fps']:.1f} fps"
    )
    return 0 if result["fps"] >= 30.0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="annotate",
        description="Semi-automatic labeling pipeline, review service, and evaluator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="label a sequence into a store")
    p_run.add_argument("--config", help="pipeline TOML config")
    p_run.add_argument("--sequence", help="frame directory (overrides config)")
    p_run.add_argument("--store", help="label store directory (overrides config)")
    p_run.add_argument("--debug-masks", action="store_true", help="dump foreground masks")
    p_run.set_defaults(func=_cmd_run)

    p_serve = sub.add_parser("serve", help="serve the review HTTP API")
    p_serve.add_argument("--store", required=True)
    p_serve.add_argument("--port", type=int, default=8750)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--token", default=None, help="optional shared token")
    p_serve.add_argument("--ui", default=None, help="static frontend directory")
    p_serve.set_defaults(func=_cmd_serve)

    p_eval = sub.add_parser("eval", help="evaluate predictions against a manifest")
    p_eval.add_argument("--gt", required=True, help="manifest.jsonl with ground truth")
    p_eval.add_argument("--pred", required=True, help="predictions JSONL")
    p_eval.add_argument("--tau", type=float, default=25.0)
    p_eval.add_argument("--confidence-floor", type=float, default=0.0)
    p_eval.add_argument("--by", choices=["difficulty", "size", "fold"], default="difficulty")
    p_eval.add_argument("--bin-width", type=float, default=2.0)
    p_eval.add_argument("--min-count", type=int, default=50)
    p_eval.add_argument(
        "--single-count",
        action="store_true",
        help="count a far-off prediction as FP only, not FP+FN",
    )
    p_eval.add_argument("--json", help="write the full report as JSON")
    p_eval.add_argument("--csv", help="write the per-bin histogram as CSV")
    p_eval.set_defaults(func=_cmd_eval)

    p_export = sub.add_parser("export", help="export a cross-validation split")
    p_export.add_argument("--store", required=True)
    p_export.add_argument("--split-by", choices=["background", "location"], required=True)
    p_export.add_argument("--hold-out", required=True)
    p_export.add_argument("--out", required=True)
    p_export.add_argument("--exclude-hard", action="store_true")
    p_export.set_defaults(func=_cmd_export)

    p_bench = sub.add_parser("bench", help="measure update+refine throughput")
    p_bench.add_argument("--width", type=int, default=1920)
    p_bench.add_argument("--height", type=int, default=1200)
    p_bench.add_argument("--frames", type=int, default=60)
    p_bench.add_argument("--threads", type=int, default=0)
    p_bench.add_argument("--precision", choices=["float32", "float64"], default="float32")
    p_bench.set_defaults(func=_cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
