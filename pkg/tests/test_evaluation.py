import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_tally
from shuttle_annotate.evaluation import (
    EvalCounts,
    EvalReport,
    FrameMatch,
    MatchConfig,
    Prediction,
    SizeBin,
    accumulate,
    crossval_aggregate,
    evaluate_frames,
    match_frame,
    report_table,
    select_top1,
    size_binned_report,
    size_bins_csv,
    stream_top1,
    stratified_report,
)
from shuttle_annotate.labels import Difficulty, LabelRecord, LabelStatus

CFG = MatchConfig()


def _pred(frame="f", center=(100.0, 100.0), conf=0.9, size=(10.0, 10.0)):
    return Prediction(
        frame=frame, bbox_px=(center[0], center[1], size[0], size[1]), confidence=conf
    )


def _gt_record(center=(100.0, 100.0), size=(16.0, 25.0), difficulty=None, idx=0):
    return LabelRecord(
        sequence_id="s",
        frame_index=idx,
        width=1920,
        height=1200,
        status=LabelStatus.AUTO,
        bbox_px=(center[0], center[1], size[0], size[1]),
        difficulty=difficulty,
    )


# ---------------------------------------------------------------------------
# top-1 selection
# ---------------------------------------------------------------------------


def test_top1_picks_highest_confidence():
    preds = [_pred(conf=0.3), _pred(conf=0.9), _pred(conf=0.5)]
    assert select_top1(preds, CFG).confidence == 0.9


def test_top1_empty_is_none():
    assert select_top1([], CFG) is None


def test_top1_all_below_floor_is_none():
    cfg = MatchConfig(confidence_floor=0.5)
    assert select_top1([_pred(conf=0.3), _pred(conf=0.4)], cfg) is None


def test_top1_tie_keeps_first():
    a = _pred(center=(1.0, 1.0), conf=0.7)
    b = _pred(center=(2.0, 2.0), conf=0.7)
    assert select_top1([a, b], CFG) is a


# ---------------------------------------------------------------------------
# per-frame matching
# ---------------------------------------------------------------------------


def test_match_within_tau_is_tp():
    delta = match_frame(_pred(center=(100.0, 100.0)), _gt_record(center=(110.0, 115.0)), CFG)
    assert (delta.tp, delta.fp, delta.fn) == (1, 0, 0)
    assert delta.tp_center_offsets[0] == pytest.approx(math.sqrt(325))


def test_match_exactly_at_tau_is_tp():
    delta = match_frame(_pred(center=(0.0, 0.0)), (25.0, 0.0, 10.0, 10.0), CFG)
    assert delta.tp == 1


def test_far_prediction_counts_fp_and_fn():
    delta = match_frame(_pred(center=(0.0, 0.0)), (40.0, 0.0, 10.0, 10.0), CFG)
    assert (delta.tp, delta.fp, delta.fn) == (0, 1, 1)


def test_far_prediction_single_count_mode():
    cfg = MatchConfig(double_count_far=False)
    delta = match_frame(_pred(center=(0.0, 0.0)), (40.0, 0.0, 10.0, 10.0), cfg)
    assert (delta.tp, delta.fp, delta.fn) == (0, 1, 0)


def test_pred_without_gt_is_fp():
    delta = match_frame(_pred(), None, CFG)
    assert (delta.tp, delta.fp, delta.fn) == (0, 1, 0)


def test_gt_without_pred_is_fn():
    delta = match_frame(None, _gt_record(), CFG)
    assert (delta.tp, delta.fp, delta.fn) == (0, 0, 1)


def test_neither_is_all_zero():
    delta = match_frame(None, None, CFG)
    assert (delta.tp, delta.fp, delta.fn) == (0, 0, 0)


# ---------------------------------------------------------------------------
# accumulation
# ---------------------------------------------------------------------------


def test_accumulate_table_oracle_location_wise():
    # P = 53544/55200 = 0.970 exactly, R = 53544/97000 = 0.552 exactly
    counts = EvalCounts(tp=53544, fp=1656, fn=43456, tp_center_offsets=None)
    report = accumulate([counts])
    assert report.precision == pytest.approx(0.970, abs=1e-12)
    assert report.recall == pytest.approx(0.552, abs=1e-12)
    assert report.f1 == pytest.approx(0.703, abs=1e-3)


def test_accumulate_table_oracle_background_wise():
    counts = EvalCounts(tp=752706, fp=36294, fn=201294, tp_center_offsets=None)
    report = accumulate([counts])
    assert report.precision == pytest.approx(0.954, abs=1e-12)
    assert report.recall == pytest.approx(0.789, abs=1e-12)
    assert report.f1 == pytest.approx(0.864, abs=1e-3)


def test_pooled_differs_from_unweighted_mean():
    fold_a = EvalCounts(tp=8, fp=2, fn=2, tp_center_offsets=None)
    fold_b = EvalCounts(tp=1, fp=0, fn=9, tp_center_offsets=None)
    pooled = accumulate([fold_a, fold_b])
    assert pooled.precision == pytest.approx(9 / 11)
    assert pooled.recall == pytest.approx(9 / 20)
    mean_p = (8 / 10 + 1 / 1) / 2
    assert mean_p != pytest.approx(pooled.precision)


def test_offsets_length_invariant():
    with pytest.raises(ValueError):
        EvalCounts(tp=2, tp_center_offsets=[1.0])


def test_metrics_zero_when_denominators_zero():
    report = accumulate([EvalCounts()])
    assert report.precision == 0.0 and report.recall == 0.0 and report.f1 == 0.0


# ---------------------------------------------------------------------------
# strata
# ---------------------------------------------------------------------------


def test_all_easy_perfect_stratum():
    gt = {f"f{i}": _gt_record(difficulty=Difficulty.EASY, idx=i) for i in range(5)}
    preds = {k: [_pred(frame=k)] for k in gt}
    matches = evaluate_frames(gt, preds, CFG)
    report = stratified_report(matches)
    easy = report.strata["easy"]
    assert easy.precision == 1.0 and easy.recall == 1.0
    assert "medium" not in report.strata and "hard" not in report.strata


def test_hard_stratum_paper_shaped_counts():
    matches = []
    for i in range(14):
        matches.append(
            FrameMatch(frame=f"t{i}", delta=EvalCounts(tp=1, tp_center_offsets=[0.0]), difficulty=Difficulty.HARD)
        )
    for i in range(86):
        matches.append(
            FrameMatch(frame=f"m{i}", delta=EvalCounts(fn=1), difficulty=Difficulty.HARD)
        )
    for i in range(4):
        matches.append(
            FrameMatch(frame=f"x{i}", delta=EvalCounts(fp=1), difficulty=Difficulty.HARD)
        )
    report = stratified_report(matches)
    hard = report.strata["hard"]
    assert hard.recall == pytest.approx(0.140)
    assert hard.precision == pytest.approx(14 / 18, abs=1e-4)
    assert hard.precision == pytest.approx(0.778, abs=1e-3)


def test_strata_partition_overall():
    gt = {}
    preds = {}
    for i, diff in enumerate([Difficulty.EASY, Difficulty.MEDIUM, Difficulty.HARD] * 4):
        key = f"f{i}"
        gt[key] = _gt_record(difficulty=diff, idx=i)
        if i % 2 == 0:
            preds[key] = [_pred(frame=key)]
    report = stratified_report(evaluate_frames(gt, preds, CFG))
    totals = [0, 0, 0]
    for s in report.strata.values():
        totals[0] += s.counts.tp
        totals[1] += s.counts.fp
        totals[2] += s.counts.fn
    assert totals == [report.counts.tp, report.counts.fp, report.counts.fn]


def test_untagged_gt_flagged():
    gt = {"f0": _gt_record(difficulty=None)}
    report = stratified_report(evaluate_frames(gt, {"f0": [_pred(frame="f0")]}, CFG))
    assert report.counts.tp == 1
    assert report.warnings


# ---------------------------------------------------------------------------
# size bins
# ---------------------------------------------------------------------------


def test_geometric_mean_bin_assignment():
    gt = {"f": _gt_record(size=(16.0, 25.0))}
    matches = evaluate_frames(gt, {"f": [_pred(frame="f")]}, CFG)
    rows = size_binned_report(matches, SizeBin(bin_width=2.0, min_count=1))
    assert len(rows) == 1
    assert rows[0].lo == 20.0 and rows[0].hi == 22.0


def test_min_count_suppresses_metrics():
    matches = [
        FrameMatch(frame=f"f{i}", delta=EvalCounts(tp=1, tp_center_offsets=[0.0]), gt_size=10.0)
        for i in range(49)
    ]
    rows = size_binned_report(matches, SizeBin(bin_width=2.0, min_count=50))
    assert rows[0].correct == 49
    assert rows[0].recall is None and rows[0].precision is None
    rows = size_binned_report(matches, SizeBin(bin_width=2.0, min_count=49))
    assert rows[0].recall == 1.0


def test_fp_without_gt_excluded_from_bins():
    matches = [
        FrameMatch(frame="a", delta=EvalCounts(fp=1), gt_size=None),
        FrameMatch(frame="b", delta=EvalCounts(tp=1, tp_center_offsets=[0.0]), gt_size=10.0),
    ]
    rows = size_binned_report(matches, SizeBin(min_count=1))
    assert sum(r.total for r in rows) == 1


def test_recall_step_dataset():
    # all gt >= 20 px are TP, all < 15 px are FN
    matches = []
    for i in range(200):
        size = 8.0 + (i % 7)  # 8..14
        matches.append(FrameMatch(frame=f"s{i}", delta=EvalCounts(fn=1), gt_size=size))
    for i in range(200):
        size = 20.0 + (i % 10)
        matches.append(
            FrameMatch(frame=f"l{i}", delta=EvalCounts(tp=1, tp_center_offsets=[0.0]), gt_size=size)
        )
    rows = size_binned_report(matches, SizeBin(bin_width=2.0, min_count=10))
    for r in rows:
        if r.recall is None:
            continue
        if r.hi <= 15.0:
            assert r.recall <= 0.05
        if r.lo >= 20.0:
            assert r.recall >= 0.95
    csv_text = size_bins_csv(rows)
    assert csv_text.startswith("bin_lo,bin_hi,")


# ---------------------------------------------------------------------------
# cross-validation aggregation
# ---------------------------------------------------------------------------


def _fold(tp, fp, fn, name=""):
    return EvalReport.from_counts(
        EvalCounts(tp=tp, fp=fp, fn=fn, tp_center_offsets=None), name=name
    )


def test_single_fold_pooled_equals_fold():
    fold = _fold(10, 2, 3)
    combined = crossval_aggregate([fold])
    assert combined.pooled.precision == fold.precision
    assert combined.pooled.recall == fold.recall
    assert combined.unweighted_mean["precision"] == fold.precision


def test_equal_folds_pooled_equals_mean():
    folds = [_fold(10, 2, 3, "a"), _fold(10, 2, 3, "b")]
    combined = crossval_aggregate(folds)
    assert combined.pooled.precision == pytest.approx(combined.unweighted_mean["precision"])
    assert combined.pooled.recall == pytest.approx(combined.unweighted_mean["recall"])


def test_large_fold_dominates_pooled():
    small = _fold(90, 0, 10, "small")  # recall 0.9 on 100 gt
    large = _fold(1000, 0, 9000, "large")  # recall 0.1 on 10000 gt
    combined = crossval_aggregate([small, large])
    pooled_recall = (90 + 1000) / (100 + 10000)
    assert combined.pooled.recall == pytest.approx(pooled_recall)
    assert combined.unweighted_mean["recall"] == pytest.approx(0.5)
    assert abs(combined.pooled.recall - 0.5) > 0.3


def test_fold_without_counts_rejected():
    fold = _fold(1, 0, 0)
    fold.counts = None
    with pytest.raises(ValueError, match="raw counts"):
        crossval_aggregate([fold])


def test_pooled_mean_offset_weighted():
    a = EvalReport.from_counts(EvalCounts(tp=2, tp_center_offsets=[1.0, 3.0]))
    b = EvalReport.from_counts(EvalCounts(tp=1, tp_center_offsets=[10.0]))
    combined = crossval_aggregate([a, b])
    assert combined.pooled.mean_tp_offset == pytest.approx((1 + 3 + 10) / 3)


# ---------------------------------------------------------------------------
# streaming ingestion
# ---------------------------------------------------------------------------


def test_stream_top1_multiple_lines_per_frame():
    lines = [
        json.dumps({"frame": "f1", "x_c": 1, "y_c": 1, "w": 2, "h": 2, "confidence": 0.4}),
        json.dumps({"frame": "f1", "x_c": 5, "y_c": 5, "w": 2, "h": 2, "confidence": 0.8}),
        json.dumps({"frame": "f2", "x_c": 9, "y_c": 9, "w": 2, "h": 2, "confidence": 0.6}),
    ]
    best = stream_top1(lines)
    assert best["f1"].bbox_px[0] == 5
    assert best["f2"].confidence == 0.6


def test_stream_top1_rejects_malformed_line():
    with pytest.raises(ValueError, match="line 1"):
        stream_top1(['{"frame": "f1"}'])


# ---------------------------------------------------------------------------
# properties
# ---------------------------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 100_000), tau=st.floats(5.0, 60.0))
def test_matches_brute_force_tally(seed, tau):
    rng = np.random.default_rng(seed)
    cfg = MatchConfig(tau=tau)
    n_frames = int(rng.integers(1, 40))
    gt_boxes, gt_records, predictions = {}, {}, {}
    for i in range(n_frames):
        key = f"f{i}"
        if rng.random() < 0.8:
            center = rng.uniform(50, 500, 2)
            box = (float(center[0]), float(center[1]), 10.0, 10.0)
            gt_boxes[key] = box
            gt_records[key] = box
        else:
            gt_boxes[key] = None
            gt_records[key] = None
        preds = []
        for _ in range(int(rng.integers(0, 4))):
            c = rng.uniform(50, 500, 2)
            conf = float(rng.integers(0, 100)) / 100.0
            preds.append((float(c[0]), float(c[1]), 8.0, 8.0, conf))
        if preds:
            predictions[key] = preds
    expected = brute_tally(gt_boxes, predictions, tau=tau)
    preds_by_frame = {
        k: [Prediction(frame=k, bbox_px=p[:4], confidence=p[4]) for p in v]
        for k, v in predictions.items()
    }
    matches = evaluate_frames(gt_records, preds_by_frame, cfg)
    report = accumulate(m.delta for m in matches)
    assert (report.counts.tp, report.counts.fp, report.counts.fn) == (
        expected["tp"],
        expected["fp"],
        expected["fn"],
    )
    assert report.precision == pytest.approx(expected["precision"])
    assert report.recall == pytest.approx(expected["recall"])
    assert report.f1 == pytest.approx(expected["f1"])


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 100_000))
def test_count_conservation(seed):
    rng = np.random.default_rng(seed)
    gt, preds = {}, {}
    n_gt = 0
    n_pred = 0
    for i in range(30):
        key = f"f{i}"
        if rng.random() < 0.7:
            gt[key] = (float(rng.uniform(0, 500)), float(rng.uniform(0, 500)), 10.0, 10.0)
            n_gt += 1
        else:
            gt[key] = None
        if rng.random() < 0.7:
            preds[key] = [
                Prediction(
                    frame=key,
                    bbox_px=(float(rng.uniform(0, 500)), float(rng.uniform(0, 500)), 8.0, 8.0),
                    confidence=0.5,
                )
            ]
            n_pred += 1
    matches = evaluate_frames(gt, preds, CFG)
    report = accumulate(m.delta for m in matches)
    assert report.counts.tp + report.counts.fn == n_gt
    assert report.counts.tp + report.counts.fp == n_pred


def test_self_evaluation_identity():
    gt = {f"f{i}": _gt_record(center=(100.0 + i, 100.0), idx=i) for i in range(50)}
    preds = {
        k: [Prediction(frame=k, bbox_px=r.bbox_px, confidence=1.0)]
        for k, r in gt.items()
    }
    report = accumulate(m.delta for m in evaluate_frames(gt, preds, CFG))
    assert report.precision == 1.0 and report.recall == 1.0 and report.f1 == 1.0
    assert report.mean_tp_offset == 0.0


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_tau_monotonicity(seed):
    rng = np.random.default_rng(seed)
    gt = {}
    preds = {}
    for i in range(40):
        key = f"f{i}"
        gt[key] = (float(rng.uniform(0, 300)), float(rng.uniform(0, 300)), 10.0, 10.0)
        preds[key] = [
            Prediction(
                frame=key,
                bbox_px=(float(rng.uniform(0, 300)), float(rng.uniform(0, 300)), 8.0, 8.0),
                confidence=0.9,
            )
        ]
    recalls = []
    for tau in (5.0, 15.0, 30.0, 60.0, 120.0):
        report = accumulate(
            m.delta for m in evaluate_frames(gt, preds, MatchConfig(tau=tau))
        )
        recalls.append(report.recall)
    assert all(b >= a for a, b in zip(recalls, recalls[1:]))


def test_report_table_renders():
    gt = {"f0": _gt_record(difficulty=Difficulty.EASY)}
    report = stratified_report(evaluate_frames(gt, {"f0": [_pred(frame="f0")]}, CFG))
    text = report_table(report)
    assert "Overall" in text and "Easy" in text and "F1" in text
