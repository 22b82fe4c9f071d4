"""Center-distance detection metric with strata and cross-validation pooling.

A prediction matches a ground-truth box when the Euclidean distance between
box centers is at most tau (inclusive). Matching yields TP; a prediction
farther than tau from an existing ground truth counts as both FP and FN by
default (the detection is wrong and the object is missed), which keeps
count conservation exact; ``double_count_far=False`` switches to the
FP-only reading. Metrics are always derived once from pooled counts;
per-fold unweighted means are reported alongside for comparison.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .labels import BBox, Difficulty, LabelRecord


@dataclass(frozen=True)
class Prediction:
    frame: str
    bbox_px: BBox
    confidence: float

    def __post_init__(self):
        if not (0.0 <= self.confidence <= 1.0):
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")


@dataclass(frozen=True)
class MatchConfig:
    tau: float = 25.0  # pixels, inclusive
    confidence_floor: float = 0.0
    double_count_far: bool = True

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        if not (0.0 <= self.confidence_floor <= 1.0):
            raise ValueError("confidence_floor must be in [0, 1]")


@dataclass
class EvalCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tp_center_offsets: list[float] | None = field(default_factory=list)

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn) < 0:
            raise ValueError("counts must be non-negative")
        if self.tp_center_offsets is not None and len(self.tp_center_offsets) != self.tp:
            raise ValueError(
                f"offset list length {len(self.tp_center_offsets)} != tp {self.tp}"
            )

    def add(self, other: "EvalCounts") -> "EvalCounts":
        offsets = None
        if self.tp_center_offsets is not None and other.tp_center_offsets is not None:
            offsets = self.tp_center_offsets + other.tp_center_offsets
        return EvalCounts(
            tp=self.tp + other.tp,
            fp=self.fp + other.fp,
            fn=self.fn + other.fn,
            tp_center_offsets=offsets,
        )

    @property
    def mean_tp_offset(self) -> float | None:
        if not self.tp_center_offsets:
            return None
        return sum(self.tp_center_offsets) / len(self.tp_center_offsets)

    def to_json(self) -> dict:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "mean_tp_offset": self.mean_tp_offset,
        }


def precision_recall_f1(counts: EvalCounts) -> tuple[float, float, float]:
    p = counts.tp / (counts.tp + counts.fp) if counts.tp + counts.fp else 0.0
    r = counts.tp / (counts.tp + counts.fn) if counts.tp + counts.fn else 0.0
    f1 = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f1


@dataclass
class EvalReport:
    counts: EvalCounts
    precision: float
    recall: float
    f1: float
    mean_tp_offset: float | None
    strata: dict[str, "EvalReport"] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    name: str = ""

    @classmethod
    def from_counts(cls, counts: EvalCounts, name: str = "") -> "EvalReport":
        p, r, f1 = precision_recall_f1(counts)
        return cls(
            counts=counts,
            precision=p,
            recall=r,
            f1=f1,
            mean_tp_offset=counts.mean_tp_offset,
            name=name,
        )

    def to_json(self) -> dict:
        obj = {
            "name": self.name,
            "counts": self.counts.to_json(),
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "mean_tp_offset": self.mean_tp_offset,
        }
        if self.strata:
            obj["strata"] = {k: v.to_json() for k, v in self.strata.items()}
        if self.warnings:
            obj["warnings"] = self.warnings
        return obj


# ---------------------------------------------------------------------------
# Per-frame matching
# ---------------------------------------------------------------------------


def select_top1(preds: list[Prediction], cfg: MatchConfig) -> Prediction | None:
    """Highest-confidence prediction at or above the floor; first wins ties."""
    best: Prediction | None = None
    for p in preds:
        if p.confidence < cfg.confidence_floor:
            continue
        if best is None or p.confidence > best.confidence:
            best = p
    return best


def center_distance(a: BBox, b: BBox) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def match_frame(
    pred: Prediction | None, gt: LabelRecord | BBox | None, cfg: MatchConfig
) -> EvalCounts:
    """Tally one frame. gt may be a LabelRecord (its box is used) or a raw box."""
    gt_box: BBox | None
    if gt is None:
        gt_box = None
    elif isinstance(gt, LabelRecord):
        gt_box = gt.bbox_px
    else:
        gt_box = gt
    if pred is None and gt_box is None:
        return EvalCounts()
    if pred is None:
        return EvalCounts(fn=1)
    if gt_box is None:
        return EvalCounts(fp=1)
    dist = center_distance(pred.bbox_px, gt_box)
    if dist <= cfg.tau:
        return EvalCounts(tp=1, tp_center_offsets=[dist])
    if cfg.double_count_far:
        return EvalCounts(fp=1, fn=1)
    return EvalCounts(fp=1)


@dataclass(frozen=True)
class FrameMatch:
    """One evaluated frame: its count delta plus stratification keys."""

    frame: str
    delta: EvalCounts
    difficulty: Difficulty | None = None
    gt_size: float | None = None  # geometric mean sqrt(w*h) of the gt box
    fold: str | None = None


def accumulate(deltas: Iterable[EvalCounts], name: str = "") -> EvalReport:
    """Sum count deltas, then derive metrics once from the pooled counts."""
    total = EvalCounts()
    for d in deltas:
        total = total.add(d)
    return EvalReport.from_counts(total, name=name)


def evaluate_frames(
    gt_by_frame: Mapping[str, LabelRecord | BBox | None],
    preds_by_frame: Mapping[str, list[Prediction] | Prediction | None],
    cfg: MatchConfig | None = None,
    fold: str | None = None,
) -> list[FrameMatch]:
    """Match every ground-truth frame (union with predicted frames)."""
    cfg = cfg or MatchConfig()
    matches = []
    keys = sorted(set(gt_by_frame) | set(preds_by_frame))
    for key in keys:
        gt = gt_by_frame.get(key)
        preds = preds_by_frame.get(key)
        if isinstance(preds, Prediction):
            top = preds if preds.confidence >= cfg.confidence_floor else None
        else:
            top = select_top1(preds or [], cfg)
        delta = match_frame(top, gt, cfg)
        difficulty = gt.difficulty if isinstance(gt, LabelRecord) else None
        gt_box = gt.bbox_px if isinstance(gt, LabelRecord) else gt
        size = math.sqrt(gt_box[2] * gt_box[3]) if gt_box is not None else None
        matches.append(
            FrameMatch(frame=key, delta=delta, difficulty=difficulty, gt_size=size, fold=fold)
        )
    return matches


# ---------------------------------------------------------------------------
# Strata
# ---------------------------------------------------------------------------


def stratified_report(matches: Iterable[FrameMatch], name: str = "") -> EvalReport:
    """Overall pooled report plus one independent stratum per difficulty."""
    matches = list(matches)
    report = accumulate((m.delta for m in matches), name=name)
    untagged_with_gt = 0
    for diff in Difficulty:
        subset = [m for m in matches if m.difficulty == diff]
        if subset:
            report.strata[diff.value] = accumulate(
                (m.delta for m in subset), name=diff.value
            )
    for m in matches:
        if m.difficulty is None and m.gt_size is not None:
            untagged_with_gt += 1
    if untagged_with_gt:
        report.warnings.append(
            f"{untagged_with_gt} ground-truth boxes have no difficulty tag; "
            "they count in the overall totals only"
        )
    return report


@dataclass(frozen=True)
class SizeBin:
    bin_width: float = 2.0
    min_count: int = 50

    def __post_init__(self):
        if self.bin_width <= 0:
            raise ValueError("bin_width must be positive")
        if self.min_count < 0:
            raise ValueError("min_count must be non-negative")


@dataclass
class SizeBinRow:
    bin_index: int
    lo: float
    hi: float
    correct: int  # tp
    incorrect: int  # fn plus far predictions on a gt box
    tp: int
    fn: int
    fp_with_gt: int
    recall: float | None
    precision: float | None

    @property
    def total(self) -> int:
        return self.correct + self.incorrect

    def to_json(self) -> dict:
        return {
            "bin": [self.lo, self.hi],
            "correct": self.correct,
            "incorrect": self.incorrect,
            "recall": self.recall,
            "precision": self.precision,
        }


def size_binned_report(
    matches: Iterable[FrameMatch], bins: SizeBin | None = None
) -> list[SizeBinRow]:
    """Histogram and per-bin metrics over gt box side length sqrt(w*h).

    Frames whose delta has no ground-truth box (pure false positives) carry
    no object size and are excluded. Bins below min_count keep their counts
    but report no metrics.
    """
    bins = bins or SizeBin()
    grouped: dict[int, list[FrameMatch]] = {}
    for m in matches:
        if m.gt_size is None:
            continue
        grouped.setdefault(int(m.gt_size // bins.bin_width), []).append(m)
    rows = []
    for idx in sorted(grouped):
        subset = grouped[idx]
        tp = sum(m.delta.tp for m in subset)
        fn = sum(m.delta.fn for m in subset)
        fp = sum(m.delta.fp for m in subset)
        correct = tp
        incorrect = len(subset) - tp
        suppress = len(subset) < bins.min_count
        recall = None if suppress or tp + fn == 0 else tp / (tp + fn)
        precision = None if suppress or tp + fp == 0 else tp / (tp + fp)
        rows.append(
            SizeBinRow(
                bin_index=idx,
                lo=idx * bins.bin_width,
                hi=(idx + 1) * bins.bin_width,
                correct=correct,
                incorrect=incorrect,
                tp=tp,
                fn=fn,
                fp_with_gt=fp,
                recall=recall,
                precision=precision,
            )
        )
    return rows


def size_bins_csv(rows: list[SizeBinRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(
        ["bin_lo", "bin_hi", "correct", "incorrect", "recall", "precision"]
    )
    for r in rows:
        writer.writerow(
            [
                f"{r.lo:g}",
                f"{r.hi:g}",
                r.correct,
                r.incorrect,
                "" if r.recall is None else f"{r.recall:.6f}",
                "" if r.precision is None else f"{r.precision:.6f}",
            ]
        )
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Cross-validation aggregation
# ---------------------------------------------------------------------------


@dataclass
class CrossValReport:
    pooled: EvalReport  # subset-size-weighted accumulation; the primary result
    unweighted_mean: dict[str, float]
    per_fold: list[EvalReport]

    def to_json(self) -> dict:
        return {
            "pooled": self.pooled.to_json(),
            "unweighted_mean": self.unweighted_mean,
            "per_fold": [r.to_json() for r in self.per_fold],
        }


def crossval_aggregate(fold_reports: list[EvalReport]) -> CrossValReport:
    """Pool raw counts across folds (primary) next to unweighted fold means."""
    if not fold_reports:
        raise ValueError("no fold reports to aggregate")
    for r in fold_reports:
        if r.counts is None:
            raise ValueError(
                f"fold {r.name!r} carries no raw counts; derived metrics alone "
                "are insufficient for pooled aggregation"
            )
    total = EvalCounts(tp_center_offsets=None)
    offset_sum = 0.0
    offset_n = 0
    for r in fold_reports:
        total = total.add(
            EvalCounts(
                tp=r.counts.tp,
                fp=r.counts.fp,
                fn=r.counts.fn,
                tp_center_offsets=None,
            )
        )
        if r.mean_tp_offset is not None:
            offset_sum += r.mean_tp_offset * r.counts.tp
            offset_n += r.counts.tp
    pooled = EvalReport.from_counts(total, name="pooled")
    if offset_n:
        pooled.mean_tp_offset = offset_sum / offset_n
    n = len(fold_reports)
    unweighted = {
        "precision": sum(r.precision for r in fold_reports) / n,
        "recall": sum(r.recall for r in fold_reports) / n,
        "f1": sum(r.f1 for r in fold_reports) / n,
    }
    return CrossValReport(
        pooled=pooled, unweighted_mean=unweighted, per_fold=list(fold_reports)
    )


# ---------------------------------------------------------------------------
# Prediction ingestion and report rendering
# ---------------------------------------------------------------------------


def stream_top1(
    lines: Iterable[str], cfg: MatchConfig | None = None
) -> dict[str, Prediction]:
    """Stream prediction JSONL, keeping only the per-frame top-1 survivor.

    Multiple lines per frame are allowed anywhere in the file; only one
    prediction per frame is held in memory.
    """
    cfg = cfg or MatchConfig()
    best: dict[str, Prediction] = {}
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
            pred = Prediction(
                frame=str(obj["frame"]),
                bbox_px=(
                    float(obj["x_c"]),
                    float(obj["y_c"]),
                    float(obj["w"]),
                    float(obj["h"]),
                ),
                confidence=float(obj["confidence"]),
            )
        except (KeyError, ValueError, json.JSONDecodeError) as exc:
            raise ValueError(f"predictions line {lineno}: {exc}") from None
        if pred.confidence < cfg.confidence_floor:
            continue
        cur = best.get(pred.frame)
        if cur is None or pred.confidence > cur.confidence:
            best[pred.frame] = pred
    return best


def load_predictions(path, cfg: MatchConfig | None = None) -> dict[str, Prediction]:
    with open(path, "r", encoding="utf-8") as f:
        return stream_top1(f, cfg)


def report_table(report: EvalReport) -> str:
    """Plain-text table: metrics as rows, overall plus difficulty strata."""
    columns = ["Overall"] + [
        d.value.capitalize() for d in Difficulty if d.value in report.strata
    ]
    getters = [report] + [report.strata[d.value] for d in Difficulty if d.value in report.strata]
    lines = []
    header = f"{'Metric':<12}" + "".join(f"{c:>10}" for c in columns)
    lines.append(header)
    lines.append("-" * len(header))
    for metric in ("f1", "precision", "recall"):
        row = f"{metric.capitalize() if metric != 'f1' else 'F1':<12}"
        for rep in getters:
            row += f"{getattr(rep, metric):>10.3f}"
        lines.append(row)
    c = report.counts
    lines.append(f"\nCounts: tp={c.tp} fp={c.fp} fn={c.fn}")
    if report.mean_tp_offset is not None:
        lines.append(f"Mean TP center offset: {report.mean_tp_offset:.2f} px")
    for w in report.warnings:
        lines.append(f"Warning: {w}")
    return "\n".join(lines) + "\n"
