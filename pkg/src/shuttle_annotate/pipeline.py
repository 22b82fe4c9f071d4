"""End-to-end labeling run: background model -> filters -> track selection.

For every post-burn-in frame the pipeline refines the foreground mask,
extracts candidate blobs, removes person-overlapping and lower-zone blobs,
ranks the survivors against the track, and stores the winner as an auto
label. Frames without an acceptable candidate land in the review queue with
a reason. Runs are deterministic: identical input and config produce a
byte-identical store regardless of worker count.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Protocol

import cv2
import numpy as np

from .background import BackgroundModel, refine
from .candidates import (
    PersonMaskMissingError,
    apply_vertical_filter,
    connected_components,
    remove_person_overlap,
)
from .config import PipelineConfig
from .frameio import Frame, FrameStream, frame_filename, load_sequence
from .labels import (
    FrameInfo,
    LabelRecord,
    LabelStatus,
    LabelStore,
    QueueReason,
)
from .tracking import TrackState, advance_track, score_candidates, select


class PersonMaskProvider(Protocol):
    """Adapter supplying per-frame person masks (True = person), or None."""

    def mask_for(self, frame: Frame) -> np.ndarray | None: ...


class PrecomputedMaskDir:
    """Reference adapter: per-frame 8-bit PNGs, nonzero = person, named
    like the frame files, in a sibling ``person_masks/`` directory."""

    def __init__(self, directory: Path | str):
        self.directory = Path(directory)

    def mask_for(self, frame: Frame) -> np.ndarray | None:
        path = self.directory / frame_filename(frame.meta.frame_index)
        if not path.exists():
            return None
        img = cv2.imread(str(path), cv2.IMREAD_GRAYSCALE)
        if img is None:
            return None
        return img > 0


class InMemoryMasks:
    """Adapter over already-materialized masks (synthetic sequences)."""

    def __init__(self, masks: dict[int, np.ndarray]):
        self.masks = masks

    def mask_for(self, frame: Frame) -> np.ndarray | None:
        return self.masks.get(frame.meta.frame_index)


class NoMasks:
    def mask_for(self, frame: Frame) -> np.ndarray | None:
        return None


@dataclass
class RunSummary:
    sequence_id: str = ""
    frames_total: int = 0
    burn_in: int = 0
    auto: int = 0
    queued: dict[str, int] = field(default_factory=dict)
    missing_indices: list[int] = field(default_factory=list)
    mask_missing_frames: list[int] = field(default_factory=list)
    aborted: bool = False
    error: str | None = None

    @property
    def post_burn_in(self) -> int:
        return self.frames_total - self.burn_in

    @property
    def queued_total(self) -> int:
        return sum(self.queued.values())

    def outcome_fractions(self) -> dict[str, float]:
        """Auto vs review split over labeled-eligible frames, the same shape
        as the post-review auto/adjusted/manual accounting."""
        n = self.post_burn_in
        if n == 0:
            return {"auto": 0.0, "review": 0.0}
        return {"auto": self.auto / n, "review": self.queued_total / n}

    def to_json(self) -> dict:
        return {
            "sequence_id": self.sequence_id,
            "frames_total": self.frames_total,
            "burn_in": self.burn_in,
            "auto": self.auto,
            "queued": dict(sorted(self.queued.items())),
            "outcome_fractions": self.outcome_fractions(),
            "missing_indices": self.missing_indices,
            "mask_missing_frames": self.mask_missing_frames,
            "aborted": self.aborted,
            "error": self.error,
        }

    def __str__(self) -> str:
        frac = self.outcome_fractions()
        lines = [
            f"sequence {self.sequence_id}: {self.frames_total} frames "
            f"({self.burn_in} burn-in)",
            f"  auto labels: {self.auto} ({frac['auto']:.1%} of post-burn-in)",
            f"  review queue: {self.queued_total} ({frac['review']:.1%})",
        ]
        for reason, n in sorted(self.queued.items()):
            lines.append(f"    {reason}: {n}")
        if self.missing_indices:
            lines.append(f"  missing frame indices: {self.missing_indices}")
        if self.aborted:
            lines.append(f"  ABORTED: {self.error}")
        return "\n".join(lines)


def _set_workers(workers: int) -> None:
    # per-pixel results are identical for any thread count, so clamping to
    # the numba pool size never changes output
    if workers > 0:
        import numba

        numba.set_num_threads(min(workers, numba.config.NUMBA_NUM_THREADS))


def run_pipeline(
    config: PipelineConfig,
    frames: Iterable[Frame] | FrameStream,
    person_masks: PersonMaskProvider,
    store: LabelStore,
    location: str = "",
    background_id: str = "",
) -> RunSummary:
    """Label one sequence into the store; returns the run summary.

    The store's clock is overridden so auto records carry the frame
    timestamp, keeping repeated runs byte-identical.
    """
    _set_workers(config.workers)
    dtype = np.float32 if config.precision == "float32" else np.float64
    summary = RunSummary()
    if isinstance(frames, FrameStream):
        summary.missing_indices = list(frames.missing_indices)
    store.acquire_lock("pipeline")
    model: BackgroundModel | None = None
    spatial = None
    track = TrackState()
    debug_dir = config.debug_mask_dir
    if debug_dir is not None:
        Path(debug_dir).mkdir(parents=True, exist_ok=True)
    try:
        for frame in frames:
            meta = frame.meta
            if model is None:
                model = BackgroundModel(meta.width, meta.height, config.gmm, dtype=dtype)
                spatial = config.spatial.resolve(meta.height)
                summary.sequence_id = meta.sequence_id
            if store.get(f"{meta.sequence_id}:{meta.frame_index:06d}") is not None:
                raise ValueError(
                    f"store already has records for {meta.sequence_id}; "
                    "rerun into a fresh store"
                )
            raw_mask = model.update(frame)
            summary.frames_total += 1
            store.register_frame(
                FrameInfo(
                    sequence_id=meta.sequence_id,
                    frame_index=meta.frame_index,
                    width=meta.width,
                    height=meta.height,
                    frame_path=frame.source_path,
                    location=location,
                    background_id=background_id,
                )
            )
            if debug_dir is not None:
                cv2.imwrite(
                    str(Path(debug_dir) / frame_filename(meta.frame_index)),
                    raw_mask.astype(np.uint8) * 255,
                )
            if summary.frames_total <= config.burn_in_frames:
                summary.burn_in += 1
                _store_record(
                    store,
                    frame,
                    status=LabelStatus.BURN_IN_EXCLUDED,
                    bbox=None,
                    score=None,
                    location=location,
                    background_id=background_id,
                )
                continue

            mask = refine(raw_mask, config.morph)
            blobs = connected_components(mask, meta.frame_index)
            person = person_masks.mask_for(frame)
            if person is None and spatial.missing_mask_policy == "skip-removal":
                summary.mask_missing_frames.append(meta.frame_index)
            try:
                blobs = remove_person_overlap(blobs, mask, person, spatial)
            except PersonMaskMissingError:
                key = _frame_key(meta)
                store.enqueue(key, QueueReason.PERSON_CONFLICT)
                summary.queued[QueueReason.PERSON_CONFLICT.value] = (
                    summary.queued.get(QueueReason.PERSON_CONFLICT.value, 0) + 1
                )
                summary.mask_missing_frames.append(meta.frame_index)
                track = advance_track(track, None, meta.frame_index, config.selector)
                continue
            blobs = apply_vertical_filter(blobs, spatial)
            scored = score_candidates(blobs, track, config.selector)
            detection = select(scored, config.selector)
            if detection is not None:
                _store_record(
                    store,
                    frame,
                    status=LabelStatus.AUTO,
                    bbox=detection.bbox_center_size,
                    score=detection.score.total,
                    location=location,
                    background_id=background_id,
                )
                summary.auto += 1
            else:
                reason = (
                    QueueReason.NO_CANDIDATE if not scored else QueueReason.LOW_SCORE
                )
                store.enqueue(_frame_key(meta), reason)
                summary.queued[reason.value] = summary.queued.get(reason.value, 0) + 1
            track = advance_track(track, detection, meta.frame_index, config.selector)
    except Exception as exc:  # preserve partial results, report the abort
        summary.aborted = True
        summary.error = f"{type(exc).__name__}: {exc}"
        raise
    finally:
        store.release_lock()
    return summary


def _frame_key(meta) -> str:
    return f"{meta.sequence_id}:{meta.frame_index:06d}"


def _store_record(store, frame, status, bbox, score, location, background_id) -> None:
    meta = frame.meta
    record = LabelRecord(
        sequence_id=meta.sequence_id,
        frame_index=meta.frame_index,
        width=meta.width,
        height=meta.height,
        status=status,
        bbox_px=bbox,
        pipeline_score=score,
        updated_at=meta.timestamp,
        editor="system",
        frame_path=frame.source_path,
        location=location,
        background_id=background_id,
    )
    store.put_initial(record)


def run_from_config(config: PipelineConfig, sequence_dir: Path | None = None) -> RunSummary:
    """CLI entry: open the sequence, mask dir, and store from config paths."""
    seq_dir = Path(sequence_dir or config.sequence_dir)
    if seq_dir is None:
        raise ValueError("no sequence directory configured")
    stream = load_sequence(seq_dir)
    mask_dir = config.person_mask_dir
    if mask_dir is None:
        sibling = seq_dir.parent / "person_masks"
        contained = seq_dir / "person_masks"
        mask_dir = sibling if sibling.exists() else contained
    provider: PersonMaskProvider = (
        PrecomputedMaskDir(mask_dir) if Path(mask_dir).exists() else NoMasks()
    )
    if config.store_dir is None:
        raise ValueError("no store directory configured")
    store = LabelStore(config.store_dir)
    info = stream.info
    return run_pipeline(
        config,
        stream,
        provider,
        store,
        location=info.location if info else "",
        background_id=info.background_id if info else "",
    )
