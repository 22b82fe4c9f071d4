"""Temporal-consistency ranking and single-candidate selection.

Surviving blobs are scored against a constant-velocity prediction from the
track history blended with a blob-area score; at most one detection per
frame survives. Low-scoring frames go to manual review instead of getting a
dubious box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .candidates import Blob


@dataclass(frozen=True)
class SelectorConfig:
    temporal_weight: float = 0.7
    area_weight: float = 0.3
    distance_scale: float = 50.0  # pixels
    reference_area: float = 250.0  # pixels^2
    min_score: float = 0.2
    reset_gap: int = 10  # frames without detection before the track resets

    def __post_init__(self):
        if abs(self.temporal_weight + self.area_weight - 1.0) > 1e-9:
            raise ValueError("temporal_weight + area_weight must equal 1")
        if self.distance_scale <= 0 or self.reference_area <= 0:
            raise ValueError("distance_scale and reference_area must be positive")
        if not (0.0 <= self.min_score <= 1.0):
            raise ValueError("min_score must be in [0, 1]")
        if self.reset_gap < 1:
            raise ValueError("reset_gap must be >= 1")


@dataclass(frozen=True)
class TrackState:
    last_position: tuple[float, float] | None = None
    last_frame_index: int | None = None
    velocity: tuple[float, float] | None = None
    frames_since_detection: int = 0

    @property
    def has_history(self) -> bool:
        return self.last_position is not None

    def predict(self, frame_index: int) -> tuple[float, float] | None:
        """Constant-velocity extrapolation to frame_index; None w/o history."""
        if self.last_position is None or self.last_frame_index is None:
            return None
        if self.velocity is None:
            return self.last_position
        dt = frame_index - self.last_frame_index
        return (
            self.last_position[0] + self.velocity[0] * dt,
            self.last_position[1] + self.velocity[1] * dt,
        )


@dataclass(frozen=True)
class CandidateScore:
    blob: Blob
    temporal_score: float
    area_score: float
    total: float
    distance_to_prediction: float  # inf when there is no prediction


@dataclass(frozen=True)
class Detection:
    frame_index: int
    bbox: tuple[int, int, int, int]  # (x_min, y_min, x_max, y_max) inclusive
    centroid: tuple[float, float]
    score: CandidateScore

    @property
    def bbox_center_size(self) -> tuple[float, float, float, float]:
        x0, y0, x1, y1 = self.bbox
        return ((x0 + x1) / 2.0, (y0 + y1) / 2.0, float(x1 - x0 + 1), float(y1 - y0 + 1))


def score_candidates(
    blobs: list[Blob], track: TrackState, cfg: SelectorConfig
) -> list[CandidateScore]:
    """Score blobs and sort by total desc; ties by distance to the
    predicted position, then by blob id."""
    if not blobs:
        return []
    frame_index = blobs[0].frame_index
    if any(b.frame_index != frame_index for b in blobs):
        raise ValueError("all blobs must share one frame_index")
    if track.last_frame_index is not None and frame_index <= track.last_frame_index:
        raise ValueError(
            f"frame_index {frame_index} not beyond track history "
            f"({track.last_frame_index})"
        )
    predicted = track.predict(frame_index)
    scored = []
    for b in blobs:
        if predicted is None:
            temporal = 0.5
            dist = math.inf
        else:
            dist = math.hypot(b.centroid[0] - predicted[0], b.centroid[1] - predicted[1])
            temporal = math.exp(-dist / cfg.distance_scale)
        area = min(b.area, cfg.reference_area) / max(b.area, cfg.reference_area)
        total = cfg.temporal_weight * temporal + cfg.area_weight * area
        scored.append(
            CandidateScore(
                blob=b,
                temporal_score=temporal,
                area_score=area,
                total=total,
                distance_to_prediction=dist,
            )
        )
    scored.sort(key=lambda s: (-s.total, s.distance_to_prediction, s.blob.id))
    return scored


def select(scored: list[CandidateScore], cfg: SelectorConfig) -> Detection | None:
    """Top candidate if it clears the score gate, else None (manual review)."""
    if not scored:
        return None
    best = scored[0]
    if best.total < cfg.min_score:
        return None
    return Detection(
        frame_index=best.blob.frame_index,
        bbox=best.blob.bbox,
        centroid=best.blob.centroid,
        score=best,
    )


def advance_track(
    track: TrackState,
    detection: Detection | None,
    frame_index: int,
    cfg: SelectorConfig,
) -> TrackState:
    """Fold one frame's outcome into the track state."""
    if track.last_frame_index is not None and frame_index <= track.last_frame_index:
        raise ValueError(
            f"non-monotone frame_index {frame_index} (track at {track.last_frame_index})"
        )
    if detection is None:
        missed = track.frames_since_detection + 1
        if missed >= cfg.reset_gap:
            return TrackState()
        return replace(track, frames_since_detection=missed)
    position = detection.centroid
    velocity = None
    if track.last_position is not None and track.last_frame_index is not None:
        dt = frame_index - track.last_frame_index
        velocity = (
            (position[0] - track.last_position[0]) / dt,
            (position[1] - track.last_position[1]) / dt,
        )
    return TrackState(
        last_position=position,
        last_frame_index=frame_index,
        velocity=velocity,
        frames_since_detection=0,
    )
