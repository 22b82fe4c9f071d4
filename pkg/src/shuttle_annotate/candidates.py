"""Connected-component extraction and spatial candidate filtering.

Foreground blobs are 8-connected components of the refined mask. Two
filters remove non-object candidates: components touching the (dilated)
person mask, and components whose centroid falls in the lower exclusion
zone where pedestrians are too small for the segmentation model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.ndimage as ndi

from .background import dilate_mask

_STRUCTURE_8 = np.ones((3, 3), dtype=np.int32)


class PersonMaskMissingError(Exception):
    """Raised under the defer-frame policy when a frame has no person mask."""

    def __init__(self, frame_index: int):
        super().__init__(f"no person mask for frame {frame_index}; frame deferred")
        self.frame_index = frame_index


@dataclass(frozen=True)
class Blob:
    """One connected foreground component."""

    id: int
    area: int
    bbox: tuple[int, int, int, int]  # (x_min, y_min, x_max, y_max) inclusive
    centroid: tuple[float, float]  # (x, y), mean of member pixel coordinates
    frame_index: int = 0

    @property
    def width(self) -> int:
        return self.bbox[2] - self.bbox[0] + 1

    @property
    def height(self) -> int:
        return self.bbox[3] - self.bbox[1] + 1


@dataclass(frozen=True)
class SpatialFilterConfig:
    y_threshold: float  # centroid rows strictly below (greater than) this are excluded
    person_mask_dilation: int = 5
    missing_mask_policy: str = "defer-frame"  # or "skip-removal"

    DEFAULT_Y_FRACTION = 0.83

    def __post_init__(self):
        if self.y_threshold < 0:
            raise ValueError("y_threshold must be non-negative")
        if self.person_mask_dilation < 0:
            raise ValueError("person_mask_dilation must be non-negative")
        if self.missing_mask_policy not in ("defer-frame", "skip-removal"):
            raise ValueError(f"unknown policy: {self.missing_mask_policy}")

    @classmethod
    def for_frame_height(
        cls,
        height: int,
        fraction: float = DEFAULT_Y_FRACTION,
        person_mask_dilation: int = 5,
        missing_mask_policy: str = "defer-frame",
    ) -> "SpatialFilterConfig":
        return cls(
            y_threshold=fraction * height,
            person_mask_dilation=person_mask_dilation,
            missing_mask_policy=missing_mask_policy,
        )


def label_components(mask: np.ndarray) -> tuple[np.ndarray, int]:
    """8-connected labeling with ids 1..n assigned in raster-scan order of
    each component's first pixel (0 = background)."""
    labels, n = ndi.label(mask, structure=_STRUCTURE_8)
    if n == 0:
        return labels.astype(np.int32), 0
    flat = labels.ravel()
    uniq, first = np.unique(flat, return_index=True)
    keep = uniq != 0
    uniq, first = uniq[keep], first[keep]
    order = np.argsort(first)
    remap = np.zeros(n + 1, dtype=np.int32)
    remap[uniq[order]] = np.arange(1, len(uniq) + 1, dtype=np.int32)
    return remap[labels], n


def connected_components(mask: np.ndarray, frame_index: int = 0) -> list[Blob]:
    """Decompose a foreground mask into blobs with exact statistics."""
    labels, n = label_components(mask)
    if n == 0:
        return []
    flat = labels.ravel()
    areas = np.bincount(flat, minlength=n + 1)
    h, w = mask.shape
    ys, xs = np.nonzero(labels)
    lab = labels[ys, xs]
    sum_x = np.bincount(lab, weights=xs, minlength=n + 1)
    sum_y = np.bincount(lab, weights=ys, minlength=n + 1)
    x_min = np.full(n + 1, w, dtype=np.int64)
    x_max = np.full(n + 1, -1, dtype=np.int64)
    y_min = np.full(n + 1, h, dtype=np.int64)
    y_max = np.full(n + 1, -1, dtype=np.int64)
    np.minimum.at(x_min, lab, xs)
    np.maximum.at(x_max, lab, xs)
    np.minimum.at(y_min, lab, ys)
    np.maximum.at(y_max, lab, ys)
    blobs = []
    for i in range(1, n + 1):
        a = int(areas[i])
        blobs.append(
            Blob(
                id=i,
                area=a,
                bbox=(int(x_min[i]), int(y_min[i]), int(x_max[i]), int(y_max[i])),
                centroid=(float(sum_x[i] / a), float(sum_y[i] / a)),
                frame_index=frame_index,
            )
        )
    return blobs


def remove_person_overlap(
    blobs: list[Blob],
    mask: np.ndarray,
    person: np.ndarray | None,
    cfg: SpatialFilterConfig,
) -> list[Blob]:
    """Drop blobs with any member pixel inside the dilated person mask.

    ``person`` may be None: under skip-removal all blobs pass; under
    defer-frame a PersonMaskMissingError routes the frame to manual review.
    """
    if person is None:
        if cfg.missing_mask_policy == "skip-removal":
            return list(blobs)
        frame_index = blobs[0].frame_index if blobs else -1
        raise PersonMaskMissingError(frame_index)
    if person.shape != mask.shape:
        raise ValueError(
            f"person mask shape {person.shape} does not match frame {mask.shape}"
        )
    if not blobs:
        return []
    dilated = dilate_mask(person, cfg.person_mask_dilation)
    labels, _ = label_components(mask)
    hit = np.unique(labels[dilated & (labels > 0)])
    hit_set = set(int(v) for v in hit)
    return [b for b in blobs if b.id not in hit_set]


def apply_vertical_filter(blobs: list[Blob], cfg: SpatialFilterConfig) -> list[Blob]:
    """Drop blobs whose centroid row is strictly below the threshold row
    (rows grow downward; the excluded zone is the lower image region)."""
    return [b for b in blobs if b.centroid[1] <= cfg.y_threshold]
