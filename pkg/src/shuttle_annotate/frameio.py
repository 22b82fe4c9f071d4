"""Frame sequence loading, writing, and synthetic test-sequence generation.

Sequences live on disk as directories of zero-padded 6-digit image files
(``000000.png`` ...) with an optional ``sequence.json`` sidecar carrying
recording metadata. The synthesizer renders scripted scenes (static
background, moving object, moving person rectangle) together with exact
ground truth, which the test suite and the end-to-end acceptance run use
as an oracle for the whole labeling pipeline.
"""

from __future__ import annotations

import json
import math
import queue
import re
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import cv2
import numpy as np

DEFAULT_FPS = 60.0
DEFAULT_WIDTH = 1920
DEFAULT_HEIGHT = 1200

_FRAME_FILE_RE = re.compile(r"^(\d{6})\.(png|jpg|jpeg)$", re.IGNORECASE)


class FrameDecodeError(Exception):
    """A frame file exists but could not be decoded."""

    def __init__(self, path: Path):
        super().__init__(f"cannot decode frame file: {path}")
        self.path = Path(path)


class SequenceError(Exception):
    """Fatal inconsistency within a sequence (e.g. mixed frame dimensions)."""


@dataclass(frozen=True)
class FrameMeta:
    """Per-frame metadata; width/height/fps are shared across a sequence."""

    sequence_id: str
    frame_index: int
    width: int
    height: int
    fps: float = DEFAULT_FPS

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("frame dimensions must be positive")
        if self.frame_index < 0:
            raise ValueError("frame_index must be non-negative")
        if self.fps <= 0:
            raise ValueError("fps must be positive")

    @property
    def timestamp(self) -> float:
        return self.frame_index / self.fps


@dataclass
class Frame:
    """One decoded frame: metadata plus (height, width, 3) uint8 pixels."""

    meta: FrameMeta
    pixels: np.ndarray
    source_path: str | None = None

    def __post_init__(self):
        px = self.pixels
        if px.dtype != np.uint8:
            raise ValueError("pixels must be uint8")
        if px.shape != (self.meta.height, self.meta.width, 3):
            raise ValueError(
                f"pixel buffer shape {px.shape} does not match meta "
                f"{self.meta.height}x{self.meta.width}x3"
            )


@dataclass(frozen=True)
class SequenceInfo:
    """Contents of the ``sequence.json`` sidecar."""

    sequence_id: str
    fps: float = DEFAULT_FPS
    width: int | None = None
    height: int | None = None
    location: str = ""
    background_id: str = ""

    def to_json(self) -> dict:
        return {
            "sequence_id": self.sequence_id,
            "fps": self.fps,
            "width": self.width,
            "height": self.height,
            "location": self.location,
            "background_id": self.background_id,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SequenceInfo":
        return cls(
            sequence_id=obj["sequence_id"],
            fps=float(obj.get("fps", DEFAULT_FPS)),
            width=obj.get("width"),
            height=obj.get("height"),
            location=obj.get("location", ""),
            background_id=obj.get("background_id", ""),
        )


def read_sequence_info(directory: Path | str) -> SequenceInfo | None:
    path = Path(directory) / "sequence.json"
    if not path.exists():
        return None
    with open(path, "r", encoding="utf-8") as f:
        return SequenceInfo.from_json(json.load(f))


def frame_filename(frame_index: int, ext: str = "png") -> str:
    return f"{frame_index:06d}.{ext}"


def list_frame_files(directory: Path | str) -> list[tuple[int, Path]]:
    """All frame files in a directory as (index, path), sorted by index."""
    directory = Path(directory)
    found = []
    for p in sorted(directory.iterdir()):
        m = _FRAME_FILE_RE.match(p.name)
        if m:
            found.append((int(m.group(1)), p))
    found.sort(key=lambda t: t[0])
    return found


class FrameStream:
    """Ordered iterator over a sequence's frames.

    Gaps in the index numbering are recorded in ``missing_indices`` (and a
    warning string in ``warnings``) but do not stop iteration; each yielded
    frame carries its true on-disk index so downstream velocity estimates
    stay time-correct. An optional prefetch thread decodes ahead of the
    consumer; frames are still delivered strictly in index order.
    """

    def __init__(
        self,
        directory: Path | str,
        sequence_id: str | None = None,
        fps: float | None = None,
        prefetch: int = 0,
    ):
        self.directory = Path(directory)
        info = read_sequence_info(self.directory)
        self.info = info
        self.sequence_id = sequence_id or (info.sequence_id if info else self.directory.name)
        self.fps = fps if fps is not None else (info.fps if info else DEFAULT_FPS)
        self._files = list_frame_files(self.directory)
        self.missing_indices: list[int] = []
        self.warnings: list[str] = []
        if not self._files:
            self.warnings.append(f"no frames found in {self.directory}")
        else:
            indices = [i for i, _ in self._files]
            expected = range(indices[0], indices[-1] + 1)
            present = set(indices)
            self.missing_indices = [i for i in expected if i not in present]
            if self.missing_indices:
                self.warnings.append(
                    f"sequence {self.sequence_id}: missing frame indices "
                    f"{self.missing_indices}"
                )
        self._prefetch = prefetch
        self._dims: tuple[int, int] | None = None

    def __len__(self) -> int:
        return len(self._files)

    def _decode(self, index: int, path: Path) -> Frame:
        img = cv2.imread(str(path), cv2.IMREAD_COLOR)
        if img is None:
            raise FrameDecodeError(path)
        if img.ndim == 2:
            img = cv2.cvtColor(img, cv2.COLOR_GRAY2BGR)
        h, w = img.shape[:2]
        if self._dims is None:
            self._dims = (w, h)
        elif self._dims != (w, h):
            raise SequenceError(
                f"frame {path} has dimensions {w}x{h}, expected "
                f"{self._dims[0]}x{self._dims[1]}"
            )
        meta = FrameMeta(
            sequence_id=self.sequence_id,
            frame_index=index,
            width=w,
            height=h,
            fps=self.fps,
        )
        return Frame(meta=meta, pixels=np.ascontiguousarray(img), source_path=str(path))

    def __iter__(self) -> Iterator[Frame]:
        if self._prefetch <= 0:
            for index, path in self._files:
                yield self._decode(index, path)
            return
        q: queue.Queue = queue.Queue(maxsize=self._prefetch)
        _END = object()

        def worker():
            try:
                for index, path in self._files:
                    q.put(self._decode(index, path))
                q.put(_END)
            except Exception as exc:  # re-raised on the consumer side
                q.put(exc)

        t = threading.Thread(target=worker, daemon=True)
        t.start()
        while True:
            item = q.get()
            if item is _END:
                return
            if isinstance(item, Exception):
                raise item
            yield item


def load_sequence(
    directory: Path | str,
    sequence_id: str | None = None,
    fps: float | None = None,
    prefetch: int = 0,
) -> FrameStream:
    """Open a frame directory as an ordered stream (see FrameStream)."""
    return FrameStream(directory, sequence_id=sequence_id, fps=fps, prefetch=prefetch)


def write_frame(frame: Frame, directory: Path | str, ext: str = "png") -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / frame_filename(frame.meta.frame_index, ext)
    if not cv2.imwrite(str(path), frame.pixels):
        raise IOError(f"failed to write {path}")
    return path


def write_sequence(
    frames: Iterable[Frame],
    directory: Path | str,
    info: SequenceInfo | None = None,
) -> list[Path]:
    """Write frames plus a ``sequence.json`` sidecar."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    first_meta: FrameMeta | None = None
    for frame in frames:
        if first_meta is None:
            first_meta = frame.meta
        paths.append(write_frame(frame, directory))
    if info is None and first_meta is not None:
        info = SequenceInfo(
            sequence_id=first_meta.sequence_id,
            fps=first_meta.fps,
            width=first_meta.width,
            height=first_meta.height,
        )
    if info is not None:
        with open(directory / "sequence.json", "w", encoding="utf-8") as f:
            json.dump(info.to_json(), f, indent=2)
    return paths


# ---------------------------------------------------------------------------
# Synthetic sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BackgroundSpec:
    """Static background texture: flat color, checkerboard, or baked noise.

    ``texture_amplitude`` adds a per-pixel static offset (drawn once from
    the scenario seed), which gives the background structure without any
    temporal variation.
    """

    kind: str = "flat"  # "flat" | "checkerboard"
    color: tuple[int, int, int] = (90, 90, 90)
    color2: tuple[int, int, int] = (60, 60, 60)
    tile: int = 16
    texture_amplitude: float = 0.0

    def __post_init__(self):
        if self.kind not in ("flat", "checkerboard"):
            raise ValueError(f"unknown background kind: {self.kind}")
        if self.tile <= 0:
            raise ValueError("tile must be positive")


@dataclass(frozen=True)
class ObjectTruth:
    """Ground truth for one frame: tight box of the rendered object."""

    center: tuple[float, float]
    bbox_px: tuple[float, float, float, float]  # (x_center, y_center, w, h)


@dataclass
class SyntheticScenario:
    width: int
    height: int
    frame_count: int
    background: BackgroundSpec = field(default_factory=BackgroundSpec)
    trajectory: Sequence[tuple[float, float]] | None = None
    object_radius: float = 6.0
    object_color: tuple[int, int, int] = (230, 230, 230)
    person_rects: Sequence[tuple[int, int, int, int]] | None = None  # (x0, y0, x1, y1) incl.
    person_color: tuple[int, int, int] = (30, 20, 120)
    noise_sigma: float = 0.0
    fps: float = DEFAULT_FPS
    sequence_id: str = "synthetic"

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0 or self.frame_count <= 0:
            raise ValueError("scenario dimensions and frame_count must be positive")
        if self.trajectory is not None:
            if len(self.trajectory) != self.frame_count:
                raise ValueError("trajectory length must equal frame_count")
            r = self.object_radius
            for i, (x, y) in enumerate(self.trajectory):
                if not (r <= x <= self.width - 1 - r and r <= y <= self.height - 1 - r):
                    raise ValueError(
                        f"trajectory position {i} ({x:.1f}, {y:.1f}) leaves frame bounds"
                    )
        if self.person_rects is not None:
            if len(self.person_rects) != self.frame_count:
                raise ValueError("person_rects length must equal frame_count")
            for x0, y0, x1, y1 in self.person_rects:
                if not (0 <= x0 <= x1 < self.width and 0 <= y0 <= y1 < self.height):
                    raise ValueError("person rectangle leaves frame bounds")


def parabolic_trajectory(
    frame_count: int,
    start: tuple[float, float],
    end_x: float,
    apex_y: float,
) -> list[tuple[float, float]]:
    """Left-to-right parabola from start to (end_x, start_y) peaking at apex_y."""
    x0, y0 = start
    xs = np.linspace(x0, end_x, frame_count)
    t = np.linspace(-1.0, 1.0, frame_count)
    ys = apex_y + (y0 - apex_y) * t * t
    return [(float(x), float(y)) for x, y in zip(xs, ys)]


def _render_background(scenario: SyntheticScenario, rng: np.random.Generator) -> np.ndarray:
    h, w = scenario.height, scenario.width
    bg = scenario.background
    img = np.empty((h, w, 3), dtype=np.float64)
    if bg.kind == "flat":
        img[:] = bg.color
    else:
        ys, xs = np.mgrid[0:h, 0:w]
        checker = ((ys // bg.tile) + (xs // bg.tile)) % 2
        img[:] = bg.color
        img[checker == 1] = bg.color2
    if bg.texture_amplitude > 0:
        img += rng.uniform(-bg.texture_amplitude, bg.texture_amplitude, (h, w, 1))
    return img


def _object_mask(scenario: SyntheticScenario, center: tuple[float, float]) -> np.ndarray:
    h, w = scenario.height, scenario.width
    cx, cy = center
    r = scenario.object_radius
    x0 = max(0, int(math.floor(cx - r)) - 1)
    x1 = min(w - 1, int(math.ceil(cx + r)) + 1)
    y0 = max(0, int(math.floor(cy - r)) - 1)
    y1 = min(h - 1, int(math.ceil(cy + r)) + 1)
    ys, xs = np.mgrid[y0 : y1 + 1, x0 : x1 + 1]
    disc = (xs - cx) ** 2 + (ys - cy) ** 2 <= r * r
    mask = np.zeros((h, w), dtype=bool)
    mask[y0 : y1 + 1, x0 : x1 + 1] = disc
    return mask


def _tight_box(mask: np.ndarray) -> ObjectTruth | None:
    ys, xs = np.nonzero(mask)
    if len(xs) == 0:
        return None
    x_min, x_max = int(xs.min()), int(xs.max())
    y_min, y_max = int(ys.min()), int(ys.max())
    w = x_max - x_min + 1
    h = y_max - y_min + 1
    cx = (x_min + x_max) / 2.0
    cy = (y_min + y_max) / 2.0
    return ObjectTruth(center=(cx, cy), bbox_px=(cx, cy, float(w), float(h)))


def synthesize_sequence(
    scenario: SyntheticScenario, seed: int
) -> Iterator[tuple[Frame, ObjectTruth | None, np.ndarray]]:
    """Render the scenario deterministically.

    Yields (frame, ground_truth, person_mask) per frame. Ground truth is
    the tight axis-aligned box of the rendered object (None when the
    scenario has no trajectory); the person mask covers exactly the
    person rectangle. Determinism: every random draw is keyed on
    (seed, frame_index), so output is a pure function of (scenario, seed).
    """
    base = _render_background(scenario, np.random.default_rng([seed, 0xB6]))
    h, w = scenario.height, scenario.width
    for i in range(scenario.frame_count):
        img = base.copy()
        person_mask = np.zeros((h, w), dtype=bool)
        if scenario.person_rects is not None:
            x0, y0, x1, y1 = scenario.person_rects[i]
            img[y0 : y1 + 1, x0 : x1 + 1] = scenario.person_color
            person_mask[y0 : y1 + 1, x0 : x1 + 1] = True
        truth: ObjectTruth | None = None
        if scenario.trajectory is not None:
            obj = _object_mask(scenario, scenario.trajectory[i])
            img[obj] = scenario.object_color
            truth = _tight_box(obj)
        if scenario.noise_sigma > 0:
            rng = np.random.default_rng([seed, i])
            img += rng.normal(0.0, scenario.noise_sigma, (h, w, 3))
        pixels = np.clip(np.rint(img), 0, 255).astype(np.uint8)
        meta = FrameMeta(
            sequence_id=scenario.sequence_id,
            frame_index=i,
            width=w,
            height=h,
            fps=scenario.fps,
        )
        yield Frame(meta=meta, pixels=pixels), truth, person_mask
