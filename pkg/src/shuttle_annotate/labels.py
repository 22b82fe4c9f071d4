"""Label persistence, review bookkeeping, and dataset export.

On disk a label store is a directory:

    store/
      manifest.jsonl   one JSON object per line; last line per frame wins
      audit.jsonl      append-only log of every status/geometry change
      queue.jsonl      review-queue events; last line per frame wins
      frames.jsonl     registry of every processed frame (geometry, path),
                       so queued frames without a label can still be
                       served and manually labeled
      labels/<sequence_id>/<frame>.txt   normalized one-line label files

Label text files use the normalized single-class format
``0 x_c/W y_c/H w/W h/H`` with six decimal places, which keeps the
quantization error around a thousandth of a pixel at full resolution.
"""

from __future__ import annotations

import json
import os
import re
import shutil
import time
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable

BBox = tuple[float, float, float, float]  # (x_center, y_center, w, h) in pixels


class LabelStatus(str, Enum):
    AUTO = "auto"
    ADJUSTED = "adjusted"
    MANUAL = "manual"
    NO_OBJECT = "no_object"
    BURN_IN_EXCLUDED = "burn_in_excluded"


class Difficulty(str, Enum):
    EASY = "easy"
    MEDIUM = "medium"
    HARD = "hard"


EXPORTABLE_STATUSES = {LabelStatus.AUTO, LabelStatus.ADJUSTED, LabelStatus.MANUAL}

# target -> statuses a record may move to (self-loops cover confirmations,
# re-adjustments, and difficulty tagging)
_ALLOWED_TRANSITIONS: dict[LabelStatus, set[LabelStatus]] = {
    LabelStatus.AUTO: {
        LabelStatus.AUTO,
        LabelStatus.ADJUSTED,
        LabelStatus.MANUAL,
        LabelStatus.NO_OBJECT,
    },
    LabelStatus.MANUAL: {LabelStatus.MANUAL, LabelStatus.ADJUSTED},
    LabelStatus.ADJUSTED: {LabelStatus.ADJUSTED},
    LabelStatus.NO_OBJECT: {LabelStatus.NO_OBJECT},
    LabelStatus.BURN_IN_EXCLUDED: {LabelStatus.BURN_IN_EXCLUDED},
}


class LabelParseError(Exception):
    def __init__(self, message: str, line_number: int = 1):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class IllegalTransitionError(Exception):
    pass


class ReviewConflictError(Exception):
    """Raised when an edit was based on a stale record revision."""

    def __init__(self, frame_key: str, expected: int, actual: int):
        super().__init__(
            f"{frame_key}: edit based on revision {expected}, store has {actual}"
        )
        self.frame_key = frame_key
        self.actual = actual


def frame_key(sequence_id: str, frame_index: int) -> str:
    return f"{sequence_id}:{frame_index:06d}"


def split_frame_key(key: str) -> tuple[str, int]:
    seq, _, idx = key.rpartition(":")
    return seq, int(idx)


# ---------------------------------------------------------------------------
# Normalized label format
# ---------------------------------------------------------------------------


def validate_bbox(bbox: BBox, frame_dims: tuple[int, int]) -> None:
    xc, yc, w, h = bbox
    width, height = frame_dims
    if w <= 0 or h <= 0:
        raise ValueError(f"box size must be positive, got {w}x{h}")
    if xc - w / 2 < 0 or xc + w / 2 > width or yc - h / 2 < 0 or yc + h / 2 > height:
        raise ValueError(f"box {bbox} leaves {width}x{height} frame bounds")


def to_normalized_record(bbox: BBox, frame_dims: tuple[int, int]) -> str:
    """Single-class label line: '0 x y w h' normalized, 6 decimals."""
    validate_bbox(bbox, frame_dims)
    xc, yc, w, h = bbox
    width, height = frame_dims
    return (
        f"0 {xc / width:.6f} {yc / height:.6f} "
        f"{w / width:.6f} {h / height:.6f}\n"
    )


def parse_label_line(
    line: str, frame_dims: tuple[int, int], line_number: int = 1
) -> BBox:
    fields = line.split()
    if len(fields) != 5:
        raise LabelParseError(f"expected 5 fields, got {len(fields)}", line_number)
    if fields[0] != "0":
        raise LabelParseError(f"unknown class {fields[0]!r}", line_number)
    try:
        values = [float(v) for v in fields[1:]]
    except ValueError:
        raise LabelParseError(f"non-numeric field in {line!r}", line_number) from None
    for v in values:
        if not (0.0 <= v <= 1.0):
            raise LabelParseError(f"coordinate {v} out of range [0, 1]", line_number)
    width, height = frame_dims
    xc, yc, w, h = values
    return (xc * width, yc * height, w * width, h * height)


# ---------------------------------------------------------------------------
# Records and review edits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LabelRecord:
    sequence_id: str
    frame_index: int
    width: int
    height: int
    status: LabelStatus
    bbox_px: BBox | None = None
    difficulty: Difficulty | None = None
    pipeline_score: float | None = None
    updated_at: float = 0.0
    editor: str = "system"
    revision: int = 0
    frame_path: str | None = None
    location: str = ""
    background_id: str = ""

    def __post_init__(self):
        if (self.bbox_px is None) != (
            self.status in (LabelStatus.NO_OBJECT, LabelStatus.BURN_IN_EXCLUDED)
        ):
            raise ValueError(
                f"bbox presence inconsistent with status {self.status.value}"
            )
        if self.bbox_px is not None:
            validate_bbox(self.bbox_px, (self.width, self.height))

    @property
    def key(self) -> str:
        return frame_key(self.sequence_id, self.frame_index)

    def to_json(self) -> dict:
        return {
            "frame": self.key,
            "sequence_id": self.sequence_id,
            "frame_index": self.frame_index,
            "width": self.width,
            "height": self.height,
            "status": self.status.value,
            "bbox_px": list(self.bbox_px) if self.bbox_px else None,
            "difficulty": self.difficulty.value if self.difficulty else None,
            "pipeline_score": self.pipeline_score,
            "updated_at": self.updated_at,
            "editor": self.editor,
            "revision": self.revision,
            "frame_path": self.frame_path,
            "location": self.location,
            "background_id": self.background_id,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "LabelRecord":
        bbox = obj.get("bbox_px")
        diff = obj.get("difficulty")
        return cls(
            sequence_id=obj["sequence_id"],
            frame_index=obj["frame_index"],
            width=obj["width"],
            height=obj["height"],
            status=LabelStatus(obj["status"]),
            bbox_px=tuple(bbox) if bbox else None,
            difficulty=Difficulty(diff) if diff else None,
            pipeline_score=obj.get("pipeline_score"),
            updated_at=obj.get("updated_at", 0.0),
            editor=obj.get("editor", "system"),
            revision=obj.get("revision", 0),
            frame_path=obj.get("frame_path"),
            location=obj.get("location", ""),
            background_id=obj.get("background_id", ""),
        )


@dataclass(frozen=True)
class ReviewEdit:
    """One review action: confirm / adjust / replace / no_object / difficulty."""

    kind: str
    bbox: BBox | None = None
    difficulty: Difficulty | None = None

    KINDS = ("confirm", "adjust", "replace", "no_object", "difficulty")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown edit kind {self.kind!r}")
        if self.kind in ("adjust", "replace") and self.bbox is None:
            raise ValueError(f"{self.kind} edit requires a bbox")
        if self.kind == "difficulty" and self.difficulty is None:
            raise ValueError("difficulty edit requires a difficulty")


def _target_status(record: LabelRecord, edit: ReviewEdit) -> LabelStatus:
    if edit.kind == "adjust":
        return LabelStatus.ADJUSTED
    if edit.kind == "replace":
        return LabelStatus.MANUAL
    if edit.kind == "no_object":
        return LabelStatus.NO_OBJECT
    return record.status


def apply_review_edit(
    record: LabelRecord, edit: ReviewEdit, editor: str, now: float
) -> LabelRecord:
    """Pure transition: returns the updated record or raises on an illegal move."""
    target = _target_status(record, edit)
    if target not in _ALLOWED_TRANSITIONS[record.status]:
        raise IllegalTransitionError(
            f"{record.key}: {record.status.value} -> {target.value} not allowed"
        )
    bbox = record.bbox_px
    if edit.kind in ("adjust", "replace"):
        bbox = edit.bbox
        validate_bbox(bbox, (record.width, record.height))
    elif edit.kind == "no_object":
        bbox = None
    difficulty = edit.difficulty if edit.kind == "difficulty" else record.difficulty
    return replace(
        record,
        status=target,
        bbox_px=bbox,
        difficulty=difficulty,
        editor=editor,
        updated_at=now,
        revision=record.revision + 1,
    )


# ---------------------------------------------------------------------------
# Review queue
# ---------------------------------------------------------------------------


class QueueReason(str, Enum):
    LOW_SCORE = "low_score"
    NO_CANDIDATE = "no_candidate"
    PERSON_CONFLICT = "person_conflict"
    USER_FLAG = "user_flag"


@dataclass(frozen=True)
class ReviewQueueItem:
    frame: str
    reason: QueueReason
    state: str = "pending"  # or "done"

    def to_json(self) -> dict:
        return {"frame": self.frame, "reason": self.reason.value, "state": self.state}

    @classmethod
    def from_json(cls, obj: dict) -> "ReviewQueueItem":
        return cls(
            frame=obj["frame"],
            reason=QueueReason(obj["reason"]),
            state=obj.get("state", "pending"),
        )


# ---------------------------------------------------------------------------
# The store
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FrameInfo:
    """Registry entry for one processed frame, label or not."""

    sequence_id: str
    frame_index: int
    width: int
    height: int
    frame_path: str | None = None
    location: str = ""
    background_id: str = ""

    @property
    def key(self) -> str:
        return frame_key(self.sequence_id, self.frame_index)

    def to_json(self) -> dict:
        return {
            "frame": self.key,
            "sequence_id": self.sequence_id,
            "frame_index": self.frame_index,
            "width": self.width,
            "height": self.height,
            "frame_path": self.frame_path,
            "location": self.location,
            "background_id": self.background_id,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "FrameInfo":
        return cls(
            sequence_id=obj["sequence_id"],
            frame_index=obj["frame_index"],
            width=obj["width"],
            height=obj["height"],
            frame_path=obj.get("frame_path"),
            location=obj.get("location", ""),
            background_id=obj.get("background_id", ""),
        )

    def record_template(self) -> "LabelRecord":
        """An empty-record shell used when a reviewer labels a queued frame."""
        return LabelRecord(
            sequence_id=self.sequence_id,
            frame_index=self.frame_index,
            width=self.width,
            height=self.height,
            status=LabelStatus.NO_OBJECT,
            bbox_px=None,
            frame_path=self.frame_path,
            location=self.location,
            background_id=self.background_id,
            revision=-1,
        )


class StoreLockedError(Exception):
    pass


class LabelStore:
    """Single-writer, append-friendly label store over a directory."""

    def __init__(self, root: Path | str, clock: Callable[[], float] = time.time):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.clock = clock
        self._records: dict[str, LabelRecord] = {}
        self._queue: dict[str, ReviewQueueItem] = {}
        self._frames: dict[str, FrameInfo] = {}
        self._load()

    # -- paths ------------------------------------------------------------
    @property
    def manifest_path(self) -> Path:
        return self.root / "manifest.jsonl"

    @property
    def frames_path(self) -> Path:
        return self.root / "frames.jsonl"

    @property
    def audit_path(self) -> Path:
        return self.root / "audit.jsonl"

    @property
    def queue_path(self) -> Path:
        return self.root / "queue.jsonl"

    @property
    def lock_path(self) -> Path:
        return self.root / "store.lock"

    def label_file(self, record: LabelRecord) -> Path:
        return self.root / "labels" / record.sequence_id / f"{record.frame_index:06d}.txt"

    # -- locking ----------------------------------------------------------
    def acquire_lock(self, owner: str) -> None:
        for attempt in range(2):
            try:
                fd = os.open(self.lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
            except FileExistsError:
                holder = self.lock_path.read_text().strip()
                if attempt == 0 and self._lock_is_stale(holder):
                    try:
                        self.lock_path.unlink()
                    except FileNotFoundError:
                        pass
                    continue
                raise StoreLockedError(
                    f"store {self.root} is locked by {holder}; pipeline runs and "
                    "serving must not share a store"
                ) from None
            with os.fdopen(fd, "w") as f:
                f.write(f"{owner} pid={os.getpid()}\n")
            return

    @staticmethod
    def _lock_is_stale(holder: str) -> bool:
        """True when the recorded pid no longer exists (crashed holder)."""
        m = re.search(r"pid=(\d+)", holder)
        if not m:
            return False
        pid = int(m.group(1))
        try:
            os.kill(pid, 0)
        except ProcessLookupError:
            return True
        except PermissionError:
            return False
        return False

    def release_lock(self) -> None:
        try:
            self.lock_path.unlink()
        except FileNotFoundError:
            pass

    # -- persistence ------------------------------------------------------
    def _load(self) -> None:
        if self.manifest_path.exists():
            with open(self.manifest_path, "r", encoding="utf-8") as f:
                for line in f:
                    line = line.strip()
                    if not line:
                        continue
                    rec = LabelRecord.from_json(json.loads(line))
                    self._records[rec.key] = rec
        if self.queue_path.exists():
            with open(self.queue_path, "r", encoding="utf-8") as f:
                for line in f:
                    line = line.strip()
                    if not line:
                        continue
                    item = ReviewQueueItem.from_json(json.loads(line))
                    self._queue[item.frame] = item
        if self.frames_path.exists():
            with open(self.frames_path, "r", encoding="utf-8") as f:
                for line in f:
                    line = line.strip()
                    if not line:
                        continue
                    info = FrameInfo.from_json(json.loads(line))
                    self._frames[info.key] = info

    def _append(self, path: Path, obj: dict) -> None:
        with open(path, "a", encoding="utf-8") as f:
            f.write(json.dumps(obj, sort_keys=True) + "\n")
            f.flush()
            os.fsync(f.fileno())

    def _sync_label_file(self, record: LabelRecord) -> None:
        path = self.label_file(record)
        if record.bbox_px is not None and record.status in EXPORTABLE_STATUSES:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(
                to_normalized_record(record.bbox_px, (record.width, record.height))
            )
        elif path.exists():
            path.unlink()

    def _write_record(self, record: LabelRecord, old: LabelRecord | None) -> None:
        self._records[record.key] = record
        self._append(self.manifest_path, record.to_json())
        self._append(
            self.audit_path,
            {
                "frame": record.key,
                "old": old.to_json() if old else None,
                "new": record.to_json(),
                "editor": record.editor,
                "at": record.updated_at,
            },
        )
        self._sync_label_file(record)

    # -- API ---------------------------------------------------------------
    def get(self, key: str) -> LabelRecord | None:
        return self._records.get(key)

    def records(self) -> list[LabelRecord]:
        return sorted(self._records.values(), key=lambda r: r.key)

    def sequences(self) -> list[str]:
        seqs = {r.sequence_id for r in self._records.values()}
        seqs.update(f.sequence_id for f in self._frames.values())
        return sorted(seqs)

    def register_frame(self, info: FrameInfo) -> None:
        if info.key not in self._frames:
            self._frames[info.key] = info
            self._append(self.frames_path, info.to_json())

    def frame_info(self, key: str) -> FrameInfo | None:
        return self._frames.get(key)

    def frames(self, sequence_id: str | None = None) -> list[FrameInfo]:
        infos = sorted(self._frames.values(), key=lambda f: f.key)
        if sequence_id is not None:
            infos = [f for f in infos if f.sequence_id == sequence_id]
        return infos

    def put_initial(self, record: LabelRecord) -> LabelRecord:
        """Insert a pipeline- or reviewer-created record for a new frame."""
        if record.key in self._records:
            raise ValueError(f"record for {record.key} already exists")
        self.register_frame(
            FrameInfo(
                sequence_id=record.sequence_id,
                frame_index=record.frame_index,
                width=record.width,
                height=record.height,
                frame_path=record.frame_path,
                location=record.location,
                background_id=record.background_id,
            )
        )
        self._write_record(record, old=None)
        return record

    def record_review(
        self,
        key: str,
        edit: ReviewEdit,
        editor: str,
        expected_revision: int | None = None,
        frame_template: LabelRecord | None = None,
    ) -> LabelRecord:
        """Apply a review edit; audited, last-write-wins, conflicts surfaced.

        For frames without a record yet (queued for manual labeling), a
        ``frame_template`` supplies the frame geometry and the edit must
        create the record (replace or no_object).
        """
        now = self.clock()
        old = self._records.get(key)
        if old is None:
            if frame_template is None:
                info = self._frames.get(key)
                if info is not None:
                    frame_template = info.record_template()
            if frame_template is None:
                raise KeyError(f"no record for frame {key}")
            if edit.kind == "replace":
                status, bbox = LabelStatus.MANUAL, edit.bbox
            elif edit.kind == "no_object":
                status, bbox = LabelStatus.NO_OBJECT, None
            else:
                raise IllegalTransitionError(
                    f"{key}: cannot {edit.kind} a frame with no label yet"
                )
            new = replace(
                frame_template,
                status=status,
                bbox_px=bbox,
                difficulty=edit.difficulty or frame_template.difficulty,
                editor=editor,
                updated_at=now,
                revision=frame_template.revision + 1,
            )
        else:
            if expected_revision is not None and old.revision != expected_revision:
                raise ReviewConflictError(key, expected_revision, old.revision)
            new = apply_review_edit(old, edit, editor, now)
        self._write_record(new, old)
        if key in self._queue and self._queue[key].state == "pending":
            self.mark_done(key)
        return new

    # -- queue --------------------------------------------------------------
    def enqueue(self, key: str, reason: QueueReason) -> None:
        item = ReviewQueueItem(frame=key, reason=reason, state="pending")
        self._queue[key] = item
        self._append(self.queue_path, item.to_json())

    def mark_done(self, key: str) -> None:
        item = self._queue.get(key)
        if item is None:
            return
        done = ReviewQueueItem(frame=key, reason=item.reason, state="done")
        self._queue[key] = done
        self._append(self.queue_path, done.to_json())

    def queue(self, pending_only: bool = True) -> list[ReviewQueueItem]:
        items = sorted(self._queue.values(), key=lambda i: i.frame)
        if pending_only:
            items = [i for i in items if i.state == "pending"]
        return items

    # -- stats ---------------------------------------------------------------
    def stats(self, background_id: str | None = None) -> dict:
        records = [
            r
            for r in self._records.values()
            if background_id is None or r.background_id == background_id
        ]
        by_status: dict[str, int] = {s.value: 0 for s in LabelStatus}
        by_difficulty: dict[str, int] = {d.value: 0 for d in Difficulty}
        by_difficulty["untagged"] = 0
        by_background: dict[str, int] = {}
        for r in records:
            by_status[r.status.value] += 1
            by_difficulty[r.difficulty.value if r.difficulty else "untagged"] += 1
            by_background[r.background_id or ""] = (
                by_background.get(r.background_id or "", 0) + 1
            )
        labeled = sum(by_status[s.value] for s in EXPORTABLE_STATUSES)
        pct = {
            s.value: (by_status[s.value] / labeled if labeled else 0.0)
            for s in EXPORTABLE_STATUSES
        }
        return {
            "total": len(records),
            "by_status": by_status,
            "by_difficulty": by_difficulty,
            "by_background": by_background,
            "labeled": labeled,
            "labeled_percentages": pct,
            "queue_pending": len(self.queue()),
        }


def replay_audit(audit_path: Path | str) -> dict[str, LabelRecord]:
    """Rebuild the current records purely from the audit log."""
    records: dict[str, LabelRecord] = {}
    with open(audit_path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            entry = json.loads(line)
            rec = LabelRecord.from_json(entry["new"])
            records[rec.key] = rec
    return records


# ---------------------------------------------------------------------------
# Dataset manifest and split export
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ManifestEntry:
    frame_path: str
    sequence_id: str
    frame_index: int
    location: str
    background_id: str
    difficulty: Difficulty | None
    status: LabelStatus


@dataclass
class DatasetManifest:
    entries: list[ManifestEntry] = field(default_factory=list)

    @classmethod
    def from_store(cls, store: LabelStore) -> "DatasetManifest":
        entries = [
            ManifestEntry(
                frame_path=r.frame_path or "",
                sequence_id=r.sequence_id,
                frame_index=r.frame_index,
                location=r.location,
                background_id=r.background_id,
                difficulty=r.difficulty,
                status=r.status,
            )
            for r in store.records()
        ]
        return cls(entries=entries)

    def backgrounds(self) -> list[str]:
        return sorted({e.background_id for e in self.entries})

    def locations(self) -> list[str]:
        return sorted({e.location for e in self.entries})


def make_split_spec(groups: dict[str, Iterable[str]]) -> dict[str, str]:
    """{split: [background ids]} -> {background_id: split}; duplicates rejected."""
    spec: dict[str, str] = {}
    for split, ids in groups.items():
        for bg in ids:
            if bg in spec:
                raise ValueError(f"background {bg!r} assigned to both {spec[bg]} and {split}")
            spec[bg] = split
    return spec


def holdout_split_spec(
    store: LabelStore, hold_out: str, by: str = "background"
) -> dict[str, str]:
    """Train on everything except one held-out background or location."""
    if by not in ("background", "location"):
        raise ValueError("by must be 'background' or 'location'")
    records = store.records()
    if by == "background":
        backgrounds = {r.background_id for r in records}
        if hold_out not in backgrounds:
            raise ValueError(f"unknown background {hold_out!r}")
        return {bg: ("test" if bg == hold_out else "train") for bg in backgrounds}
    locations = {r.location for r in records}
    if hold_out not in locations:
        raise ValueError(f"unknown location {hold_out!r}")
    return {
        r.background_id: ("test" if r.location == hold_out else "train")
        for r in records
    }


def export_split(
    store: LabelStore,
    split_spec: dict[str, str],
    output_dir: Path | str,
    difficulties: set[Difficulty] | None = None,
    hold_out: str | None = None,
) -> dict[str, int]:
    """Write <split>/images + <split>/labels trees plus fold.json.

    Only auto/adjusted/manual records are exported; an optional difficulty
    filter drops e.g. hard samples. Returns per-split exported counts.
    """
    output_dir = Path(output_dir)
    records = store.records()
    backgrounds = {r.background_id for r in records}
    missing = backgrounds - set(split_spec)
    if missing:
        raise ValueError(f"split_spec does not cover backgrounds: {sorted(missing)}")
    counts: dict[str, int] = {}
    for r in records:
        if r.status not in EXPORTABLE_STATUSES or r.bbox_px is None:
            continue
        if difficulties is not None and r.difficulty not in difficulties:
            continue
        split = split_spec[r.background_id]
        stem = f"{r.sequence_id}_{r.frame_index:06d}"
        images_dir = output_dir / split / "images"
        labels_dir = output_dir / split / "labels"
        images_dir.mkdir(parents=True, exist_ok=True)
        labels_dir.mkdir(parents=True, exist_ok=True)
        if not r.frame_path:
            raise ValueError(f"record {r.key} has no frame_path; cannot export image")
        src = Path(r.frame_path)
        shutil.copyfile(src, images_dir / f"{stem}{src.suffix}")
        (labels_dir / f"{stem}.txt").write_text(
            to_normalized_record(r.bbox_px, (r.width, r.height))
        )
        counts[split] = counts.get(split, 0) + 1
    splits: dict[str, list[str]] = {}
    for bg, split in sorted(split_spec.items()):
        splits.setdefault(split, []).append(bg)
    fold = {
        "hold_out": hold_out,
        "splits": splits,
        "difficulties": sorted(d.value for d in difficulties) if difficulties else None,
        "exported": counts,
    }
    output_dir.mkdir(parents=True, exist_ok=True)
    (output_dir / "fold.json").write_text(json.dumps(fold, indent=2, sort_keys=True))
    return counts


def read_exported_split(
    split_dir: Path | str, frame_dims: tuple[int, int]
) -> dict[str, BBox]:
    """Parse an exported split's label files back into pixel boxes."""
    split_dir = Path(split_dir)
    out: dict[str, BBox] = {}
    labels_dir = split_dir / "labels"
    if not labels_dir.exists():
        return out
    for path in sorted(labels_dir.glob("*.txt")):
        text = path.read_text().strip()
        out[path.stem] = parse_label_line(text, frame_dims)
    return out
