"""Declarative pipeline configuration, loaded from one TOML document."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import tomli

from .background import GmmParams, MorphConfig
from .candidates import SpatialFilterConfig
from .evaluation import MatchConfig
from .tracking import SelectorConfig


@dataclass(frozen=True)
class SpatialSettings:
    """Spatial filter knobs before the frame height is known."""

    y_threshold: float | None = None  # absolute row; wins over the fraction
    y_threshold_fraction: float = SpatialFilterConfig.DEFAULT_Y_FRACTION
    person_mask_dilation: int = 5
    missing_mask_policy: str = "defer-frame"

    def resolve(self, frame_height: int) -> SpatialFilterConfig:
        y = self.y_threshold
        if y is None:
            y = self.y_threshold_fraction * frame_height
        return SpatialFilterConfig(
            y_threshold=y,
            person_mask_dilation=self.person_mask_dilation,
            missing_mask_policy=self.missing_mask_policy,
        )


@dataclass
class PipelineConfig:
    gmm: GmmParams = field(default_factory=GmmParams)
    morph: MorphConfig = field(default_factory=MorphConfig)
    spatial: SpatialSettings = field(default_factory=SpatialSettings)
    selector: SelectorConfig = field(default_factory=SelectorConfig)
    match: MatchConfig = field(default_factory=MatchConfig)
    burn_in_frames: int = 100
    sequence_dir: Path | None = None
    person_mask_dir: Path | None = None
    store_dir: Path | None = None
    debug_mask_dir: Path | None = None
    workers: int = 0  # 0 = leave the numba thread pool at its default
    precision: str = "float32"

    def __post_init__(self):
        if self.burn_in_frames < 0:
            raise ValueError("burn_in_frames must be non-negative")
        if self.precision not in ("float32", "float64"):
            raise ValueError("precision must be float32 or float64")
        if self.workers < 0:
            raise ValueError("workers must be non-negative")


def _pick(obj: dict, cls, **renames):
    kwargs = {}
    for name in cls.__dataclass_fields__:
        key = renames.get(name, name)
        if key in obj:
            kwargs[name] = obj[key]
    return cls(**kwargs)


def load_config(path: Path | str) -> PipelineConfig:
    with open(path, "rb") as f:
        doc = tomli.load(f)
    gmm = _pick(doc.get("gmm", {}), GmmParams)
    morph_doc = dict(doc.get("morph", {}))
    if "structuring_element" in morph_doc:
        morph_doc["structuring_element"] = tuple(morph_doc["structuring_element"])
    morph = _pick(morph_doc, MorphConfig)
    spatial = _pick(doc.get("spatial", {}), SpatialSettings)
    selector = _pick(doc.get("selector", {}), SelectorConfig)
    match = _pick(doc.get("match", {}), MatchConfig)
    io = doc.get("io", {})

    def _path(key):
        return Path(io[key]) if key in io else None

    return PipelineConfig(
        gmm=gmm,
        morph=morph,
        spatial=spatial,
        selector=selector,
        match=match,
        burn_in_frames=doc.get("burn_in_frames", 100),
        sequence_dir=_path("sequence_dir"),
        person_mask_dir=_path("person_mask_dir"),
        store_dir=_path("store_dir"),
        debug_mask_dir=_path("debug_mask_dir"),
        workers=doc.get("workers", 0),
        precision=doc.get("precision", "float32"),
    )
