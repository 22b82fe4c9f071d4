"""Semi-automatic annotation toolkit for small fast-moving objects in
stationary-camera video: background-subtraction labeling, human review
tooling, and a center-distance evaluation harness."""

from .background import BackgroundModel, GmmParams, MorphConfig, refine
from .candidates import (
    Blob,
    SpatialFilterConfig,
    apply_vertical_filter,
    connected_components,
    remove_person_overlap,
)
from .config import PipelineConfig, load_config
from .evaluation import (
    CrossValReport,
    EvalCounts,
    EvalReport,
    MatchConfig,
    Prediction,
    SizeBin,
    accumulate,
    crossval_aggregate,
    evaluate_frames,
    match_frame,
    select_top1,
    size_binned_report,
    stratified_report,
)
from .frameio import (
    BackgroundSpec,
    Frame,
    FrameMeta,
    SyntheticScenario,
    load_sequence,
    synthesize_sequence,
    write_sequence,
)
from .labels import (
    DatasetManifest,
    Difficulty,
    LabelRecord,
    LabelStatus,
    LabelStore,
    ReviewEdit,
    export_split,
    parse_label_line,
    to_normalized_record,
)
from .pipeline import RunSummary, run_pipeline
from .tracking import (
    Detection,
    SelectorConfig,
    TrackState,
    advance_track,
    score_candidates,
    select,
)

__version__ = "0.1.0"
