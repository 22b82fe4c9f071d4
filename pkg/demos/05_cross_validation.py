"""Cross-validation export and subset-size-weighted aggregation.

Creates a toy multi-background dataset, exports a hold-one-background-out
fold, then aggregates per-fold reports two ways: pooled counts (the
primary numbers) and unweighted fold means, showing how they diverge when
fold sizes differ.

Run:  python demos/05_cross_validation.py [work_dir]
"""

import sys
import tempfile
from pathlib import Path

import cv2
import numpy as np

from shuttle_annotate import (
    EvalCounts,
    EvalReport,
    LabelRecord,
    LabelStatus,
    LabelStore,
    crossval_aggregate,
    export_split,
)
from shuttle_annotate.labels import holdout_split_spec

work = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="demo05_"))
img_dir = work / "imgs"
img_dir.mkdir(parents=True, exist_ok=True)
store = LabelStore(work / "store")

backgrounds = {"GLC_1": "GLC", "GLC_2": "GLC", "CAB_1": "CAB", "ML_1": "ML"}
rng = np.random.default_rng(3)
for bg, loc in backgrounds.items():
    for i in range(6):
        path = img_dir / f"{bg}_{i:06d}.png"
        cv2.imwrite(str(path), rng.integers(0, 255, (32, 32, 3)).astype(np.uint8))
        store.put_initial(
            LabelRecord(
                sequence_id=bg, frame_index=i, width=32, height=32,
                status=LabelStatus.AUTO, bbox_px=(16.0, 16.0, 6.0, 6.0),
                frame_path=str(path), location=loc, background_id=bg,
            )
        )

spec = holdout_split_spec(store, hold_out="GLC_2", by="background")
counts = export_split(store, spec, work / "fold_GLC_2", hold_out="GLC_2")
print(f"hold-out GLC_2 export: {counts}")
print(f"fold descriptor: {(work / 'fold_GLC_2' / 'fold.json').read_text()}")

# two folds of very different size, same detector behavior per fold
small = EvalReport.from_counts(
    EvalCounts(tp=90, fp=5, fn=10, tp_center_offsets=None), name="small-bg"
)
large = EvalReport.from_counts(
    EvalCounts(tp=1000, fp=20, fn=9000, tp_center_offsets=None), name="large-bg"
)
combined = crossval_aggregate([small, large])
print("\nper-fold recalls:", [round(r.recall, 3) for r in combined.per_fold])
print(f"pooled recall (size-weighted, primary): {combined.pooled.recall:.3f}")
print(f"unweighted mean recall:                 {combined.unweighted_mean['recall']:.3f}")
print("the pooled number follows the large fold; the mean treats folds equally")
