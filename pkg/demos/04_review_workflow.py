"""The human review loop against the label store.

Populates a store the way a pipeline run would, then plays an annotator
session: confirm a good box, nudge one, reject a ghost, difficulty-tag a
blurry frame, and hand-label a queued frame. Ends by replaying the audit
log to show it reproduces the store exactly.

Run:  python demos/04_review_workflow.py [store_dir]
"""

import sys
import tempfile
from pathlib import Path

from shuttle_annotate import Difficulty, LabelRecord, LabelStatus, LabelStore, ReviewEdit
from shuttle_annotate.labels import FrameInfo, QueueReason, replay_audit

store_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="demo04_"))
store = LabelStore(store_dir)

print(f"store at {store_dir}\n")

for i in range(4):
    store.put_initial(
        LabelRecord(
            sequence_id="rally", frame_index=i, width=1920, height=1200,
            status=LabelStatus.AUTO, bbox_px=(960.0 + 5 * i, 600.0, 18.0, 18.0),
            pipeline_score=0.9 - 0.1 * i, background_id="GLC_1",
        )
    )
# one frame the pipeline could not label: registered + queued, no record
store.register_frame(FrameInfo(sequence_id="rally", frame_index=4,
                               width=1920, height=1200, background_id="GLC_1"))
store.enqueue("rally:000004", QueueReason.LOW_SCORE)

print("annotator session:")
rec = store.record_review("rally:000000", ReviewEdit(kind="confirm"), editor="dana")
print(f"  confirm   -> {rec.key} stays {rec.status.value}")

rec = store.record_review(
    "rally:000001",
    ReviewEdit(kind="adjust", bbox=(968.0, 600.0, 18.0, 18.0)),
    editor="dana",
)
print(f"  adjust    -> {rec.key} now {rec.status.value} (3px nudge)")

rec = store.record_review("rally:000002", ReviewEdit(kind="no_object"), editor="dana")
print(f"  reject    -> {rec.key} now {rec.status.value}, box removed")

rec = store.record_review(
    "rally:000003", ReviewEdit(kind="difficulty", difficulty=Difficulty.MEDIUM),
    editor="dana",
)
print(f"  tag       -> {rec.key} difficulty {rec.difficulty.value}, status {rec.status.value}")

rec = store.record_review(
    "rally:000004",
    ReviewEdit(kind="replace", bbox=(400.0, 300.0, 16.0, 16.0)),
    editor="dana",
)
print(f"  hand-box  -> {rec.key} created as {rec.status.value}; queue now {store.queue()}")

stats = store.stats()
print("\nstore stats:", {k: v for k, v in stats["by_status"].items() if v})
pct = stats["labeled_percentages"]
print("labeled split: " + ", ".join(f"{k} {v:.1%}" for k, v in pct.items()))

replayed = replay_audit(store.audit_path)
current = {r.key: r for r in store.records()}
print(f"\naudit replay reproduces the store: {replayed == current} "
      f"({sum(1 for _ in open(store.audit_path))} audit lines)")
