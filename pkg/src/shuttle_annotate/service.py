"""HTTP API over a label store for the companion review frontend.

Read-mostly, local-first. Every mutation funnels through the store's
record_review (audited); per-frame writes are serialized behind one lock;
stale-revision edits get 409 so the client can refetch and retry.
"""

from __future__ import annotations

import threading
from pathlib import Path

from fastapi import Depends, FastAPI, HTTPException, Query, Request, Response
from fastapi.responses import FileResponse, JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .labels import (
    Difficulty,
    IllegalTransitionError,
    LabelStore,
    ReviewConflictError,
    ReviewEdit,
    split_frame_key,
)


class BboxBody(BaseModel):
    x_c: float
    y_c: float
    w: float
    h: float


class EditBody(BaseModel):
    action: str  # confirm | adjust | replace | no_object | difficulty
    bbox: BboxBody | None = None
    difficulty: str | None = None
    editor: str = "anonymous"
    revision: int | None = None  # the revision this edit was based on


def _record_json(store: LabelStore, key: str) -> dict:
    record = store.get(key)
    info = store.frame_info(key)
    queue_item = next((q for q in store.queue(False) if q.frame == key), None)
    return {
        "frame": key,
        "record": record.to_json() if record else None,
        "frame_info": info.to_json() if info else None,
        "queue": queue_item.to_json() if queue_item else None,
    }


def create_app(
    store: LabelStore | Path | str,
    token: str | None = None,
    ui_dir: Path | str | None = None,
) -> FastAPI:
    if not isinstance(store, LabelStore):
        store = LabelStore(store)
    write_lock = threading.Lock()
    app = FastAPI(title="shuttle-annotate review service")

    def check_token(request: Request) -> None:
        if token is not None and request.headers.get("x-annotate-token") != token:
            raise HTTPException(status_code=401, detail="missing or bad token")

    auth = Depends(check_token)

    @app.get("/sequences", dependencies=[auth])
    def sequences():
        out = []
        for seq in store.sequences():
            frames = store.frames(seq)
            statuses: dict[str, int] = {}
            for f in frames:
                rec = store.get(f.key)
                key = rec.status.value if rec else "pending"
                statuses[key] = statuses.get(key, 0) + 1
            out.append({"sequence_id": seq, "frames": len(frames), "statuses": statuses})
        return out

    @app.get("/sequences/{sequence_id}/frames", dependencies=[auth])
    def sequence_frames(sequence_id: str, status: str | None = Query(default=None)):
        frames = store.frames(sequence_id)
        if not frames:
            raise HTTPException(status_code=404, detail=f"unknown sequence {sequence_id}")
        out = []
        for f in frames:
            rec = store.get(f.key)
            effective = rec.status.value if rec else "pending"
            if status is not None and effective != status:
                continue
            out.append(
                {
                    "frame": f.key,
                    "frame_index": f.frame_index,
                    "status": effective,
                    "difficulty": rec.difficulty.value if rec and rec.difficulty else None,
                    "revision": rec.revision if rec else None,
                }
            )
        return out

    @app.get("/frames/{frame_id}/label", dependencies=[auth])
    def get_label(frame_id: str):
        if store.frame_info(frame_id) is None and store.get(frame_id) is None:
            raise HTTPException(status_code=404, detail=f"unknown frame {frame_id}")
        return _record_json(store, frame_id)

    @app.put("/frames/{frame_id}/label", dependencies=[auth])
    def put_label(frame_id: str, body: EditBody):
        if store.frame_info(frame_id) is None and store.get(frame_id) is None:
            raise HTTPException(status_code=404, detail=f"unknown frame {frame_id}")
        try:
            edit = ReviewEdit(
                kind=body.action,
                bbox=(
                    (body.bbox.x_c, body.bbox.y_c, body.bbox.w, body.bbox.h)
                    if body.bbox
                    else None
                ),
                difficulty=Difficulty(body.difficulty) if body.difficulty else None,
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        with write_lock:
            try:
                record = store.record_review(
                    frame_id, edit, body.editor, expected_revision=body.revision
                )
            except ReviewConflictError as exc:
                return JSONResponse(
                    status_code=409,
                    content={"detail": str(exc), "current_revision": exc.actual},
                )
            except IllegalTransitionError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from None
            except (KeyError, ValueError) as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from None
        return record.to_json()

    @app.get("/frames/{frame_id}/image", dependencies=[auth])
    def get_image(frame_id: str):
        info = store.frame_info(frame_id)
        path = info.frame_path if info else None
        if path is None:
            rec = store.get(frame_id)
            path = rec.frame_path if rec else None
        if path is None or not Path(path).exists():
            raise HTTPException(status_code=404, detail=f"no image for frame {frame_id}")
        return FileResponse(path, media_type="image/png")

    @app.get("/frames/{frame_id}/mask", dependencies=[auth])
    def get_mask(frame_id: str):
        # foreground-mask dumps are optional pipeline debug output
        info = store.frame_info(frame_id)
        if info is None:
            raise HTTPException(status_code=404, detail=f"unknown frame {frame_id}")
        path = store.root / "debug" / "masks" / f"{info.frame_index:06d}.png"
        if not path.exists():
            raise HTTPException(status_code=404, detail=f"no mask dump for {frame_id}")
        return FileResponse(path, media_type="image/png")

    @app.get("/frames/{frame_id}/context", dependencies=[auth])
    def get_context(frame_id: str, n: int = Query(default=2, ge=0, le=30)):
        info = store.frame_info(frame_id)
        if info is None:
            raise HTTPException(status_code=404, detail=f"unknown frame {frame_id}")
        seq, idx = split_frame_key(frame_id)
        frames = []
        for i in range(idx - n, idx + n + 1):
            key = f"{seq}:{i:06d}"
            if store.frame_info(key) is None and store.get(key) is None:
                continue
            frames.append(_record_json(store, key))
        return {"center": frame_id, "n": n, "frames": frames}

    @app.get("/queue", dependencies=[auth])
    def get_queue(all: bool = Query(default=False)):
        return [q.to_json() for q in store.queue(pending_only=not all)]

    @app.get("/stats", dependencies=[auth])
    def get_stats(background: str | None = Query(default=None)):
        return store.stats(background_id=background)

    if ui_dir is not None and Path(ui_dir).exists():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    app.state.store = store
    return app


def serve(
    store_dir: Path | str,
    port: int = 8750,
    host: str = "127.0.0.1",
    token: str | None = None,
    ui_dir: Path | str | None = None,
) -> None:
    import uvicorn

    store = LabelStore(store_dir)
    store.acquire_lock("serve")
    try:
        app = create_app(store, token=token, ui_dir=ui_dir)
        uvicorn.run(app, host=host, port=port, log_level="info")
    finally:
        store.release_lock()
