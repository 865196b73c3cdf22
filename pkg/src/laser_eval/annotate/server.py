"""HTTP API over the annotation store, plus the static UI bundle at /."""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Query, Request, Response
from fastapi.responses import HTMLResponse, JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .store import AnnotationStore, StaleTask, ValidationFailure

__all__ = ["create_app", "find_ui_dir"]


class LabelIn(BaseModel):
    pair_index: int
    level: int = Field(ge=0, le=3)
    category: str = "other"
    reason: str = ""


class SubmitIn(BaseModel):
    annotator: str
    labels: list[LabelIn]


_FALLBACK_PAGE = """<!doctype html>
<html><head><title>annotation API</title></head>
<body>
<h1>Annotation server</h1>
<p>No UI bundle found. Build the frontend (frontend/dist) or use the API:</p>
<ul>
<li>GET /api/tasks/next?annotator=ID</li>
<li>GET /api/tasks/{id}</li>
<li>POST /api/tasks/{id}/labels</li>
<li>GET /api/export?format=appendixB|pairs</li>
<li>GET /api/progress</li>
</ul>
</body></html>
"""


def find_ui_dir(start: Path | None = None) -> Path | None:
    """Locate a built frontend bundle near the package or working directory."""
    candidates = []
    if start:
        candidates.append(Path(start))
    here = Path(__file__).resolve()
    candidates += [
        Path.cwd() / "frontend" / "dist",
        here.parents[3] / "frontend" / "dist",  # repo layout: src/laser_eval/annotate/
    ]
    for cand in candidates:
        if cand.is_dir() and (cand / "index.html").is_file():
            return cand
    return None


def create_app(store: AnnotationStore, ui_dir: Path | str | None = None) -> FastAPI:
    app = FastAPI(title="annotation server", docs_url=None, redoc_url=None)

    @app.exception_handler(ValidationFailure)
    async def _validation(_req: Request, exc: ValidationFailure):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.exception_handler(StaleTask)
    async def _stale(_req: Request, exc: StaleTask):
        return JSONResponse(status_code=409, content={"error": str(exc)})

    @app.get("/api/tasks/next")
    def next_task(annotator: str = Query(...)):
        task = store.next_task(annotator)
        if task is None:
            return Response(status_code=204)
        return task

    @app.get("/api/tasks/{task_id}")
    def get_task(task_id: str):
        task = store.get(task_id)
        if task is None:
            return JSONResponse(status_code=404, content={"error": f"no task {task_id!r}"})
        return task

    @app.post("/api/tasks/{task_id}/labels")
    def submit(task_id: str, body: SubmitIn):
        return store.submit(
            task_id, body.annotator, [label.model_dump() for label in body.labels]
        )

    @app.get("/api/export")
    def export(format: str = Query(...), seed: int = 0):
        payload = store.export_annotations(format, seed=seed)
        media = "text/tab-separated-values" if format == "appendixB" else "application/jsonl"
        return PlainTextResponse(payload, media_type=media)

    @app.get("/api/progress")
    def progress():
        return store.progress()

    resolved = find_ui_dir(Path(ui_dir) if ui_dir else None)
    if resolved:
        app.mount("/", StaticFiles(directory=resolved, html=True), name="ui")
    else:
        @app.get("/", response_class=HTMLResponse)
        def index():
            return _FALLBACK_PAGE

    return app
