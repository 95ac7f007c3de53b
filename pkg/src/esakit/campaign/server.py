"""HTTP front door for the annotation service.

Payloads are the canonical record schemas from the export files. A shared
annotator token (optional) is the only authentication; set it when creating
the app and send ``Authorization: Bearer <token>``.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

from fastapi import Depends, FastAPI, HTTPException, Request
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from ..model import ErrorSpan
from .service import DONE, CampaignService, ServiceError


class RegisterBody(BaseModel):
    annotator_id: str


class ClaimBody(BaseModel):
    annotator_id: str


class SubmitBody(BaseModel):
    annotator_id: str
    segment_id: str
    spans: list[dict] = Field(default_factory=list)
    direct_score: int
    client_elapsed: Optional[float] = None


class ExportBody(BaseModel):
    out_dir: Optional[str] = None


def create_app(
    service: CampaignService,
    token: Optional[str] = None,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="esa annotation service")

    def check_token(request: Request) -> None:
        if token is None:
            return
        header = request.headers.get("authorization", "")
        if header != f"Bearer {token}":
            raise HTTPException(status_code=401, detail="missing or wrong annotator token")

    guarded = Depends(check_token)

    @app.post("/api/register", dependencies=[guarded])
    def register(body: RegisterBody):
        try:
            batch_id = service.register(body.annotator_id)
        except ServiceError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        progress = service.progress()["annotators"][body.annotator_id]
        return {"batch_id": batch_id, "done": progress["done"], "total": progress["total"]}

    @app.post("/api/claim", dependencies=[guarded])
    def claim(body: ClaimBody):
        try:
            task = service.claim_next(body.annotator_id)
        except ServiceError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        if task is DONE:
            return {"done": True}
        context = service.document_context(task.segment_id, body.annotator_id)
        return {
            "done": False,
            "task": task.to_dict(),
            "document": [t.to_dict() for t in context],
        }

    @app.post("/api/submit", dependencies=[guarded])
    def submit(body: SubmitBody):
        try:
            spans = tuple(ErrorSpan.from_dict(span) for span in body.spans)
        except (KeyError, ValueError) as exc:
            raise HTTPException(status_code=422, detail=f"malformed span: {exc}")
        try:
            annotation = service.submit(
                annotator_id=body.annotator_id,
                segment_id=body.segment_id,
                spans=spans,
                direct_score=body.direct_score,
                client_elapsed=body.client_elapsed,
            )
        except ServiceError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {"ok": True, "sequence_index": annotation.sequence_index}

    @app.get("/api/progress", dependencies=[guarded])
    def progress():
        return service.progress()

    @app.post("/api/export", dependencies=[guarded])
    def export(body: ExportBody):
        out = Path(body.out_dir) if body.out_dir else service.directory / "export"
        service.export().write(out)
        return {"directory": str(out)}

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    return app
