"""HTTP annotation service consumed by the browser UI.

Resource-oriented JSON API under /api/v1/sessions. Every mutation body
carries the session version the client last read; stale writes get a 409
with code version_conflict. Error payloads are {"detail": {"code", "message",
...}} so clients can branch on the code.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from keeperkit import session as sessions
from keeperkit.document import DocumentError
from keeperkit.model import FrameDims, ValidationError
from keeperkit.session import SessionError, SessionStore


class CreateSessionBody(BaseModel):
    source_id: str | None = None
    label: str = "hit"
    width: int | None = None
    height: int | None = None
    images_dir: str | None = None
    detections_dir: str | None = None


class VersionBody(BaseModel):
    version: int


class BallBody(VersionBody):
    pixel: list[float]


class JointBody(VersionBody):
    joint: str
    pixel: list[float]


class UndoJointBody(VersionBody):
    joint: str


class OverridesBody(VersionBody):
    goal_index: int | None = None
    blocking_joint: str | None = None


class CorrectBody(VersionBody):
    goal_index: int | None = None
    blocking_joint: str | None = None
    iterations: int | None = None
    tolerance: float | None = None


def create_app(data_dir: Path | str, ui_dir: Path | str | None = None) -> FastAPI:
    store = SessionStore(data_dir)
    app = FastAPI(title="keeperkit annotation service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(SessionError)
    async def session_error_handler(request: Request, exc: SessionError) -> JSONResponse:
        detail = {"code": exc.code, "message": exc.message, **exc.extra}
        return JSONResponse(status_code=exc.status, content={"detail": detail})

    @app.exception_handler(ValidationError)
    async def validation_error_handler(request: Request, exc: ValidationError) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={"detail": {"code": "validation_error", "message": str(exc)}},
        )

    @app.exception_handler(DocumentError)
    async def document_error_handler(request: Request, exc: DocumentError) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={"detail": {"code": "invalid_document", "message": str(exc), "errors": exc.errors}},
        )

    @app.get("/api/v1/sessions")
    def list_sessions() -> dict:
        summaries = []
        for sid in store.list_ids():
            s = store.load(sid)
            summaries.append(
                {
                    "session_id": s.session_id,
                    "source_id": s.source_id,
                    "label": s.label,
                    "created": s.created,
                    "updated": s.updated,
                    "version": s.version,
                    "incomplete_frames": s.incomplete_indices(),
                }
            )
        return {"sessions": summaries}

    @app.post("/api/v1/sessions", status_code=201)
    def create_session(body: CreateSessionBody) -> dict:
        if body.detections_dir is not None:
            dims = None
            if body.width is not None and body.height is not None:
                dims = FrameDims(body.width, body.height)
            s = sessions.create_session_from_import(
                store,
                detections_dir=body.detections_dir,
                images_dir=body.images_dir,
                dims=dims,
                source_id=body.source_id,
                label=body.label,
            )
            return s.to_obj()
        if body.width is None or body.height is None:
            raise SessionError(
                "bad_input", "width and height are required without a detections_dir", 400
            )
        s = store.create(
            dims=FrameDims(body.width, body.height),
            source_id=body.source_id,
            label=body.label,
        )
        return s.to_obj()

    @app.get("/api/v1/sessions/{sid}")
    def get_session(sid: str) -> dict:
        return store.load(sid).to_obj()

    @app.get("/api/v1/sessions/{sid}/frames/{index}/image")
    def get_frame_image(sid: str, index: int) -> Response:
        s = store.load(sid)
        slot = s.frame(index)
        if slot.image is None:
            raise SessionError("no_image", f"frame {index} has no image", 404)
        path = store.session_dir(sid) / slot.image
        media = sessions.image_media_type(slot.image)
        if not path.is_file() or media is None:
            raise SessionError("no_image", f"frame {index} image file is missing", 404)
        return Response(content=path.read_bytes(), media_type=media)

    @app.post("/api/v1/sessions/{sid}/frames/{index}/accept")
    def accept(sid: str, index: int, body: VersionBody) -> dict:
        s = store.mutate(sid, body.version, lambda s: sessions.accept_candidate(s, index))
        return s.to_obj()

    @app.post("/api/v1/sessions/{sid}/frames/{index}/reject")
    def reject(sid: str, index: int, body: VersionBody) -> dict:
        s = store.mutate(sid, body.version, lambda s: sessions.reject_candidate(s, index))
        return s.to_obj()

    @app.post("/api/v1/sessions/{sid}/frames/{index}/ball")
    def ball(sid: str, index: int, body: BallBody) -> dict:
        s = store.mutate(sid, body.version, lambda s: sessions.set_ball(s, index, body.pixel))
        return s.to_obj()

    @app.post("/api/v1/sessions/{sid}/frames/{index}/joints")
    def place_joint(sid: str, index: int, body: JointBody) -> dict:
        s = store.mutate(
            sid, body.version, lambda s: sessions.set_joint(s, index, body.joint, body.pixel)
        )
        return s.to_obj()

    @app.post("/api/v1/sessions/{sid}/frames/{index}/joints/undo")
    def undo_joint(sid: str, index: int, body: UndoJointBody) -> dict:
        s = store.mutate(sid, body.version, lambda s: sessions.clear_joint(s, index, body.joint))
        return s.to_obj()

    @app.put("/api/v1/sessions/{sid}/overrides")
    def overrides(sid: str, body: OverridesBody) -> dict:
        s = store.mutate(
            sid,
            body.version,
            lambda s: sessions.set_overrides(s, body.goal_index, body.blocking_joint),
        )
        return s.to_obj()

    @app.post("/api/v1/sessions/{sid}/correct")
    def correct(sid: str, body: CorrectBody) -> dict:
        result: dict = {}

        def run(s: sessions.Session) -> None:
            report, corrected = sessions.run_correction(
                s,
                goal_index=body.goal_index,
                blocking_joint=body.blocking_joint,
                iterations=body.iterations,
                tolerance=body.tolerance,
            )
            result["report"] = report
            result["corrected"] = corrected

        s = store.mutate(sid, body.version, run)
        result["version"] = s.version
        return result

    @app.get("/api/v1/sessions/{sid}/corrected")
    def corrected(sid: str) -> dict:
        s = store.load(sid)
        if s.last_preview is None:
            raise SessionError("no_preview", "no correction has been run for this session", 404)
        return s.last_preview

    @app.get("/api/v1/sessions/{sid}/export")
    def export(sid: str) -> dict:
        return sessions.export_document(store.load(sid))

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
