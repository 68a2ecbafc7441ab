"""HTTP surface: document upload/analysis, courseware CRUD, streaming edits."""

from __future__ import annotations

import json

from fastapi import FastAPI, HTTPException, UploadFile
from fastapi.responses import StreamingResponse
from pydantic import BaseModel

from .gateway import AllModelsFailed, PageImage
from .knowledge import (
    DocumentPages,
    PageLimitExceeded,
    SchemaViolation,
    knowledge_from_dict,
)
from .service import CoursewareService, EditRequest, ElementSelector
from .service import ManualInputRequired
from .store import NotFound


class SelectorBody(BaseModel):
    xpath: str = ""
    css_selector: str = ""
    snippet: str = ""
    bounding_box: tuple[float, float, float, float] | None = None


class EditBody(BaseModel):
    element_selector: SelectorBody
    instruction: str
    context_html: str


class CoursewareCreateBody(BaseModel):
    knowledge: dict | None = None
    document_id: str | None = None


class RollbackBody(BaseModel):
    version: int


def _sse(events) -> "iter[str]":
    for event in events:
        yield f"event: {event['event']}\ndata: {json.dumps(event['data'])}\n\n"


def create_app(service: CoursewareService) -> FastAPI:
    app = FastAPI(title="courseforge", version="0.1.0")

    @app.post("/documents")
    async def upload_document(files: list[UploadFile]):
        pages = [
            PageImage(data=await f.read(), media_type=f.content_type or "image/png")
            for f in files
        ]
        try:
            document = DocumentPages(pages)
        except PageLimitExceeded as exc:
            raise HTTPException(status_code=413, detail=str(exc))
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        document_id = service.upload_document(document)
        return {"document_id": document_id, "page_count": document.page_count}

    @app.post("/documents/{document_id}/analyze")
    def analyze_document(document_id: str):
        try:
            return service.analyze_document(document_id).to_dict()
        except NotFound as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except ManualInputRequired as exc:
            raise HTTPException(
                status_code=422,
                detail={"error": "manual-input-required", "message": str(exc)},
            )
        except AllModelsFailed as exc:
            raise HTTPException(status_code=502, detail=str(exc))

    @app.post("/coursewares")
    def create_courseware(body: CoursewareCreateBody):
        if body.knowledge is None and body.document_id is None:
            raise HTTPException(status_code=422, detail="knowledge or document_id required")
        knowledge = None
        if body.knowledge is not None:
            try:
                knowledge = knowledge_from_dict(body.knowledge)
            except SchemaViolation as exc:
                raise HTTPException(status_code=422, detail=str(exc))
        try:
            courseware = service.generate_courseware(
                knowledge=knowledge, document_id=body.document_id
            )
        except NotFound as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except ManualInputRequired as exc:
            raise HTTPException(
                status_code=422,
                detail={"error": "manual-input-required", "message": str(exc)},
            )
        except AllModelsFailed as exc:
            raise HTTPException(status_code=502, detail=str(exc))
        return courseware.to_dict()

    @app.get("/coursewares/{courseware_id}")
    def get_courseware(courseware_id: str):
        try:
            return service.get_courseware(courseware_id).to_dict()
        except NotFound as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    @app.get("/coursewares/{courseware_id}/versions")
    def list_versions(courseware_id: str):
        try:
            courseware = service.get_courseware(courseware_id)
        except NotFound as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        return {
            "current_version": courseware.current_version,
            "versions": [v.to_dict() for v in courseware.versions],
        }

    @app.post("/coursewares/{courseware_id}/rollback")
    def rollback(courseware_id: str, body: RollbackBody):
        try:
            return service.rollback(courseware_id, body.version).to_dict()
        except NotFound as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    @app.post("/coursewares/{courseware_id}/edits")
    def submit_edit(courseware_id: str, body: EditBody):
        try:
            request = EditRequest(
                element_selector=ElementSelector(
                    xpath=body.element_selector.xpath,
                    css_selector=body.element_selector.css_selector,
                    snippet=body.element_selector.snippet,
                    bounding_box=body.element_selector.bounding_box,
                ),
                instruction=body.instruction,
                context_html=body.context_html,
            )
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        events = service.submit_edit(courseware_id, request)
        return StreamingResponse(_sse(events), media_type="text/event-stream")

    return app
