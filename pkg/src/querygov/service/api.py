"""HTTP API over the query service.

POST /query submits and returns a job id immediately; GET /status, /result,
and /history mirror the job lifecycle. The session token arrives in the
Authorization header (Bearer or raw).
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException, Query, Request
from pydantic import BaseModel

from .jobs import JobNotFound, QueryService, SessionError


class QueryRequest(BaseModel):
    question: str
    language: str | None = None


def _token(request: Request) -> str:
    header = request.headers.get("authorization", "")
    if header.lower().startswith("bearer "):
        return header[7:].strip()
    return header.strip()


def build_app(service: QueryService, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="querygov", version="0.1.0")

    @app.post("/query", status_code=202)
    def submit(request: Request, body: QueryRequest):
        try:
            job_id = service.submit_query(
                body.question, body.language, _token(request)
            )
        except SessionError:
            raise HTTPException(status_code=401, detail="invalid session")
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"job_id": job_id}

    @app.get("/status/{job_id}")
    def status(request: Request, job_id: str):
        try:
            return service.get_status(job_id, _token(request))
        except SessionError:
            raise HTTPException(status_code=401, detail="invalid session")
        except JobNotFound:
            raise HTTPException(status_code=404, detail="job not found")

    @app.get("/result/{job_id}")
    def result(request: Request, job_id: str):
        try:
            payload = service.get_result(job_id, _token(request))
        except SessionError:
            raise HTTPException(status_code=401, detail="invalid session")
        except JobNotFound:
            raise HTTPException(status_code=404, detail="job not found")
        if payload["status"] not in ("ready", "error"):
            raise HTTPException(status_code=409, detail="job is not finished")
        return payload

    @app.get("/history")
    def history(request: Request, limit: int = Query(default=20, ge=0, le=500)):
        try:
            return service.get_history(_token(request), limit)
        except SessionError:
            raise HTTPException(status_code=401, detail="invalid session")

    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
