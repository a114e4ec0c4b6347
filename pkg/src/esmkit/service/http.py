"""HTTP API: thin adapters from routes onto the experiment facade.

Every response carries a stable schema version. A `now` field (query or
body) injects the clock for deterministic runs; absent, handlers use wall
clock. Errors map onto 401 (role), 404 (unknown id), 409 (illegal state),
422 (schema or vocabulary).
"""

from __future__ import annotations

from datetime import datetime
from pathlib import Path

from fastapi import Body, FastAPI, Query, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .. import clock
from ..errors import EsmkitError, SchemaError
from .core import SCHEMA_VERSION, ExperimentService


def _now_from(value: str | None, body: dict | None = None) -> datetime:
    raw = value or (body or {}).get("now")
    if raw is None:
        return clock.now_utc()
    try:
        return clock.parse_iso(raw)
    except ValueError as exc:
        raise SchemaError(f"invalid timestamp: {raw!r}") from exc


def _token_from(request: Request) -> str | None:
    header = request.headers.get("authorization", "")
    if header.lower().startswith("bearer "):
        return header[7:].strip()
    return request.query_params.get("token")


def _date(value: str | None, fallback: str):
    return clock.parse_iso_date(value) if value else clock.parse_iso_date(fallback)


def _ok(payload) -> dict:
    return {"schema_version": SCHEMA_VERSION, "data": payload}


def create_app(service: ExperimentService) -> FastAPI:
    app = FastAPI(title="esmkit", version=SCHEMA_VERSION, docs_url=None, redoc_url=None)
    app.state.service = service

    @app.exception_handler(EsmkitError)
    async def domain_error(_request: Request, exc: EsmkitError):
        return JSONResponse(
            status_code=exc.status_code,
            content={"schema_version": SCHEMA_VERSION, **exc.to_doc()},
        )

    @app.post("/plans")
    def create_plan(request: Request, body: dict = Body(...)):
        now = _now_from(None, body)
        return _ok(service.create_plan(body.get("plan", body), token=_token_from(request), now=now))

    @app.post("/participants")
    def enroll(request: Request, body: dict = Body(...)):
        now = _now_from(None, body)
        return _ok(service.enroll_participant(body, token=_token_from(request), now=now))

    @app.get("/participants/{participant}/tasks")
    def tasks(participant: str, request: Request, now: str | None = Query(default=None)):
        return _ok(service.get_tasks(participant, token=_token_from(request), now=_now_from(now)))

    @app.get("/participants/{participant}/schedule")
    def schedule(participant: str, request: Request):
        return _ok(service.schedule(participant, token=_token_from(request)))

    @app.post("/answers")
    def answers(request: Request, body: dict = Body(...)):
        now = _now_from(None, body)
        return _ok(service.submit_answers(body, token=_token_from(request), now=now))

    @app.post("/sensors/batch")
    def sensors(request: Request, body: dict = Body(...)):
        now = _now_from(None, body)
        return _ok(service.submit_sensors(body, token=_token_from(request), now=now))

    @app.post("/replan")
    def replan(request: Request, body: dict = Body(...)):
        now = _now_from(None, body)
        return _ok(service.replan(body, token=_token_from(request), now=now))

    @app.post("/scheduler/train")
    def train(request: Request, body: dict = Body(default={})):
        now = _now_from(None, body)
        return _ok(service.train(body, token=_token_from(request), now=now))

    @app.get("/participants/{participant}/avoid-windows")
    def avoid_windows(participant: str, request: Request, date: str = Query(...)):
        return _ok(
            service.avoid_windows(
                participant, clock.parse_iso_date(date), token=_token_from(request)
            )
        )

    @app.post("/tick")
    def tick(request: Request, body: dict = Body(default={})):
        service._require_researcher(_token_from(request))
        return _ok(service.tick(_now_from(None, body)))

    @app.get("/dashboard/summary")
    def summary(
        request: Request,
        participant: str = Query(...),
        start: str = Query(...),
        end: str = Query(...),
    ):
        return _ok(
            service.summary(
                participant,
                clock.parse_iso_date(start),
                clock.parse_iso_date(end),
                token=_token_from(request),
            )
        )

    @app.get("/dashboard/compare")
    def compare(
        request: Request,
        ids: str = Query(...),
        start: str = Query(...),
        end: str = Query(...),
        metric: str = Query(default="answered"),
    ):
        participants = [p for p in ids.split(",") if p]
        return _ok(
            service.compare(
                participants,
                clock.parse_iso_date(start),
                clock.parse_iso_date(end),
                metric,
                token=_token_from(request),
            )
        )

    @app.get("/dashboard/rank")
    def rank(
        request: Request,
        start: str = Query(...),
        end: str = Query(...),
        order: str = Query(default="most"),
        limit: int | None = Query(default=None),
    ):
        return _ok(
            service.rank(
                clock.parse_iso_date(start),
                clock.parse_iso_date(end),
                order=order,
                limit=limit,
                token=_token_from(request),
            )
        )

    @app.get("/alerts")
    def alerts(
        request: Request,
        now: str | None = Query(default=None),
        participant: str | None = Query(default=None),
    ):
        return _ok(
            service.alerts(_now_from(now), token=_token_from(request), participant=participant)
        )

    @app.get("/goals")
    def list_goals(
        request: Request,
        participant: str | None = Query(default=None),
        now: str | None = Query(default=None),
    ):
        return _ok(
            service.goals(token=_token_from(request), participant=participant, now=_now_from(now))
        )

    @app.post("/goals")
    def set_goal(request: Request, body: dict = Body(...)):
        now = _now_from(None, body)
        return _ok(service.set_goal(body.get("goal", body), token=_token_from(request), now=now))

    @app.delete("/goals/{goal_id}")
    def remove_goal(goal_id: str, request: Request, now: str | None = Query(default=None)):
        return _ok(service.remove_goal(goal_id, token=_token_from(request), now=_now_from(now)))

    ui_dir = service.config.static_ui_dir
    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
