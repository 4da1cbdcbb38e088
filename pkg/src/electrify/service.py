"""JSON-over-HTTP what-if valuation service.

State loaded at startup (feed, geo tables, model, profile defaults) is
immutable; every request is a pure function of that state plus the request
body, so identical requests always return identical bodies. Parameter
overrides live only inside their request.

Status codes: 400 malformed request body, 404 unknown city or route ids
(listing them), 422 parameter overrides that violate an invariant (naming
the field).
"""

from __future__ import annotations

import json
import threading
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict

from .errors import ConfigError, ElectrifyError, UnknownRouteName
from .pipeline import LoadedState, valuation_report


class ValuationRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    route_ids: list[str]
    overrides: dict = {}


def create_app(state: LoadedState, report_path: Path | None = None) -> FastAPI:
    app = FastAPI(title="electrify", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],  # the dashboard is served from a separate static origin
        allow_methods=["*"],
        allow_headers=["*"],
    )

    latest_lock = threading.Lock()
    latest_report: dict = {}
    if report_path is not None and report_path.exists():
        latest_report = json.loads(report_path.read_text(encoding="utf-8"))

    @app.exception_handler(RequestValidationError)
    async def malformed_request(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": "MalformedRequest", "detail": exc.errors()})

    @app.get("/api/health")
    def health():
        return {"status": "ok", "city": state.city_id, "model_hash": state.model.content_hash}

    @app.get("/api/cities")
    def cities():
        return [
            {
                "id": state.city_id,
                "profile": state.profile.name,
                "route_count": len(state.route_ids),
                "bus_size": state.bus_size,
            }
        ]

    @app.get("/api/cities/{city_id}/routes")
    def routes(city_id: str):
        if city_id != state.city_id:
            return JSONResponse(
                status_code=404,
                content={"error": "UnknownCity", "unknown_city": city_id},
            )
        return [
            {
                "route_id": rid,
                "short_name": state.feed.routes[rid].short_name,
                "clusters": len(state.clusters[rid]),
                "trips": len(state.feed.trips_of_route(rid)),
            }
            for rid in state.route_ids
        ]

    @app.post("/api/valuate")
    def valuate(request: ValuationRequest):
        if not request.route_ids:
            return JSONResponse(
                status_code=400,
                content={"error": "MalformedRequest", "detail": "route_ids must be non-empty"},
            )
        unknown = sorted(set(request.route_ids) - set(state.route_ids))
        if unknown:
            return JSONResponse(
                status_code=404,
                content={"error": "UnknownRouteName", "unknown_route_ids": unknown},
            )
        try:
            report = valuation_report(state, request.route_ids, request.overrides)
        except ConfigError as exc:
            return JSONResponse(
                status_code=422,
                content={"error": exc.category, "field": exc.field, "message": exc.message},
            )
        except UnknownRouteName as exc:
            return JSONResponse(
                status_code=404,
                content={"error": exc.category, "message": exc.message},
            )
        with latest_lock:
            latest_report.clear()
            latest_report.update(report)
        return report

    @app.get("/api/report/latest")
    def report_latest():
        with latest_lock:
            if not latest_report:
                return JSONResponse(status_code=404, content={"error": "NoReport"})
            return dict(latest_report)

    @app.exception_handler(ElectrifyError)
    async def pipeline_error(request: Request, exc: ElectrifyError):
        return JSONResponse(status_code=500, content={"error": exc.category, "message": exc.message})

    return app
