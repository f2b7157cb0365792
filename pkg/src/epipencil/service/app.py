"""FastAPI application: the JSON API behind the annotator UI.

Stateless by construction: every request carries its full problem, and
handlers share only immutable configuration, so concurrent requests need
no coordination. Solver degeneracies surface as 422 with a structured
reason (the UI tells the user to pick a different point); malformed
bodies are 400.
"""

from __future__ import annotations

import os
from importlib import resources

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import HTMLResponse, Response
from fastapi.staticfiles import StaticFiles

from ..errors import GeometryError
from .handlers import fmatrix_from_request, solve_problem
from .models import ErrorBody, ErrorResponse, FmatrixRequest, ProblemFile

DEFAULT_PORT_ENV = "EPIPENCIL_PORT"
UI_DIR_ENV = "EPIPENCIL_UI_DIR"


def _error_response(status: int, code: str, message: str, detail=None) -> Response:
    body = ErrorResponse(error=ErrorBody(code=code, message=message, detail=detail))
    return Response(
        content=body.model_dump_json(exclude_none=True),
        status_code=status,
        media_type="application/json",
    )


def _json(model) -> Response:
    return Response(content=model.model_dump_json(), media_type="application/json")


def _find_ui_dir() -> str | None:
    env = os.environ.get(UI_DIR_ENV)
    if env and os.path.isfile(os.path.join(env, "index.html")):
        return env
    here = os.path.dirname(os.path.abspath(__file__))
    for up in ("../../..", "../../../.."):
        cand = os.path.normpath(os.path.join(here, up, "frontend", "dist"))
        if os.path.isfile(os.path.join(cand, "index.html")):
            return cand
    return None


def create_app() -> FastAPI:
    app = FastAPI(title="epipencil", docs_url="/api/docs", openapi_url="/api/openapi.json")

    @app.exception_handler(GeometryError)
    async def _geometry_error(_: Request, exc: GeometryError):
        # data-dependent degeneracy, not a crash: the caller must adjust inputs
        detail = {k: v for k, v in exc.detail.items()} or None
        return _error_response(422, exc.code, exc.message, detail)

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_: Request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        where = ".".join(str(p) for p in first.get("loc", []) if p != "body")
        msg = first.get("msg", "invalid request body")
        message = f"{where}: {msg}" if where else msg
        return _error_response(400, "invalid_input", message)

    @app.exception_handler(ValueError)
    async def _value_error(_: Request, exc: ValueError):
        return _error_response(400, "invalid_input", str(exc))

    @app.get("/api/health")
    def health():
        return {"status": "ok"}

    @app.post("/api/solve")
    def solve(problem: ProblemFile, fmatrix: bool = False, samples: int = 256):
        return _json(solve_problem(problem, with_fmatrix=fmatrix, n_samples=samples))

    @app.post("/api/fmatrix")
    def fmatrix_endpoint(req: FmatrixRequest):
        return _json(fmatrix_from_request(req))

    ui_dir = _find_ui_dir()
    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    else:
        fallback = (
            resources.files("epipencil") / "static" / "index.html"
        ).read_text(encoding="utf-8")

        @app.get("/", response_class=HTMLResponse)
        def index():
            return fallback

    return app


def main(host: str = "127.0.0.1", port: int | None = None):
    import uvicorn

    if port is None:
        port = int(os.environ.get(DEFAULT_PORT_ENV, "8000"))
    uvicorn.run(create_app(), host=host, port=port)
