"""HTTP service over a workspace.

Endpoints (JSON bodies, UTF-8; errors as {code, message, detail}):

    GET  /healthz
    GET  /networks/{id}        PUT /networks/{id}
    GET  /overlays/{id}        PUT /overlays/{id}
    POST /simulate             {network, overlay?, targets, n, seed} -> 202 + run
    GET  /runs/{id}            run record (status running/complete)
    GET  /runs/{id}/samples.csv
    POST /diff                 {a, b} -> {added, removed, changed}

Simulation is synchronous under a configurable time budget (desk-scale runs
finish in well under a second); a run that exceeds the budget keeps going in
a worker thread and the 202 response carries only the run id for polling.
Status codes: 400 validation, 404 unknown id, 409 duplicate PUT of an
immutable document, 422 semantic errors (unknown target, overlay that does
not apply).
"""

from __future__ import annotations

import json
import threading

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from ..errors import BeliefcastError, NetworkFormatError, UnknownTarget
from ..network import serialize_network
from ..scenario import apply_overlay, diff_networks, overlay_from_doc
from .workspace import (
    DuplicateDocument,
    UnknownDocument,
    Workspace,
    execute_run,
    new_run_id,
)

DEFAULT_TIME_BUDGET = 30.0


class SimulateRequest(BaseModel):
    network: str
    overlay: str | None = None
    targets: list[str]
    n: int
    seed: int


class DiffRequest(BaseModel):
    a: str
    b: str


def _error(status: int, code: str, message: str, detail=None) -> JSONResponse:
    return JSONResponse(status_code=status,
                        content={"code": code, "message": message, "detail": detail})


def create_app(workspace: Workspace, time_budget: float = DEFAULT_TIME_BUDGET,
               static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="beliefcast", version="0.1.0")
    running: dict[str, str] = {}
    running_lock = threading.Lock()

    @app.exception_handler(RequestValidationError)
    async def _validation_handler(request: Request, exc: RequestValidationError):
        detail = [{"loc": [str(x) for x in e.get("loc", ())], "msg": str(e.get("msg"))}
                  for e in exc.errors()]
        return _error(400, "validation", "request body failed validation", detail=detail)

    @app.exception_handler(BeliefcastError)
    async def _domain_handler(request: Request, exc: BeliefcastError):
        if isinstance(exc, UnknownDocument):
            return _error(404, "not-found", str(exc))
        if isinstance(exc, DuplicateDocument):
            return _error(409, "immutable", str(exc))
        if isinstance(exc, NetworkFormatError):
            return _error(400, "validation", str(exc))
        return _error(422, "semantic", str(exc))

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.get("/networks/{doc_id}")
    def get_network(doc_id: str):
        return json.loads(workspace.get_network_text(doc_id))

    @app.put("/networks/{doc_id}")
    def put_network(doc_id: str, document: dict):
        net = workspace.put_network(doc_id, document)
        return {"id": doc_id, "nodes": len(net.nodes)}

    @app.get("/overlays/{doc_id}")
    def get_overlay(doc_id: str):
        return json.loads(workspace.get_overlay_text(doc_id))

    @app.put("/overlays/{doc_id}")
    def put_overlay(doc_id: str, document: dict):
        workspace.put_overlay(doc_id, document)
        return {"id": doc_id}

    @app.get("/networks")
    def list_networks():
        return {"networks": workspace.list_ids("networks")}

    @app.get("/overlays")
    def list_overlays():
        return {"overlays": workspace.list_ids("overlays")}

    @app.get("/runs")
    def list_runs():
        with running_lock:
            pending = sorted(running)
        return {"runs": workspace.list_ids("runs"), "running": pending}

    @app.post("/simulate", status_code=202)
    def simulate(req: SimulateRequest):
        if req.n < 1:
            return _error(422, "semantic", "n must be >= 1")
        net = workspace.load_network(req.network)
        if req.overlay:
            overlay = overlay_from_doc(json.loads(workspace.get_overlay_text(req.overlay)))
            net = apply_overlay(net, overlay)
        for t in req.targets:
            if t not in net.nodes:
                raise UnknownTarget(t)
        run_id = new_run_id()
        record_box: dict = {}

        def work():
            try:
                record = execute_run(net, req.targets, req.n, req.seed,
                                     network_id=req.network, overlay_id=req.overlay,
                                     run_id=run_id)
                workspace.write_run(record)
                record_box["record"] = record
            finally:
                with running_lock:
                    running.pop(run_id, None)

        with running_lock:
            running[run_id] = "running"
        worker = threading.Thread(target=work, daemon=True)
        worker.start()
        worker.join(time_budget)
        if worker.is_alive():
            return {"run_id": run_id, "status": "running"}
        record = record_box.get("record")
        if record is None:  # worker raised; surface as a semantic error
            return _error(422, "semantic", f"run {run_id} failed")
        return record.to_doc()

    @app.get("/runs/{run_id}")
    def get_run(run_id: str):
        with running_lock:
            if run_id in running:
                return {"run_id": run_id, "status": "running"}
        return json.loads(workspace.get_run_text(run_id))

    @app.put("/runs/{run_id}")
    def put_run(run_id: str):
        return _error(409, "immutable", "run records are immutable and system-generated")

    @app.get("/runs/{run_id}/samples.csv")
    def get_run_csv(run_id: str):
        return Response(content=workspace.get_run_csv(run_id), media_type="text/csv")

    @app.post("/diff")
    def diff(req: DiffRequest):
        a = workspace.load_network(req.a)
        b = workspace.load_network(req.b)
        d = diff_networks(a, b)
        return {"added": list(d.added), "removed": list(d.removed),
                "changed": list(d.changed)}

    if static_dir:
        from fastapi.staticfiles import StaticFiles
        app.mount("/ui", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
