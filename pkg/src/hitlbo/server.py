"""HTTP bridge between running searches and a remote human expert.

Endpoints (JSON bodies, UTF-8, ISO-8601 timestamps):

* ``GET  /api/v1/runs`` - run summaries
* ``POST /api/v1/runs`` - start a run (search config + instance reference)
* ``GET  /api/v1/runs/{run_id}`` - run detail including the cell tree
* ``GET  /api/v1/queries?state=pending`` - pending expert queries
* ``POST /api/v1/queries/{query_id}/response`` - answer one query;
  200 on acceptance, 404 for an unknown id, 409 when the response
  contradicts the run's consistency ledger

Runs started over HTTP execute in a daemon thread and block on the bridge
while waiting for answers; a driver attached by the CLI (embedded mode)
shares the same registry so the console sees one uniform surface.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Literal

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .expert import ExpertBridge, ExpertResponse, LedgerContradiction
from .gp import PriorSpec
from .problems import parse_cnf, parse_graph, vertex_cover_instance
from .search import SearchConfig, SearchDriver, SearchSuspended


def _now_iso() -> str:
    return datetime.now(timezone.utc).isoformat()


class PriorWire(BaseModel):
    kernel: Literal["wiener", "se", "matern52"]
    variance: float = Field(gt=0)
    lengthscale: float | None = Field(default=None, gt=0)
    mean: float = 0.0
    annotation: str = ""


class InstanceRef(BaseModel):
    path: str | None = None
    text: str | None = None
    format: Literal["graph", "cnf"] = "graph"
    kind: str | None = None


class RunRequest(BaseModel):
    instance: InstanceRef
    config: dict = Field(default_factory=dict)


def load_instance(ref: InstanceRef):
    if (ref.path is None) == (ref.text is None):
        raise ValueError("instance reference needs exactly one of path or text")
    text = ref.text if ref.text is not None else Path(ref.path).read_text()
    instance = parse_cnf(text) if ref.format == "cnf" else parse_graph(text)
    if ref.kind == "min_vertex_cover":
        instance = vertex_cover_instance(instance.n, instance.edges)
    return instance


@dataclass
class RunHandle:
    run_id: str
    driver: SearchDriver
    created_at: str = field(default_factory=_now_iso)
    status: str = "running"
    thread: threading.Thread | None = None
    result: dict | None = None
    error: str | None = None
    resume_token: str | None = None

    def summary(self) -> dict:
        snap = self.driver.snapshot()
        return {
            "run_id": self.run_id,
            "status": self.status,
            "created_at": self.created_at,
            "best_value": None if snap["incumbent"] is None
            else snap["incumbent"]["value"],
            "expansions": snap["expansions"],
            "total_evaluations": snap["total_evaluations"],
            "expert_queries": snap["expert_queries"],
        }

    def detail(self) -> dict:
        doc = self.summary()
        snap = self.driver.snapshot()
        doc["cells"] = snap["cells"]
        doc["incumbent"] = snap["incumbent"]
        doc["config"] = self.driver.cfg.to_dict()
        if self.result is not None:
            doc["result"] = self.result
        if self.error is not None:
            doc["error"] = self.error
        if self.resume_token is not None:
            doc["resume_token"] = self.resume_token
        return doc


class RunRegistry:
    """Everything the HTTP surface needs to know about live runs."""

    def __init__(self, expert_timeout: float | None = None):
        self.bridge = ExpertBridge()
        self.expert_timeout = expert_timeout
        self._runs: dict[str, RunHandle] = {}
        self._lock = threading.Lock()
        self._seq = 0

    def runs(self) -> list[RunHandle]:
        with self._lock:
            return list(self._runs.values())

    def get(self, run_id: str) -> RunHandle | None:
        with self._lock:
            return self._runs.get(run_id)

    def attach(self, driver: SearchDriver) -> RunHandle:
        """Track a driver owned by an outside caller (embedded CLI mode)."""
        handle = RunHandle(run_id=driver.run_id, driver=driver)
        self.bridge.register_run(driver.run_id, driver.ledger)
        with self._lock:
            self._runs[driver.run_id] = handle
        return handle

    def start(self, request: RunRequest) -> RunHandle:
        from .expert import RemoteExpert

        instance = load_instance(request.instance)
        cfg = SearchConfig.from_dict(request.config)
        with self._lock:
            self._seq += 1
            run_id = f"run-{self._seq:04d}"
        driver = SearchDriver(instance, RemoteExpert(self.bridge, self.expert_timeout),
                              cfg, run_id=run_id)
        handle = self.attach(driver)

        def _work():
            try:
                result = driver.run()
                handle.result = result.to_dict()
                handle.status = "done"
            except SearchSuspended as exc:
                handle.status = "suspended"
                handle.resume_token = exc.token
                handle.error = exc.reason
            except Exception as exc:  # pragma: no cover - defensive
                handle.status = "failed"
                handle.error = str(exc)

        handle.thread = threading.Thread(target=_work, daemon=True,
                                         name=f"hitlbo-{run_id}")
        handle.thread.start()
        return handle


def create_app(registry: RunRegistry, console_dir: str | None = None) -> FastAPI:
    """API app; optionally serves a built console from ``console_dir`` so the
    human surface runs same-origin.  CORS stays open for separately hosted
    consoles (there is no authentication by design)."""
    app = FastAPI(title="hitlbo expert bridge", version="1")
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    @app.get("/api/v1/runs")
    def list_runs() -> list[dict]:
        return [h.summary() for h in registry.runs()]

    @app.post("/api/v1/runs", status_code=201)
    def create_run(request: RunRequest) -> dict:
        try:
            handle = registry.start(request)
        except (ValueError, OSError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"run_id": handle.run_id}

    @app.get("/api/v1/runs/{run_id}")
    def run_detail(run_id: str) -> dict:
        handle = registry.get(run_id)
        if handle is None:
            raise HTTPException(status_code=404, detail=f"unknown run {run_id!r}")
        return handle.detail()

    @app.get("/api/v1/queries")
    def list_queries(state: str = "pending") -> list[dict]:
        if state != "pending":
            raise HTTPException(status_code=400, detail="only state=pending is supported")
        return [q.to_wire() for q in registry.bridge.pending()]

    @app.post("/api/v1/queries/{query_id}/response")
    def answer_query(query_id: str, body: PriorWire) -> dict:
        prior = PriorSpec(kernel=body.kernel, variance=body.variance,
                          lengthscale=body.lengthscale, mean=body.mean)
        try:
            registry.bridge.respond(ExpertResponse(query_id=query_id, prior=prior,
                                                   annotation=body.annotation))
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown query {query_id!r}")
        except LedgerContradiction as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return {"status": "ok", "query_id": query_id, "accepted_at": _now_iso()}

    if console_dir is not None:
        app.mount("/", StaticFiles(directory=console_dir, html=True), name="console")
    return app


class BridgeServer:
    """Uvicorn wrapper that runs the app in a background thread."""

    def __init__(self, registry: RunRegistry, host: str = "127.0.0.1", port: int = 8732):
        import uvicorn

        self.registry = registry
        config = uvicorn.Config(create_app(registry), host=host, port=port,
                                log_level="warning")
        self._server = uvicorn.Server(config)
        self._thread = threading.Thread(target=self._server.run, daemon=True,
                                        name="hitlbo-bridge")

    def start(self, wait: float = 10.0) -> None:
        self._thread.start()
        deadline = time.monotonic() + wait
        while not self._server.started:
            if time.monotonic() > deadline:
                raise RuntimeError("bridge server failed to start")
            time.sleep(0.02)

    def stop(self) -> None:
        self._server.should_exit = True
        self._thread.join(timeout=10.0)
