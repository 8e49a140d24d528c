"""HTTP/JSON surface binding the engine to the editor UI and scripted tests.

All engine access goes through the engine's lock, so requests land between
ticks and GETs are pure reads. The UI is expected to poll /sim/state and
/log at the tick period; there are no push channels.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from pathlib import Path

from fastapi import Body, FastAPI
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from .monitor import Engine, build_engine, packaged_text
from .policy import load_policy, policy_to_doc, serialize_query
from .aca import load_rules, search_acas
from .simulator import event_from_doc

ENV_PORT = "SSN_POLICY_FORGE_PORT"
ENV_SEED = "SSN_POLICY_FORGE_SEED"


@dataclass(frozen=True)
class ApiConfig:
    port: int = 8000
    ontology: str | None = None
    rules: str | None = None
    schema: str | None = None
    world: str | None = None
    seed: int = 0
    tick_period_ms: int = 500
    static_dir: str | None = None
    directory: Path | None = None

    def __post_init__(self):
        if self.tick_period_ms < 1:
            raise ValueError("tick period must be >= 1 ms")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")


def load_config(path: str | Path | None = None) -> ApiConfig:
    """Read serve configuration; environment overrides port and seed."""
    if path is None:
        raw = json.loads(packaged_text("config.json"))
        directory = None
    else:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        directory = Path(path).parent
    port = int(os.environ.get(ENV_PORT, raw.get("port", 8000)))
    seed = int(os.environ.get(ENV_SEED, raw.get("seed", 0)))
    return ApiConfig(
        port=port,
        ontology=raw.get("ontology"),
        rules=raw.get("rules"),
        schema=raw.get("schema"),
        world=raw.get("world"),
        seed=seed,
        tick_period_ms=int(raw.get("tick_period_ms", 500)),
        static_dir=raw.get("static_dir"),
        directory=directory,
    )


def engine_from_config(config: ApiConfig) -> Engine:
    scenario = {
        "world": config.world,
        "ontology": config.ontology,
        "rules": config.rules,
        "schema": config.schema,
        "seed": config.seed,
    }
    return build_engine(scenario, config.directory)


class SimulationLoop:
    """Background ticking at a fixed period; start/stop from the API."""

    def __init__(self, engine: Engine, period_ms: int):
        self.engine = engine
        self.period = max(period_ms, 1) / 1000.0
        self._stop = threading.Event()
        self._stop.set()
        self._thread: threading.Thread | None = None

    @property
    def running(self) -> bool:
        return self._thread is not None and self._thread.is_alive() and not self._stop.is_set()

    def start(self) -> None:
        if self.running:
            return
        self._stop.clear()
        self._thread = threading.Thread(target=self._loop, name="sim-loop", daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()

    def _loop(self) -> None:
        while not self._stop.wait(self.period):
            self.engine.tick()


def _bad_request(diagnostics: list[str]) -> JSONResponse:
    return JSONResponse(status_code=400, content={"diagnostics": diagnostics})


def _not_found(what: str) -> JSONResponse:
    return JSONResponse(status_code=404, content={"diagnostics": [f"unknown id {what}"]})


def create_app(engine: Engine, loop: SimulationLoop | None = None, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="ssn-policy-forge", docs_url=None, redoc_url=None)
    loop = loop or SimulationLoop(engine, 500)

    @app.get("/acas")
    def get_acas(q: str = ""):
        with engine.lock:
            found = search_acas(q, engine.catalog)
            return [
                {"id": a.id, "label": a.label, "exposedVars": list(a.exposed_vars), "kind": a.kind}
                for a in found
            ]

    @app.post("/rules")
    def post_rules(payload: list = Body(...)):
        try:
            rules = load_rules(json.dumps(payload), engine.prefixes)
        except ValueError as exc:
            return _bad_request([str(exc)])
        n_rules, applicable, n_acas = engine.rebuild_catalog(rules)
        return {"rules": n_rules, "applicable": applicable, "acas": n_acas}

    @app.get("/policies")
    def get_policies():
        with engine.lock:
            return [
                dict(policy_to_doc(p), valid=pid in engine.compiled,
                     diagnostics=engine.policy_diagnostics.get(pid, []))
                for pid, p in sorted(engine.policies.items())
            ]

    @app.post("/policies", status_code=201)
    def post_policy(payload: dict = Body(...)):
        try:
            policy = load_policy(payload, engine.prefixes)
        except ValueError as exc:
            return _bad_request([str(exc)])
        diagnostics = engine.put_policy(policy)
        if diagnostics:
            return _bad_request(diagnostics)
        return {"id": policy.id}

    @app.put("/policies/{policy_id}")
    def put_policy(policy_id: str, payload: dict = Body(...)):
        with engine.lock:
            if policy_id not in engine.policies:
                return _not_found(policy_id)
        try:
            policy = load_policy(dict(payload, id=policy_id), engine.prefixes)
        except ValueError as exc:
            return _bad_request([str(exc)])
        diagnostics = engine.put_policy(policy)
        if diagnostics:
            return _bad_request(diagnostics)
        return {"id": policy_id}

    @app.delete("/policies/{policy_id}")
    def delete_policy(policy_id: str):
        if not engine.delete_policy(policy_id):
            return _not_found(policy_id)
        return {"deleted": policy_id}

    @app.get("/policies/{policy_id}/query")
    def get_policy_query(policy_id: str):
        with engine.lock:
            if policy_id not in engine.policies:
                return _not_found(policy_id)
            query = engine.compiled.get(policy_id)
            if query is None:
                return _bad_request(engine.policy_diagnostics.get(policy_id, ["policy does not compile"]))
            return PlainTextResponse(serialize_query(query, engine.prefixes))

    @app.post("/sim/reset")
    def sim_reset(seed: int | None = None):
        loop.stop()
        engine.reset(seed)
        return {"tick": 0, "seed": engine.seed}

    @app.post("/sim/step")
    def sim_step(n: int = 1):
        n = max(0, min(n, 10_000))
        report = None
        for _ in range(n):
            report = engine.tick()
        with engine.lock:
            return {
                "tick": engine.world.tick,
                "triggers": report.triggers if report else 0,
                "errors": list(report.errors) if report else [],
            }

    @app.post("/sim/run")
    def sim_run():
        loop.start()
        return {"running": True}

    @app.post("/sim/pause")
    def sim_pause():
        loop.stop()
        return {"running": False}

    @app.post("/sim/events")
    def sim_events(payload: dict = Body(...)):
        try:
            event = event_from_doc(payload)
            if "at_tick" in payload:
                engine.schedule_event(int(payload["at_tick"]), event)
            else:
                engine.inject_now(event)
        except ValueError as exc:
            return _bad_request([str(exc)])
        return {"accepted": True}

    @app.get("/sim/state")
    def sim_state():
        with engine.lock:
            snapshot = engine.world.snapshot()
        snapshot["running"] = loop.running
        return snapshot

    @app.get("/log")
    def get_log(since: int | None = None):
        with engine.lock:
            entries = engine.log if since is None else [e for e in engine.log if e.tick > since]
            return [e.to_json() for e in entries]

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app


def serve(config: ApiConfig) -> None:
    import uvicorn

    engine = engine_from_config(config)
    loop = SimulationLoop(engine, config.tick_period_ms)
    static_dir = config.static_dir or _default_static_dir()
    app = create_app(engine, loop, static_dir)
    uvicorn.run(app, host="127.0.0.1", port=config.port, log_level="info")


def _default_static_dir() -> str | None:
    """The built frontend, when it sits next to this checkout."""
    candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    return str(candidate) if candidate.is_dir() else None
