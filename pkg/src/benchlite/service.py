"""HTTP API over the store, the ranking engine, and the orchestrator.

Request bodies are validated by hand against the domain rules so that every
error, whatever its origin, comes back as a {code, message} JSON object with
a meaningful status: 400 for bad input, 404 for unknown resources, 409 for
the single-run policy, 422 when the store lacks the data a ranking needs.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .errors import (
    BenchliteError,
    DuplicateRun,
    InsufficientData,
    InvariantViolation,
    ParseError,
)
from .engine import Method, rank_targets
from .ingestion import Role, format_ts
from .model import (
    GROUP_ORDER,
    AttributeCatalog,
    ContainerSpec,
    GroupId,
    TargetDescriptor,
    default_catalog,
    load_catalog,
    load_inventory,
    validate_weights,
)
from .orchestrator import (
    MockExecutor,
    RunOptions,
    TargetStatus,
    execute_run,
    load_mock_profile,
    plan_run,
)
from .repository import QueryRole, Repository

_WEIGHT_KEYS = ("g1", "g2", "g3", "g4")


@dataclass(frozen=True)
class ApiConfig:
    repository: Path
    inventory: Path
    listen: str = "127.0.0.1"
    port: int = 8080
    catalog: Path | None = None
    max_parallel_targets: int = 4
    executor: str = "mock"
    profile: Path | None = None
    seed: int = 0
    timeout_s: float = 1800.0
    static_dir: Path | None = None

    def __post_init__(self):
        if not 1 <= self.port <= 65535:
            raise InvariantViolation(f"port {self.port} outside [1, 65535]")
        if self.max_parallel_targets < 1:
            raise InvariantViolation("max_parallel_targets must be at least 1")
        if not self.inventory.exists():
            raise InvariantViolation(f"inventory file not found: {self.inventory}")
        if not self.repository.parent.exists():
            raise InvariantViolation(
                f"repository directory not found: {self.repository.parent}"
            )
        for label, path in (
            ("catalog", self.catalog),
            ("profile", self.profile),
            ("static_dir", self.static_dir),
        ):
            if path is not None and not path.exists():
                raise InvariantViolation(f"{label} path not found: {path}")
        if self.executor not in ("mock",):
            raise InvariantViolation(f"unknown executor {self.executor!r}")


def load_config(path: str | Path) -> ApiConfig:
    """Parse a line-oriented key=value config file."""
    values: dict[str, str] = {}
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ParseError(line_no, f"expected key=value, got {line!r}")
        key = key.strip()
        if key in values:
            raise ParseError(line_no, f"duplicate key {key!r}")
        values[key] = value.strip()

    known = {
        "listen",
        "port",
        "repository",
        "inventory",
        "catalog",
        "max_parallel_targets",
        "executor",
        "profile",
        "seed",
        "timeout_s",
        "static_dir",
    }
    unknown = sorted(set(values) - known)
    if unknown:
        raise ParseError(0, f"unknown config keys: {', '.join(unknown)}")
    for required in ("repository", "inventory"):
        if required not in values:
            raise ParseError(0, f"missing required config key {required!r}")

    base = Path(path).resolve().parent

    def _path(key: str) -> Path | None:
        if key not in values:
            return None
        p = Path(values[key])
        return p if p.is_absolute() else base / p

    try:
        return ApiConfig(
            repository=_path("repository"),
            inventory=_path("inventory"),
            listen=values.get("listen", "127.0.0.1"),
            port=int(values.get("port", "8080")),
            catalog=_path("catalog"),
            max_parallel_targets=int(values.get("max_parallel_targets", "4")),
            executor=values.get("executor", "mock"),
            profile=_path("profile"),
            seed=int(values.get("seed", "0")),
            timeout_s=float(values.get("timeout_s", "1800")),
            static_dir=_path("static_dir"),
        )
    except ValueError as exc:
        raise ParseError(0, f"bad config value: {exc}") from exc


@dataclass
class RunTracker:
    """Lock-guarded per-run status; states only ever advance."""

    run_id: str
    started: datetime
    order: tuple[str, ...]
    states: dict[str, TargetStatus] = field(default_factory=dict)
    durations: dict[str, float | None] = field(default_factory=dict)
    finished: bool = False
    error: tuple[str, str] | None = None
    _t0: float = field(default_factory=time.monotonic)
    _elapsed: float | None = None
    _lock: threading.Lock = field(default_factory=threading.Lock)

    _ORDERING = {
        TargetStatus.PENDING: 0,
        TargetStatus.RUNNING: 1,
        TargetStatus.SUCCEEDED: 2,
        TargetStatus.FAILED: 2,
        TargetStatus.TIMED_OUT: 2,
    }

    def update(self, name: str, status: TargetStatus, duration: float | None) -> None:
        with self._lock:
            current = self.states.get(name, TargetStatus.PENDING)
            if self._ORDERING[status] < self._ORDERING[current]:
                return  # never regress
            self.states[name] = status
            if duration is not None:
                self.durations[name] = duration

    def finish(self, error: tuple[str, str] | None = None) -> None:
        with self._lock:
            self.finished = True
            self.error = error
            self._elapsed = time.monotonic() - self._t0

    def active(self) -> bool:
        with self._lock:
            return not self.finished

    def snapshot(self) -> dict:
        with self._lock:
            elapsed = self._elapsed if self._elapsed is not None else time.monotonic() - self._t0
            targets = []
            for name in self.order:
                state = self.states.get(name, TargetStatus.PENDING)
                entry: dict = {"name": name, "state": state.value}
                duration = self.durations.get(name)
                if duration is not None:
                    entry["duration_s"] = round(duration, 3)
                targets.append(entry)
            body: dict = {
                "run_id": self.run_id,
                "started": format_ts(self.started),
                "elapsed_s": round(elapsed, 3),
                "finished": self.finished,
                "targets": targets,
            }
            if self.error is not None:
                body["error"] = {"code": self.error[0], "message": self.error[1]}
            return body


def _error_response(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"code": code, "message": message})


def _status_for(exc: BenchliteError) -> int:
    if isinstance(exc, InsufficientData):
        return 422
    if isinstance(exc, DuplicateRun):
        return 409
    return 400


def _parse_weights(raw: object) -> dict[GroupId, float]:
    if not isinstance(raw, dict):
        raise InvariantViolation("weights must be an object with keys g1..g4")
    extra = sorted(set(raw) - set(_WEIGHT_KEYS))
    if extra:
        raise InvariantViolation(f"unknown weight keys: {', '.join(extra)}")
    out: dict[GroupId, float] = {}
    for key, group in zip(_WEIGHT_KEYS, GROUP_ORDER):
        if key not in raw:
            raise InvariantViolation(f"missing weight key {key!r}")
        value = raw[key]
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise InvariantViolation(f"weight {key} must be a number")
        out[group] = float(value)
    return out


def _require_int(body: dict, key: str) -> int:
    value = body.get(key)
    if not isinstance(value, int) or isinstance(value, bool):
        raise InvariantViolation(f"{key} must be an integer")
    return value


def create_app(config: ApiConfig) -> FastAPI:
    catalog: AttributeCatalog = (
        load_catalog(config.catalog) if config.catalog is not None else default_catalog()
    )
    inventory: list[TargetDescriptor] = load_inventory(config.inventory)
    repository = Repository(config.repository, catalog)
    executor = None
    if config.profile is not None:
        executor = MockExecutor(
            profile=load_mock_profile(config.profile), seed=config.seed, catalog=catalog
        )

    app = FastAPI(title="benchlite", docs_url=None, redoc_url=None)
    app.state.repository = repository
    app.state.catalog = catalog
    app.state.inventory = inventory
    trackers: dict[str, RunTracker] = {}
    run_lock = threading.Lock()

    @app.exception_handler(BenchliteError)
    async def _domain_error(request: Request, exc: BenchliteError):
        return _error_response(_status_for(exc), exc.code, str(exc))

    @app.exception_handler(Exception)
    async def _internal_error(request: Request, exc: Exception):
        return _error_response(500, "InternalError", "internal error")

    async def _json_body(request: Request) -> dict:
        try:
            body = json.loads(await request.body())
        except json.JSONDecodeError as exc:
            raise ParseError(exc.lineno, f"request body is not valid JSON: {exc.msg}")
        if not isinstance(body, dict):
            raise InvariantViolation("request body must be a JSON object")
        return body

    @app.get("/api/targets")
    def get_targets():
        status = repository.status(inventory)
        content = [
            {
                "name": t.name,
                "address": t.address,
                "vcpus": t.vcpus,
                "memory_mib": t.memory_mib,
                "status": status[t.name].value,
            }
            for t in inventory
        ]
        return JSONResponse(content=content)

    @app.post("/api/runs")
    async def post_runs(request: Request):
        body = await _json_body(request)
        allowed = {"mem_mb", "cpu_cores", "targets", "max_parallel"}
        extra = sorted(set(body) - allowed)
        if extra:
            raise InvariantViolation(f"unknown request fields: {', '.join(extra)}")
        container = ContainerSpec(
            memory_mb=_require_int(body, "mem_mb"),
            cpu_cores=_require_int(body, "cpu_cores"),
        )
        target_names = None
        if "targets" in body:
            raw = body["targets"]
            if not isinstance(raw, list) or not all(isinstance(t, str) for t in raw):
                raise InvariantViolation("targets must be a list of names")
            target_names = tuple(raw)
        max_parallel = config.max_parallel_targets
        if "max_parallel" in body:
            max_parallel = _require_int(body, "max_parallel")
        if executor is None:
            raise InvariantViolation("no executor profile configured; runs are disabled")

        with run_lock:
            for tracker in trackers.values():
                if tracker.active():
                    return _error_response(
                        409, "RunInFlight", f"run {tracker.run_id} is still in progress"
                    )
            plan = plan_run(
                inventory,
                container,
                RunOptions(
                    target_names=target_names,
                    max_parallel_targets=max_parallel,
                    timeout_s=config.timeout_s,
                ),
            )
            tracker = RunTracker(
                run_id=plan.run_id,
                started=plan.started,
                order=tuple(t.name for t in plan.targets),
            )
            trackers[plan.run_id] = tracker

        def _worker():
            try:
                execute_run(
                    plan, executor, repository, catalog=catalog, on_update=tracker.update
                )
                tracker.finish()
            except BenchliteError as exc:
                tracker.finish((exc.code, str(exc)))
            except Exception as exc:
                tracker.finish(("InternalError", str(exc)))

        threading.Thread(target=_worker, name=f"run-{plan.run_id}", daemon=True).start()
        return JSONResponse(status_code=202, content={"run_id": plan.run_id})

    @app.get("/api/runs/{run_id}")
    def get_run(run_id: str):
        tracker = trackers.get(run_id)
        if tracker is None:
            return _error_response(404, "UnknownRun", f"no run named {run_id!r}")
        return JSONResponse(content=tracker.snapshot())

    @app.post("/api/rankings")
    async def post_rankings(request: Request):
        body = await _json_body(request)
        allowed = {"weights", "method", "mem_mb"}
        extra = sorted(set(body) - allowed)
        if extra:
            raise InvariantViolation(f"unknown request fields: {', '.join(extra)}")
        weights = validate_weights(_parse_weights(body.get("weights")))
        method_raw = body.get("method")
        if method_raw not in ("native", "hybrid"):
            raise InvariantViolation("method must be 'native' or 'hybrid'")
        mem_mb = _require_int(body, "mem_mb")
        table = rank_targets(
            weights, repository, Method(method_raw), container_mem_mb=mem_mb, catalog=catalog
        )
        content = [
            {"target": e.target, "score": round(e.score, 4), "rank": e.rank}
            for e in table.entries
        ]
        return JSONResponse(content=content)

    @app.get("/api/benchmarks")
    def get_benchmarks(target: str | None = None, mem_mb: int | None = None):
        records = repository.query(
            target=target, container_mem_mb=mem_mb, role=QueryRole.BOTH
        )
        content = [
            {
                "target": r.target_name,
                "attribute_id": r.attribute_id,
                "unit": r.unit,
                "value": r.value,
                "mem_mb": r.container_mem_mb,
                "cpu_cores": r.cpu_cores,
                "run_id": r.run_id,
                "ts": format_ts(r.timestamp),
                "role": "historic" if r.role is Role.HISTORIC else "current",
            }
            for r in records
        ]
        return JSONResponse(content=content)

    if config.static_dir is not None:
        app.mount("/", StaticFiles(directory=config.static_dir, html=True), name="ui")

    return app


def serve(config: ApiConfig) -> None:
    import uvicorn

    uvicorn.run(create_app(config), host=config.listen, port=config.port, log_level="warning")
