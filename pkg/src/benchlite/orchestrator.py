"""Benchmark run orchestration: planning, parallel execution, persistence.

A run fans out over targets with a bounded thread pool. Each target is
provisioned, exercised, and torn down independently; one target failing
never stops the others. Results are appended to the repository in a single
write once every target has settled, so a crash mid-run never leaves a
half-written run behind.
"""

from __future__ import annotations

import hashlib
import secrets
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Callable, Protocol

from .errors import (
    AllTargetsFailed,
    BenchliteError,
    CoresExceedTarget,
    EmptyInventory,
    ExecutorTimeout,
    InvariantViolation,
    ParseError,
    RepositoryWriteFailure,
    UnknownTarget,
)
from .ingestion import BenchmarkRecord, RunMetadata, parse_output
from .model import AttributeCatalog, ContainerSpec, TargetDescriptor, default_catalog
from .repository import Repository


class TargetStatus(Enum):
    PENDING = "Pending"
    RUNNING = "Running"
    SUCCEEDED = "Succeeded"
    FAILED = "Failed"
    TIMED_OUT = "TimedOut"

    @property
    def terminal(self) -> bool:
        return self in (TargetStatus.SUCCEEDED, TargetStatus.FAILED, TargetStatus.TIMED_OUT)


@dataclass(frozen=True)
class TargetOutcome:
    status: TargetStatus
    duration_s: float
    reason: str = ""

    def __post_init__(self):
        if not self.status.terminal:
            raise InvariantViolation("outcome requires a terminal status")
        if self.duration_s < 0:
            raise InvariantViolation("duration cannot be negative")


@dataclass(frozen=True)
class RunOptions:
    run_id: str | None = None
    started: datetime | None = None
    suite_command: str | None = None
    target_names: tuple[str, ...] | None = None
    max_parallel_targets: int = 4
    timeout_s: float = 1800.0


@dataclass(frozen=True)
class RunPlan:
    run_id: str
    container: ContainerSpec
    targets: tuple[TargetDescriptor, ...]
    suite_command: str
    max_parallel_targets: int
    timeout_s: float
    started: datetime


@dataclass(frozen=True)
class RunResult:
    run_id: str
    outcomes: dict[str, TargetOutcome]
    records: tuple[BenchmarkRecord, ...]

    def succeeded(self) -> list[str]:
        return [t for t, o in self.outcomes.items() if o.status is TargetStatus.SUCCEEDED]


class Executor(Protocol):
    """Driver that provisions a container slice on a target and runs the suite."""

    def provision(self, target: TargetDescriptor, container: ContainerSpec) -> object: ...

    def exec(self, handle: object, suite_command: str, timeout_s: float) -> tuple[str, int]: ...

    def teardown(self, handle: object) -> None: ...


def _utcnow() -> datetime:
    return datetime.now(timezone.utc).replace(microsecond=0)


def plan_run(
    inventory: list[TargetDescriptor],
    container: ContainerSpec,
    options: RunOptions = RunOptions(),
) -> RunPlan:
    """Validate and freeze everything about a run before any work starts."""
    if not inventory:
        raise EmptyInventory()
    by_name = {t.name: t for t in inventory}
    if options.target_names is not None:
        missing = [n for n in options.target_names if n not in by_name]
        if missing:
            raise UnknownTarget(", ".join(missing))
        chosen = tuple(by_name[n] for n in options.target_names)
    else:
        chosen = tuple(inventory)
    if not chosen:
        raise EmptyInventory()
    for t in chosen:
        if container.cpu_cores > t.vcpus:
            raise CoresExceedTarget(t.name, container.cpu_cores, t.vcpus)
    if options.max_parallel_targets < 1:
        raise InvariantViolation("max_parallel_targets must be at least 1")
    if options.timeout_s <= 0:
        raise InvariantViolation("timeout_s must be positive")
    started = options.started if options.started is not None else _utcnow()
    run_id = options.run_id or (
        started.strftime("%Y%m%dT%H%M%SZ") + "-" + secrets.token_hex(3)
    )
    suite_command = options.suite_command or f"benchlite-suite run={run_id}"
    return RunPlan(
        run_id=run_id,
        container=container,
        targets=chosen,
        suite_command=suite_command,
        max_parallel_targets=options.max_parallel_targets,
        timeout_s=options.timeout_s,
        started=started,
    )


UpdateHook = Callable[[str, TargetStatus, float | None], None]


def execute_run(
    plan: RunPlan,
    executor: Executor,
    repository: Repository,
    catalog: AttributeCatalog | None = None,
    clock: Callable[[], datetime] = _utcnow,
    on_update: UpdateHook | None = None,
) -> RunResult:
    """Run the plan and persist whatever succeeded.

    Raises AllTargetsFailed when nothing survives, and
    RepositoryWriteFailure (after salvaging the records to a sidecar file)
    when the store append fails.
    """
    cat = catalog if catalog is not None else repository.catalog
    notify = on_update or (lambda name, status, duration: None)
    for t in plan.targets:
        notify(t.name, TargetStatus.PENDING, None)

    outcomes: dict[str, TargetOutcome] = {}
    collected: dict[str, list[BenchmarkRecord]] = {}
    lock = threading.Lock()

    def work(target: TargetDescriptor) -> None:
        notify(target.name, TargetStatus.RUNNING, None)
        t0 = time.perf_counter()
        handle = None
        status = TargetStatus.FAILED
        reason = ""
        records: list[BenchmarkRecord] = []
        try:
            handle = executor.provision(target, plan.container)
            output, exit_code = executor.exec(handle, plan.suite_command, plan.timeout_s)
            if exit_code != 0:
                reason = f"suite exited with status {exit_code}"
            else:
                meta = RunMetadata(
                    run_id=plan.run_id,
                    container_mem_mb=plan.container.memory_mb,
                    cpu_cores=plan.container.cpu_cores,
                    started=plan.started,
                    finished=plan.started,
                )
                parsed = parse_output(output, cat, meta, target.name)
                records = parsed.records
                status = TargetStatus.SUCCEEDED
        except ExecutorTimeout as exc:
            status = TargetStatus.TIMED_OUT
            reason = str(exc)
        except BenchliteError as exc:
            reason = f"{exc.code}: {exc}"
        except Exception as exc:  # a broken driver must not sink the whole run
            reason = f"{type(exc).__name__}: {exc}"
        finally:
            if handle is not None:
                try:
                    executor.teardown(handle)
                except Exception as exc:
                    if status is TargetStatus.SUCCEEDED:
                        status = TargetStatus.FAILED
                        reason = f"teardown failed: {exc}"
                        records = []
        duration = time.perf_counter() - t0
        outcome = TargetOutcome(status=status, duration_s=duration, reason=reason)
        with lock:
            outcomes[target.name] = outcome
            if records:
                collected[target.name] = records
        notify(target.name, status, duration)

    workers = min(plan.max_parallel_targets, len(plan.targets))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(work, t) for t in plan.targets]
        for f in futures:
            f.result()

    if not collected:
        raise AllTargetsFailed(plan.run_id)

    all_records: list[BenchmarkRecord] = []
    for name in sorted(collected):
        all_records.extend(collected[name])
    finished = clock()
    if finished < plan.started:
        finished = plan.started
    meta = RunMetadata(
        run_id=plan.run_id,
        container_mem_mb=plan.container.memory_mb,
        cpu_cores=plan.container.cpu_cores,
        started=plan.started,
        finished=finished,
        tool=getattr(executor, "tool_name", "suite"),
        tool_version=getattr(executor, "tool_version", "0"),
    )
    try:
        repository.append_run(meta, all_records)
    except Exception as exc:
        salvage = repository.path.with_name(
            repository.path.name + f".{plan.run_id}.salvage"
        )
        from .ingestion import emit_canonical

        salvage.write_text(emit_canonical(all_records), encoding="utf-8")
        raise RepositoryWriteFailure(str(exc), str(salvage)) from exc

    return RunResult(run_id=plan.run_id, outcomes=outcomes, records=tuple(all_records))


# -- mock executor ---------------------------------------------------------


@dataclass(frozen=True)
class MockHandle:
    target: TargetDescriptor
    container: ContainerSpec


@dataclass(frozen=True)
class MockProfileEntry:
    base_value: float
    noise_fraction: float


def load_mock_profile(path: str | Path) -> dict[str, dict[str, MockProfileEntry]]:
    """Read `target|attribute_id|base_value|noise_fraction` lines."""
    profile: dict[str, dict[str, MockProfileEntry]] = {}
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split("|")]
        if len(parts) != 4:
            raise ParseError(line_no, "expected target|attribute_id|base_value|noise_fraction")
        try:
            base = float(parts[2])
            noise = float(parts[3])
        except ValueError as exc:
            raise ParseError(line_no, f"bad number: {exc}") from exc
        if base < 0:
            raise ParseError(line_no, "base_value must be nonnegative")
        if not 0 <= noise < 1:
            raise ParseError(line_no, "noise_fraction must lie in [0, 1)")
        profile.setdefault(parts[0], {})[parts[1]] = MockProfileEntry(base, noise)
    if not profile:
        raise ParseError(0, f"no profile entries in {path}")
    return profile


@dataclass
class MockExecutor:
    """Deterministic stand-in for a real fleet.

    Emitted values are base * (1 + eps) where eps is derived from a hash of
    (seed, target, attribute, suite command), so a fixed plan replays to the
    byte while distinct runs or seeds decorrelate.
    """

    profile: dict[str, dict[str, MockProfileEntry]]
    seed: int = 0
    catalog: AttributeCatalog = field(default_factory=default_catalog)
    tool_name: str = "mock-suite"
    tool_version: str = "1"
    provisioned: list[str] = field(default_factory=list)
    torn_down: list[str] = field(default_factory=list)

    def __post_init__(self):
        for target, attrs in self.profile.items():
            unknown = [a for a in attrs if a not in self.catalog]
            if unknown:
                raise InvariantViolation(
                    f"profile for {target} names unknown attributes: {', '.join(sorted(unknown))}"
                )

    def _epsilon(self, target: str, attribute: str, command: str, noise: float) -> float:
        digest = hashlib.sha256(
            f"{self.seed}|{target}|{attribute}|{command}".encode("utf-8")
        ).digest()
        unit = int.from_bytes(digest[:8], "big") / 2**64  # [0, 1)
        return noise * (2.0 * unit - 1.0)

    def provision(self, target: TargetDescriptor, container: ContainerSpec) -> MockHandle:
        if target.name not in self.profile:
            raise UnknownTarget(target.name)
        self.provisioned.append(target.name)
        return MockHandle(target=target, container=container)

    def exec(self, handle: MockHandle, suite_command: str, timeout_s: float) -> tuple[str, int]:
        name = handle.target.name
        lines = []
        for attr_id in sorted(self.profile[name]):
            entry = self.profile[name][attr_id]
            eps = self._epsilon(name, attr_id, suite_command, entry.noise_fraction)
            value = entry.base_value * (1.0 + eps)
            unit = self.catalog.get(attr_id).unit
            lines.append(f"{attr_id}|{unit}|{value!r}")
        return "\n".join(lines) + "\n", 0

    def teardown(self, handle: MockHandle) -> None:
        self.torn_down.append(handle.target.name)


def mock_executor(
    profile_file: str | Path, seed: int, catalog: AttributeCatalog | None = None
) -> MockExecutor:
    """Build a deterministic executor from a profile file."""
    return MockExecutor(
        profile=load_mock_profile(profile_file),
        seed=seed,
        catalog=catalog if catalog is not None else default_catalog(),
    )
