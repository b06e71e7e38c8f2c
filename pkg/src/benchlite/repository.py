"""Append-only store of benchmark records with current/historic query semantics.

The store file is a concatenation of canonical benchmark blocks, each run
preceded by a ``#benchlite-meta`` comment line carrying its run metadata.
An in-memory index is rebuilt on open; appends go to disk first (with fsync)
and become visible to queries only once durable.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass, replace
from datetime import datetime
from enum import Enum
from pathlib import Path

from .errors import DuplicateRun, InvariantViolation, ParseError
from .ingestion import (
    BenchmarkRecord,
    RunMetadata,
    Role,
    emit_canonical,
    format_ts,
    parse_canonical,
    parse_ts,
)
from .model import AttributeCatalog, TargetDescriptor

META_TAG = "#benchlite-meta"


class QueryRole(Enum):
    CURRENT = "current"
    HISTORIC = "historic"
    BOTH = "both"


class TargetDataStatus(Enum):
    AVAILABLE = "Available"
    MISSING = "Missing"


def _meta_line(meta: RunMetadata) -> str:
    return (
        f"{META_TAG} run={meta.run_id} mem={meta.container_mem_mb} cores={meta.cpu_cores} "
        f"started={format_ts(meta.started)} finished={format_ts(meta.finished)} "
        f"tool={meta.tool} tool_version={meta.tool_version}"
    )


def _parse_meta_line(line: str, line_no: int) -> RunMetadata:
    fields: dict[str, str] = {}
    for token in line.split()[1:]:
        key, sep, value = token.partition("=")
        if not sep:
            raise ParseError(line_no, f"malformed meta token {token!r}")
        fields[key] = value
    try:
        return RunMetadata(
            run_id=fields["run"],
            container_mem_mb=int(fields["mem"]),
            cpu_cores=int(fields["cores"]),
            started=parse_ts(fields["started"]),
            finished=parse_ts(fields["finished"]),
            tool=fields.get("tool", "unknown"),
            tool_version=fields.get("tool_version", "0"),
        )
    except (KeyError, ValueError) as exc:
        raise ParseError(line_no, f"bad meta line: {exc}") from exc


@dataclass(frozen=True)
class _RunEntry:
    meta: RunMetadata
    role: Role
    records: tuple[BenchmarkRecord, ...]

    @property
    def order_key(self) -> tuple[datetime, str]:
        return (self.meta.started, self.meta.run_id)


class Repository:
    """Durable benchmark store: single writer, many concurrent readers."""

    def __init__(self, path: str | Path, catalog: AttributeCatalog):
        self.path = Path(path)
        self.catalog = catalog
        self._lock = threading.Lock()
        self._runs: dict[str, _RunEntry] = {}
        if self.path.exists():
            self._load()

    # -- loading ---------------------------------------------------------

    def _load(self):
        text = self.path.read_text(encoding="utf-8")
        metas: dict[str, RunMetadata] = {}
        for line_no, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if line.startswith(META_TAG + " "):
                meta = _parse_meta_line(line, line_no)
                metas[meta.run_id] = meta
        records = parse_canonical(text, self.catalog) if text.strip() else []
        by_run: dict[str, list[BenchmarkRecord]] = {}
        for rec in records:
            by_run.setdefault(rec.run_id, []).append(rec)
        for run_id, recs in by_run.items():
            meta = metas.get(run_id)
            if meta is None:
                # foreign block appended without a meta line: synthesize one
                timestamps = [r.timestamp for r in recs]
                meta = RunMetadata(
                    run_id=run_id,
                    container_mem_mb=recs[0].container_mem_mb,
                    cpu_cores=recs[0].cpu_cores,
                    started=min(timestamps),
                    finished=max(timestamps),
                    tool="unknown",
                    tool_version="0",
                )
            roles = {r.role for r in recs}
            if len(roles) > 1:
                raise InvariantViolation(f"run {run_id}: blocks disagree on role")
            self._runs[run_id] = _RunEntry(meta=meta, role=roles.pop(), records=tuple(recs))

    # -- writing ---------------------------------------------------------

    def append_run(self, meta: RunMetadata, records: list[BenchmarkRecord]) -> str:
        """Durably append one run's records.

        Raises:
            DuplicateRun: the run_id is already stored.
            InvariantViolation: records disagree with the metadata or
                reference attributes outside the active catalog.
        """
        if not records:
            raise InvariantViolation("cannot append a run with no records")
        for rec in records:
            if rec.run_id != meta.run_id:
                raise InvariantViolation(
                    f"record for {rec.target_name} carries run {rec.run_id}, expected {meta.run_id}"
                )
            if rec.attribute_id not in self.catalog:
                raise InvariantViolation(
                    f"record references unknown attribute {rec.attribute_id!r}"
                )
            if rec.container_mem_mb != meta.container_mem_mb or rec.cpu_cores != meta.cpu_cores:
                raise InvariantViolation(
                    f"record for {rec.target_name} disagrees with run container spec"
                )
        roles = {r.role for r in records}
        if len(roles) > 1:
            raise InvariantViolation("records of one run must share a role")
        block = emit_canonical(records)

        with self._lock:
            if meta.run_id in self._runs:
                raise DuplicateRun(meta.run_id)
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(_meta_line(meta) + "\n")
                fh.write(block)
                fh.flush()
                os.fsync(fh.fileno())
            self._runs[meta.run_id] = _RunEntry(
                meta=meta, role=roles.pop(), records=tuple(records)
            )
        return meta.run_id

    def import_canonical(self, text: str, force_role: Role = Role.HISTORIC) -> list[str]:
        """Import external canonical blocks, re-tagged with ``force_role``.

        Each distinct run_id in the text becomes one stored run with
        synthesized metadata. Returns the imported run ids.
        """
        records = parse_canonical(text, self.catalog)
        by_run: dict[str, list[BenchmarkRecord]] = {}
        for rec in records:
            if rec.role != force_role:
                rec = replace(rec, role=force_role)
            by_run.setdefault(rec.run_id, []).append(rec)
        imported = []
        for run_id, recs in sorted(by_run.items()):
            timestamps = [r.timestamp for r in recs]
            meta = RunMetadata(
                run_id=run_id,
                container_mem_mb=recs[0].container_mem_mb,
                cpu_cores=recs[0].cpu_cores,
                started=min(timestamps),
                finished=max(timestamps),
                tool="import",
                tool_version="0",
            )
            self.append_run(meta, recs)
            imported.append(run_id)
        return imported

    # -- querying --------------------------------------------------------

    def _snapshot(self) -> list[_RunEntry]:
        with self._lock:
            return list(self._runs.values())

    def runs(self) -> dict[str, RunMetadata]:
        return {e.meta.run_id: e.meta for e in self._snapshot()}

    def query(
        self,
        target: str | None = None,
        container_mem_mb: int | None = None,
        role: QueryRole = QueryRole.BOTH,
    ) -> list[BenchmarkRecord]:
        """Query records with current/historic semantics.

        Current means: the records of the most recent non-imported run per
        (target, container size). Historic means everything else — records
        from strictly older runs plus all imported baseline data.
        """
        entries = sorted(self._snapshot(), key=lambda e: e.order_key)
        # newest current-tagged run per (target, mem)
        latest: dict[tuple[str, int], str] = {}
        for entry in entries:
            if entry.role is not Role.CURRENT:
                continue
            for key in {(r.target_name, r.container_mem_mb) for r in entry.records}:
                latest[key] = entry.meta.run_id

        out: list[BenchmarkRecord] = []
        for entry in entries:
            for rec in entry.records:
                if target is not None and rec.target_name != target:
                    continue
                if container_mem_mb is not None and rec.container_mem_mb != container_mem_mb:
                    continue
                is_current = (
                    entry.role is Role.CURRENT
                    and latest.get((rec.target_name, rec.container_mem_mb)) == entry.meta.run_id
                )
                if role is QueryRole.CURRENT and not is_current:
                    continue
                if role is QueryRole.HISTORIC and is_current:
                    continue
                out.append(rec)
        out.sort(key=lambda r: (r.target_name, r.attribute_id, r.run_id, r.value))
        return out

    def status(self, inventory: list[TargetDescriptor]) -> dict[str, TargetDataStatus]:
        """Available/Missing per inventory target (any record at any size counts)."""
        covered: set[str] = set()
        for entry in self._snapshot():
            covered.update(r.target_name for r in entry.records)
        return {
            t.name: TargetDataStatus.AVAILABLE if t.name in covered else TargetDataStatus.MISSING
            for t in inventory
        }

    def targets_with_data(
        self, container_mem_mb: int | None = None, role: QueryRole = QueryRole.BOTH
    ) -> set[str]:
        return {r.target_name for r in self.query(container_mem_mb=container_mem_mb, role=role)}
