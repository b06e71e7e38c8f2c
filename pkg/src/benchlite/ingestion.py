"""Benchmark record model plus the canonical line-oriented interchange format.

Canonical file layout, one block per target:

    #benchlite-v1 run=<run_id> target=<name> mem=<MB> cores=<N> ts=<RFC3339> [role=historic]
    attribute_id|unit|value
    ...

Blank lines and other ``#`` lines are comments. The container entrypoint (or
the mock executor) prints bare ``attribute_id|unit|value`` lines; headers are
added when records are emitted to a file or the repository.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum

from .errors import (
    InvariantViolation,
    MalformedValue,
    MixedRuns,
    NoRecognizedAttributes,
    ParseError,
)
from .model import AttributeCatalog, _NAME_RE

HEADER_TAG = "#benchlite-v1"


class Role(Enum):
    """Whether a record counts as fresh data or as historical baseline."""

    CURRENT = "current"
    HISTORIC = "historic"


def format_ts(dt: datetime) -> str:
    """RFC3339 timestamp with a Z suffix; naive datetimes are taken as UTC."""
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def parse_ts(text: str) -> datetime:
    # Python 3.10 fromisoformat does not accept the Z suffix itself
    return datetime.fromisoformat(text.replace("Z", "+00:00")).astimezone(timezone.utc)


def _check_token(value: str, what: str) -> str:
    if not value or "|" in value or any(c.isspace() for c in value):
        raise InvariantViolation(f"{what} {value!r} must be non-empty with no spaces or '|'")
    return value


@dataclass(frozen=True)
class BenchmarkRecord:
    """One measured attribute value for one target, container size and run."""

    target_name: str
    attribute_id: str
    value: float
    unit: str
    container_mem_mb: int
    cpu_cores: int
    run_id: str
    timestamp: datetime
    role: Role = Role.CURRENT

    def __post_init__(self):
        _check_token(self.target_name, "target name")
        if not _NAME_RE.match(self.attribute_id):
            raise InvariantViolation(f"attribute id {self.attribute_id!r} is not a valid key")
        if not math.isfinite(self.value) or self.value < 0:
            raise InvariantViolation(
                f"{self.target_name}/{self.attribute_id}: value {self.value!r} must be finite and >= 0"
            )
        if self.container_mem_mb < 1 or self.cpu_cores < 1:
            raise InvariantViolation("container_mem_mb and cpu_cores must be >= 1")
        _check_token(self.run_id, "run id")

    def sort_key(self):
        return (self.target_name, self.attribute_id, self.value, self.unit)


@dataclass(frozen=True)
class RunMetadata:
    """Identity and timing of one benchmark run."""

    run_id: str
    container_mem_mb: int
    cpu_cores: int
    started: datetime
    finished: datetime
    tool: str = "mock-lmbench"
    tool_version: str = "0"

    def __post_init__(self):
        _check_token(self.run_id, "run id")
        _check_token(self.tool, "tool")
        _check_token(self.tool_version, "tool version")
        if self.finished < self.started:
            raise InvariantViolation(f"run {self.run_id}: finished precedes started")
        if self.container_mem_mb < 1 or self.cpu_cores < 1:
            raise InvariantViolation("container_mem_mb and cpu_cores must be >= 1")


@dataclass
class ParsedOutput:
    """Records recognized from one tool invocation, plus skipped-line warnings."""

    records: list[BenchmarkRecord]
    warnings: list[str] = field(default_factory=list)


def parse_output(
    text: str,
    catalog: AttributeCatalog,
    meta: RunMetadata,
    target_name: str,
    role: Role = Role.CURRENT,
) -> ParsedOutput:
    """Parse raw suite output for one target into records.

    Lines that do not look like ``attribute_id|unit|value`` or that name an
    attribute outside the catalog are collected as warnings, never errors.
    A matched attribute with a non-numeric or negative value is a hard error,
    as is a unit that disagrees with the catalog.

    Raises:
        NoRecognizedAttributes: no line matched any cataloged attribute.
        MalformedValue: a matched attribute line carries an unusable value.
        ParseError: a matched attribute line carries the wrong unit.
    """
    if not text.strip():
        raise NoRecognizedAttributes(f"empty output for target {target_name}")
    records: list[BenchmarkRecord] = []
    warnings: list[str] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("|")
        if len(parts) != 3:
            warnings.append(f"line {line_no}: not an attribute line: {line!r}")
            continue
        attr_id, unit, value_s = (p.strip() for p in parts)
        if attr_id not in catalog:
            warnings.append(f"line {line_no}: unknown attribute {attr_id!r}")
            continue
        descriptor = catalog.get(attr_id)
        if unit != descriptor.unit:
            raise ParseError(
                line_no,
                f"unit mismatch for {attr_id}: file says {unit!r}, catalog says {descriptor.unit!r}",
            )
        try:
            value = float(value_s)
        except ValueError:
            raise MalformedValue(line_no, line) from None
        if not math.isfinite(value) or value < 0:
            raise MalformedValue(line_no, line, reason="value must be finite and >= 0")
        records.append(
            BenchmarkRecord(
                target_name=target_name,
                attribute_id=attr_id,
                value=value,
                unit=unit,
                container_mem_mb=meta.container_mem_mb,
                cpu_cores=meta.cpu_cores,
                run_id=meta.run_id,
                timestamp=meta.started,
                role=role,
            )
        )
    if not records:
        raise NoRecognizedAttributes(
            f"no cataloged attribute lines in output for target {target_name}"
        )
    return ParsedOutput(records=records, warnings=warnings)


def _format_value(value: float) -> str:
    # repr gives the shortest string that round-trips the float exactly
    return repr(value)


def emit_canonical(records: list[BenchmarkRecord]) -> str:
    """Serialize one run's records into canonical text, one block per target.

    Output is byte-identical regardless of input order: blocks are sorted by
    target name and lines by attribute id.

    Raises:
        MixedRuns: records span more than one run_id.
        InvariantViolation: empty input, or records disagree on container
            size, cores, role, or per-target timestamp.
    """
    if not records:
        raise InvariantViolation("cannot emit an empty record set")
    run_ids = {r.run_id for r in records}
    if len(run_ids) > 1:
        raise MixedRuns(run_ids)
    mems = {r.container_mem_mb for r in records}
    cores = {r.cpu_cores for r in records}
    roles = {r.role for r in records}
    if len(mems) > 1 or len(cores) > 1 or len(roles) > 1:
        raise InvariantViolation("records of one run must share container size, cores and role")
    role = next(iter(roles))

    by_target: dict[str, list[BenchmarkRecord]] = {}
    for rec in records:
        by_target.setdefault(rec.target_name, []).append(rec)

    out: list[str] = []
    for target in sorted(by_target):
        block = sorted(by_target[target], key=BenchmarkRecord.sort_key)
        timestamps = {r.timestamp for r in block}
        if len(timestamps) > 1:
            raise InvariantViolation(f"target {target}: records carry conflicting timestamps")
        first = block[0]
        header = (
            f"{HEADER_TAG} run={first.run_id} target={target} "
            f"mem={first.container_mem_mb} cores={first.cpu_cores} ts={format_ts(first.timestamp)}"
        )
        if role is Role.HISTORIC:
            header += " role=historic"
        out.append(header)
        for rec in block:
            out.append(f"{rec.attribute_id}|{rec.unit}|{_format_value(rec.value)}")
    return "\n".join(out) + "\n"


def parse_header(line: str, line_no: int) -> dict[str, str]:
    fields: dict[str, str] = {}
    for token in line.split()[1:]:
        if "=" not in token:
            raise ParseError(line_no, f"malformed header token {token!r}")
        key, _, value = token.partition("=")
        fields[key] = value
    for key in ("run", "target", "mem", "cores", "ts"):
        if key not in fields:
            raise ParseError(line_no, f"header missing {key}=")
    return fields


def parse_canonical(text: str, catalog: AttributeCatalog) -> list[BenchmarkRecord]:
    """Strictly parse canonical text (with block headers) back into records.

    Unlike :func:`parse_output`, unknown attributes and malformed lines are
    hard errors here: canonical files are produced by this package and must
    round-trip exactly.
    """
    records: list[BenchmarkRecord] = []
    header: dict[str, str] | None = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith(HEADER_TAG + " "):
            header = parse_header(line, line_no)
            continue
        if line.startswith("#"):
            continue
        if header is None:
            raise ParseError(line_no, "data line before any block header")
        parts = line.split("|")
        if len(parts) != 3:
            raise ParseError(line_no, f"expected attribute_id|unit|value, got {line!r}")
        attr_id, unit, value_s = (p.strip() for p in parts)
        if attr_id not in catalog:
            raise ParseError(line_no, f"attribute {attr_id!r} not in catalog")
        descriptor = catalog.get(attr_id)
        if unit != descriptor.unit:
            raise ParseError(
                line_no,
                f"unit mismatch for {attr_id}: file says {unit!r}, catalog says {descriptor.unit!r}",
            )
        try:
            value = float(value_s)
        except ValueError:
            raise MalformedValue(line_no, line) from None
        try:
            records.append(
                BenchmarkRecord(
                    target_name=header["target"],
                    attribute_id=attr_id,
                    value=value,
                    unit=unit,
                    container_mem_mb=int(header["mem"]),
                    cpu_cores=int(header["cores"]),
                    run_id=header["run"],
                    timestamp=parse_ts(header["ts"]),
                    role=Role.HISTORIC if header.get("role") == "historic" else Role.CURRENT,
                )
            )
        except (InvariantViolation, ValueError) as exc:
            raise ParseError(line_no, str(exc)) from exc
    if not records:
        raise NoRecognizedAttributes("canonical text contains no records")
    return records
