"""Domain vocabulary: attribute groups, catalogs, weights, targets, containers.

Everything here is an immutable value object, safe to share across threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping

from .errors import (
    EmptyGroup,
    InvariantViolation,
    MissingGroup,
    OutOfRange,
    ParseError,
)

MIN_WEIGHT = 0.0
MAX_WEIGHT = 5.0

_NAME_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]*$")


class GroupId(Enum):
    """The four benchmark attribute groups, in canonical weight order."""

    MEMORY_PROCESS = "memory_process"
    LOCAL_COMMUNICATION = "local_communication"
    COMPUTATION = "computation"
    STORAGE = "storage"


# Canonical ordering used for weight vectors, file formats and API payloads.
GROUP_ORDER: tuple[GroupId, ...] = (
    GroupId.MEMORY_PROCESS,
    GroupId.LOCAL_COMMUNICATION,
    GroupId.COMPUTATION,
    GroupId.STORAGE,
)


class Direction(Enum):
    """Direction of merit: whether a larger raw value means better performance."""

    HIGHER_IS_BETTER = "higher"
    LOWER_IS_BETTER = "lower"


@dataclass(frozen=True)
class AttributeDescriptor:
    """One benchmarked attribute: stable id, group membership, unit, polarity."""

    id: str
    display_name: str
    group: GroupId
    unit: str
    direction: Direction

    def __post_init__(self):
        if not _NAME_RE.match(self.id):
            raise InvariantViolation(f"attribute id {self.id!r} is not a valid key")
        if not self.display_name:
            raise InvariantViolation(f"attribute {self.id}: empty display name")
        if not self.unit or "|" in self.unit or any(c.isspace() for c in self.unit):
            raise InvariantViolation(f"attribute {self.id}: unit {self.unit!r} invalid")


@dataclass(frozen=True)
class AttributeCatalog:
    """Ordered, immutable collection of attribute descriptors."""

    attributes: tuple[AttributeDescriptor, ...]
    version: int = 1

    def __post_init__(self):
        if not self.attributes:
            raise InvariantViolation("catalog must not be empty")
        seen: set[str] = set()
        for attr in self.attributes:
            if attr.id in seen:
                raise InvariantViolation(f"duplicate attribute id {attr.id!r}")
            seen.add(attr.id)
        object.__setattr__(self, "_by_id", {a.id: a for a in self.attributes})

    def __contains__(self, attribute_id: str) -> bool:
        return attribute_id in self._by_id

    def __len__(self) -> int:
        return len(self.attributes)

    def get(self, attribute_id: str) -> AttributeDescriptor:
        try:
            return self._by_id[attribute_id]
        except KeyError:
            raise InvariantViolation(f"attribute {attribute_id!r} not in catalog") from None

    def ids(self) -> list[str]:
        return [a.id for a in self.attributes]

    def groups_covered(self) -> set[GroupId]:
        return {a.group for a in self.attributes}


@dataclass(frozen=True)
class WeightVector:
    """The four user-supplied group weights, each within [0, 5]."""

    memory_process: float
    local_communication: float
    computation: float
    storage: float

    def __getitem__(self, group: GroupId) -> float:
        return getattr(self, group.value)

    def as_dict(self) -> dict[GroupId, float]:
        return {g: self[g] for g in GROUP_ORDER}

    def as_tuple(self) -> tuple[float, float, float, float]:
        return tuple(self[g] for g in GROUP_ORDER)  # type: ignore[return-value]

    @property
    def any_nonzero(self) -> bool:
        return any(w != 0.0 for w in self.as_tuple())


@dataclass(frozen=True)
class TargetDescriptor:
    """One machine in the inventory (a VM type in cloud terms)."""

    name: str
    address: str
    vcpus: int
    memory_mib: int
    metadata: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not _NAME_RE.match(self.name):
            raise InvariantViolation(f"target name {self.name!r} is not a valid key")
        if self.vcpus < 1:
            raise InvariantViolation(f"target {self.name}: vcpus must be >= 1")
        if self.memory_mib < 1:
            raise InvariantViolation(f"target {self.name}: memory_mib must be >= 1")


@dataclass(frozen=True)
class ContainerSpec:
    """Resource slice benchmarked on each target: memory size and core count."""

    memory_mb: int
    cpu_cores: int

    def __post_init__(self):
        if self.memory_mb < 1:
            raise InvariantViolation("container memory_mb must be >= 1")
        if self.cpu_cores < 1:
            raise InvariantViolation("container cpu_cores must be >= 1")


def validate_weights(raw: Mapping[GroupId, float] | WeightVector) -> WeightVector:
    """Validate user weights and return an immutable vector.

    Accepts either a mapping keyed by :class:`GroupId` or an existing
    :class:`WeightVector` (idempotent). All four groups must be present and
    every weight must lie in [0, 5]. An all-zero vector is accepted here;
    scoring rejects it later.

    Raises:
        MissingGroup: a group key is absent.
        OutOfRange: a weight lies outside [0, 5].
    """
    if isinstance(raw, WeightVector):
        mapping: Mapping[GroupId, float] = raw.as_dict()
    else:
        mapping = raw
    values: dict[GroupId, float] = {}
    for group in GROUP_ORDER:
        if group not in mapping:
            raise MissingGroup(group.value)
        w = float(mapping[group])
        if not (MIN_WEIGHT <= w <= MAX_WEIGHT):
            raise OutOfRange(group.value, w)
        values[group] = w
    return WeightVector(*(values[g] for g in GROUP_ORDER))


def weights_from_list(values: Iterable[float]) -> WeightVector:
    """Build a weight vector from four numbers in canonical group order."""
    vals = list(values)
    if len(vals) != 4:
        raise InvariantViolation(f"expected 4 weights, got {len(vals)}")
    return validate_weights(dict(zip(GROUP_ORDER, vals)))


_GROUP_TOKENS = {g.value: g for g in GroupId}
_DIRECTION_TOKENS = {d.value: d for d in Direction}


def _iter_data_lines(text: str):
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield line_no, line


def parse_catalog_text(text: str, version: int = 1) -> AttributeCatalog:
    """Parse catalog override text: ``id|display_name|group|unit|direction`` lines."""
    attrs: list[AttributeDescriptor] = []
    seen: set[str] = set()
    for line_no, line in _iter_data_lines(text):
        parts = line.split("|")
        if len(parts) != 5:
            raise ParseError(line_no, f"expected 5 fields, got {len(parts)}")
        attr_id, display_name, group_tok, unit, direction_tok = (p.strip() for p in parts)
        if attr_id in seen:
            raise ParseError(line_no, f"duplicate attribute id {attr_id!r}")
        if group_tok not in _GROUP_TOKENS:
            raise ParseError(line_no, f"unknown group {group_tok!r}")
        if direction_tok not in _DIRECTION_TOKENS:
            raise ParseError(line_no, f"unknown direction {direction_tok!r} (higher|lower)")
        try:
            attrs.append(
                AttributeDescriptor(
                    id=attr_id,
                    display_name=display_name,
                    group=_GROUP_TOKENS[group_tok],
                    unit=unit,
                    direction=_DIRECTION_TOKENS[direction_tok],
                )
            )
        except InvariantViolation as exc:
            raise ParseError(line_no, str(exc)) from exc
        seen.add(attr_id)
    if not attrs:
        raise ParseError(0, "catalog file contains no attribute lines")
    catalog = AttributeCatalog(attributes=tuple(attrs), version=version)
    _require_all_groups(catalog)
    return catalog


def _require_all_groups(catalog: AttributeCatalog):
    covered = catalog.groups_covered()
    for group in GROUP_ORDER:
        if group not in covered:
            raise EmptyGroup(group.value)


def load_catalog(override_path: str | Path | None = None) -> AttributeCatalog:
    """Return the built-in catalog, or a full replacement parsed from a file.

    The override file completely replaces the default; it must still cover
    all four groups.

    Raises:
        ParseError: malformed override line.
        EmptyGroup: a group ends up with no attributes.
    """
    if override_path is None:
        return default_catalog()
    text = Path(override_path).read_text(encoding="utf-8")
    return parse_catalog_text(text, version=2)


def load_inventory(path: str | Path) -> list[TargetDescriptor]:
    """Parse an inventory file: ``name|address|vcpus|memory_mib`` lines."""
    targets: list[TargetDescriptor] = []
    seen: set[str] = set()
    text = Path(path).read_text(encoding="utf-8")
    for line_no, line in _iter_data_lines(text):
        parts = line.split("|")
        if len(parts) != 4:
            raise ParseError(line_no, f"expected 4 fields, got {len(parts)}")
        name, address, vcpus_s, mem_s = (p.strip() for p in parts)
        if name in seen:
            raise ParseError(line_no, f"duplicate target {name!r}")
        try:
            vcpus = int(vcpus_s)
            memory_mib = int(mem_s)
        except ValueError:
            raise ParseError(line_no, "vcpus and memory_mib must be integers") from None
        try:
            targets.append(
                TargetDescriptor(name=name, address=address, vcpus=vcpus, memory_mib=memory_mib)
            )
        except InvariantViolation as exc:
            raise ParseError(line_no, str(exc)) from exc
        seen.add(name)
    return targets


def _lat(attr_id: str, name: str) -> AttributeDescriptor:
    return AttributeDescriptor(attr_id, name, GroupId.MEMORY_PROCESS, "ns", Direction.LOWER_IS_BETTER)


def _bw(attr_id: str, name: str) -> AttributeDescriptor:
    return AttributeDescriptor(attr_id, name, GroupId.LOCAL_COMMUNICATION, "MB/sec", Direction.HIGHER_IS_BETTER)


def _op(attr_id: str, name: str) -> AttributeDescriptor:
    return AttributeDescriptor(attr_id, name, GroupId.COMPUTATION, "ns", Direction.LOWER_IS_BETTER)


def _file(attr_id: str, name: str) -> AttributeDescriptor:
    return AttributeDescriptor(attr_id, name, GroupId.STORAGE, "ops/sec", Direction.HIGHER_IS_BETTER)


_DEFAULT_ATTRIBUTES: tuple[AttributeDescriptor, ...] = (
    # memory & process: latencies, lower is better
    _lat("mem.latency.main", "Main memory latency"),
    _lat("mem.latency.random", "Random memory latency"),
    _lat("mem.latency.l1", "L1 cache latency"),
    _lat("mem.latency.l2", "L2 cache latency"),
    # local communication: transfer rates, higher is better
    _bw("comm.bw.mem_read", "Memory read bandwidth"),
    _bw("comm.bw.mem_write", "Memory write bandwidth"),
    _bw("comm.bw.pipe", "Pipe transfer rate"),
    _bw("comm.bw.af_unix", "AF_UNIX socket transfer rate"),
    _bw("comm.bw.tcp", "TCP transfer rate"),
    # computation: arithmetic operation latencies, lower is better
    _op("compute.lat.int_add", "Integer add latency"),
    _op("compute.lat.int_mul", "Integer multiply latency"),
    _op("compute.lat.int_div", "Integer divide latency"),
    _op("compute.lat.int_mod", "Integer modulus latency"),
    _op("compute.lat.float_add", "Float add latency"),
    _op("compute.lat.float_mul", "Float multiply latency"),
    _op("compute.lat.float_div", "Float divide latency"),
    _op("compute.lat.double_add", "Double add latency"),
    _op("compute.lat.double_mul", "Double multiply latency"),
    _op("compute.lat.double_div", "Double divide latency"),
    # storage: file operation rates, higher is better
    _file("storage.rate.seq_create", "Sequential file create rate"),
    _file("storage.rate.seq_read", "Sequential file read rate"),
    _file("storage.rate.seq_delete", "Sequential file delete rate"),
    _file("storage.rate.rand_create", "Random file create rate"),
    _file("storage.rate.rand_read", "Random file read rate"),
    _file("storage.rate.rand_delete", "Random file delete rate"),
)

_default: AttributeCatalog | None = None


def default_catalog() -> AttributeCatalog:
    """The built-in attribute catalog: 25 attributes spanning all four groups."""
    global _default
    if _default is None:
        _default = AttributeCatalog(attributes=_DEFAULT_ATTRIBUTES, version=1)
        _require_all_groups(_default)
    return _default
