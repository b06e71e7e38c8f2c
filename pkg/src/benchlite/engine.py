"""Ranking engine: grouping, z-score normalization, weighted scoring, ranks.

The pipeline is organise -> normalise -> score -> rank. Attributes where a
lower raw value is better are negated when the matrix is built, so that
"bigger z means better" holds uniformly downstream. Columns with zero spread
carry no information and are excluded from group aggregates entirely, which
keeps them score-neutral.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    AllZeroWeights,
    InsufficientData,
    InvariantViolation,
    RaggedData,
    TargetSetMismatch,
    TooFewTargets,
)
from .ingestion import BenchmarkRecord
from .model import (
    GROUP_ORDER,
    AttributeCatalog,
    Direction,
    GroupId,
    WeightVector,
    validate_weights,
)


class Method(Enum):
    NATIVE = "native"
    HYBRID = "hybrid"
    EMPIRICAL = "empirical"


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.asarray(arr, dtype=np.float64)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class GroupedMatrix:
    """Targets x attributes value matrix, polarity already applied."""

    targets: tuple[str, ...]
    attribute_ids: tuple[str, ...]
    values: np.ndarray  # shape (m, n)
    grouping: Mapping[str, GroupId]

    def __post_init__(self):
        m, n = self.values.shape
        if m != len(self.targets) or n != len(self.attribute_ids):
            raise InvariantViolation("matrix shape disagrees with labels")
        if not np.all(np.isfinite(self.values)):
            raise InvariantViolation("matrix contains non-finite values")

    def column(self, attribute_id: str) -> np.ndarray:
        return self.values[:, self.attribute_ids.index(attribute_id)]


@dataclass(frozen=True)
class NormalizedMatrix:
    targets: tuple[str, ...]
    attribute_ids: tuple[str, ...]
    grouping: Mapping[str, GroupId]
    mean: np.ndarray  # per-attribute mean of the adjusted values
    std: np.ndarray  # population standard deviation, zeros preserved
    z: np.ndarray  # shape (m, n); zero-spread columns are all-zero

    def informative(self) -> np.ndarray:
        """Boolean mask of attributes with nonzero spread."""
        return self.std > 0.0


@dataclass(frozen=True)
class RankEntry:
    target: str
    score: float
    rank: int


@dataclass(frozen=True)
class RankTable:
    entries: tuple[RankEntry, ...]
    method: Method

    def __post_init__(self):
        if not self.entries:
            raise InvariantViolation("rank table must not be empty")
        ranks = [e.rank for e in self.entries]
        if ranks != sorted(ranks) or min(ranks) != 1:
            raise InvariantViolation("entries must be sorted by rank starting at 1")

    def rank_of(self, target: str) -> int:
        for e in self.entries:
            if e.target == target:
                return e.rank
        raise KeyError(target)

    def targets(self) -> set[str]:
        return {e.target for e in self.entries}


def organise_groups(
    records: Iterable[BenchmarkRecord], catalog: AttributeCatalog
) -> GroupedMatrix:
    """Build the grouped value matrix from a flat record set.

    Duplicate (target, attribute) observations are averaged. Every target
    must cover the same attribute set; a gap raises RaggedData naming the
    first offending target and what it lacks.
    """
    cells: dict[str, dict[str, list[float]]] = {}
    for rec in records:
        desc = catalog.get(rec.attribute_id)  # raises on unknown attribute
        cells.setdefault(rec.target_name, {}).setdefault(desc.id, []).append(rec.value)

    targets = tuple(sorted(cells))
    if len(targets) < 2:
        raise TooFewTargets(len(targets))

    seen = set()
    for per_target in cells.values():
        seen.update(per_target)
    attribute_ids = tuple(a.id for a in catalog.attributes if a.id in seen)

    for name in targets:
        missing = [a for a in attribute_ids if a not in cells[name]]
        if missing:
            raise RaggedData(name, missing)

    values = np.empty((len(targets), len(attribute_ids)), dtype=np.float64)
    for i, name in enumerate(targets):
        for j, attr in enumerate(attribute_ids):
            v = float(np.mean(cells[name][attr]))
            if catalog.get(attr).direction is Direction.LOWER_IS_BETTER:
                v = -v
            values[i, j] = v

    grouping = {a: catalog.get(a).group for a in attribute_ids}
    return GroupedMatrix(targets, attribute_ids, _frozen(values), grouping)


def normalise(matrix: GroupedMatrix) -> NormalizedMatrix:
    """Column-wise z-scores with the population standard deviation.

    Zero-spread columns get z = 0 everywhere rather than a divide-by-zero.
    """
    mu = matrix.values.mean(axis=0)
    sigma = matrix.values.std(axis=0)  # ddof=0
    z = np.zeros_like(matrix.values)
    live = sigma > 0.0
    z[:, live] = (matrix.values[:, live] - mu[live]) / sigma[live]
    return NormalizedMatrix(
        targets=matrix.targets,
        attribute_ids=matrix.attribute_ids,
        grouping=matrix.grouping,
        mean=_frozen(mu),
        std=_frozen(sigma),
        z=_frozen(z),
    )


def group_aggregates(norm: NormalizedMatrix) -> np.ndarray:
    """Per-target mean z within each group, taken over informative attributes.

    Returns shape (m, 4) in canonical group order. A group with no
    informative attributes contributes zero.
    """
    m = len(norm.targets)
    out = np.zeros((m, len(GROUP_ORDER)), dtype=np.float64)
    live = norm.informative()
    for k, group in enumerate(GROUP_ORDER):
        cols = [
            j
            for j, attr in enumerate(norm.attribute_ids)
            if norm.grouping[attr] is group and live[j]
        ]
        if cols:
            out[:, k] = norm.z[:, cols].mean(axis=1)
    return out


def score_native(norm: NormalizedMatrix, weights: WeightVector | Mapping[GroupId, float]) -> list[tuple[str, float]]:
    """Weighted sum of group aggregates, one score per target."""
    w = validate_weights(weights)
    if not w.any_nonzero:
        raise AllZeroWeights()
    agg = group_aggregates(norm)
    scores = agg @ np.array(w.as_tuple(), dtype=np.float64)
    return [(t, float(s)) for t, s in zip(norm.targets, scores)]


def score_hybrid(
    current: NormalizedMatrix,
    historic: NormalizedMatrix,
    weights: WeightVector | Mapping[GroupId, float],
) -> list[tuple[str, float]]:
    """Sum of the container-sliced score and the whole-machine baseline score.

    Each side is normalized within its own population before the add, so
    neither scale dominates.
    """
    if set(current.targets) != set(historic.targets):
        only_cur = sorted(set(current.targets) - set(historic.targets))
        only_hist = sorted(set(historic.targets) - set(current.targets))
        raise TargetSetMismatch(only_cur, only_hist)
    cur = dict(score_native(current, weights))
    hist = dict(score_native(historic, weights))
    return [(t, cur[t] + hist[t]) for t in current.targets]


def rank(scores: Sequence[tuple[str, float]], method: Method = Method.NATIVE) -> RankTable:
    """Standard competition ranking: rank = 1 + count of strictly higher scores.

    Ties share a rank and keep their input order in the table.
    """
    if not scores:
        raise InvariantViolation("cannot rank an empty score list")
    names = [t for t, _ in scores]
    if len(set(names)) != len(names):
        raise InvariantViolation("duplicate target in score list")
    vals = [s for _, s in scores]
    ranks = [1 + sum(1 for other in vals if other > s) for s in vals]
    order = sorted(range(len(scores)), key=lambda i: (ranks[i], i))
    entries = tuple(RankEntry(names[i], vals[i], ranks[i]) for i in order)
    return RankTable(entries=entries, method=method)


def rank_targets(
    weights: WeightVector | Mapping[GroupId, float],
    repository,
    method: Method,
    container_mem_mb: int,
    catalog: AttributeCatalog | None = None,
) -> RankTable:
    """End-to-end ranking straight from the store.

    Native uses the freshest run per target at the given container size.
    Hybrid additionally needs baseline data for every one of those targets
    and fails with InsufficientData naming whichever side is lacking.
    """
    from .repository import QueryRole  # local import to avoid a cycle

    w = validate_weights(weights)
    if not w.any_nonzero:
        raise AllZeroWeights()
    if method is Method.EMPIRICAL:
        raise InvariantViolation("empirical tables come from timings, not the store")
    cat = catalog if catalog is not None else repository.catalog

    current_records = repository.query(
        container_mem_mb=container_mem_mb, role=QueryRole.CURRENT
    )
    present = {r.target_name for r in current_records}
    if len(present) < 2:
        raise InsufficientData(
            "Current",
            f"{len(present)} target(s) have records at mem={container_mem_mb} MB; need at least 2",
        )
    cur = normalise(organise_groups(current_records, cat))

    if method is Method.NATIVE:
        return rank(score_native(cur, w), Method.NATIVE)

    historic_records = [
        r
        for r in repository.query(role=QueryRole.HISTORIC)
        if r.target_name in present
    ]
    have = {r.target_name for r in historic_records}
    missing = sorted(present - have)
    if missing:
        raise InsufficientData(
            "Historic", "no baseline data for: " + ", ".join(missing)
        )
    hist = normalise(organise_groups(historic_records, cat))
    return rank(score_hybrid(cur, hist, w), Method.HYBRID)
