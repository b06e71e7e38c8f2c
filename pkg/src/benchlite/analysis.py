"""Agreement between predicted rank tables and measured application timings.

Empirical ranks come straight from wall-clock times (fastest is rank 1,
ties share a rank). Agreement is summarized two ways: the sum of absolute
rank displacements, and the product-moment correlation of the two rank
vectors expressed as a percentage. Correlation is computed on the
competition-rank integers as-is; tied entries keep their shared rank
rather than being spread into midranks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .errors import (
    InvariantViolation,
    MalformedValue,
    ParseError,
    TargetSetMismatch,
    TooFewTargets,
    ZeroVariance,
)
from .engine import Method, RankEntry, RankTable


@dataclass(frozen=True)
class TimingVector:
    """Measured application times per target, seconds."""

    entries: tuple[tuple[str, float], ...]
    label: str = ""

    def __post_init__(self):
        if len(self.entries) < 2:
            raise TooFewTargets(len(self.entries))
        names = [t for t, _ in self.entries]
        if len(set(names)) != len(names):
            raise InvariantViolation("duplicate target in timing vector")
        for name, seconds in self.entries:
            if not math.isfinite(seconds) or seconds <= 0:
                raise InvariantViolation(f"timing for {name} must be finite and positive")


def empirical_ranks(timings: TimingVector) -> RankTable:
    """Competition-rank the targets by time, lowest first.

    The score column of the resulting table holds the measured seconds.
    """
    secs = [s for _, s in timings.entries]
    ranks = [1 + sum(1 for other in secs if other < s) for s in secs]
    order = sorted(range(len(secs)), key=lambda i: (ranks[i], i))
    entries = tuple(
        RankEntry(timings.entries[i][0], secs[i], ranks[i]) for i in order
    )
    return RankTable(entries=entries, method=Method.EMPIRICAL)


def _aligned_ranks(predicted: RankTable, empirical: RankTable) -> tuple[list[str], list[int], list[int]]:
    pt, et = predicted.targets(), empirical.targets()
    if pt != et:
        raise TargetSetMismatch(sorted(pt - et), sorted(et - pt))
    names = [e.target for e in predicted.entries]
    rp = [e.rank for e in predicted.entries]
    re_by_name = {e.target: e.rank for e in empirical.entries}
    re = [re_by_name[n] for n in names]
    return names, rp, re


def rank_distance_sum(predicted: RankTable, empirical: RankTable) -> int:
    """Sum over targets of |predicted rank - empirical rank|."""
    _, rp, re = _aligned_ranks(predicted, empirical)
    return sum(abs(a - b) for a, b in zip(rp, re))


def rank_correlation(predicted: RankTable, empirical: RankTable) -> float:
    """Product-moment correlation of the rank vectors, as a percentage.

    Full precision; round only at presentation time.
    """
    _, rp, re = _aligned_ranks(predicted, empirical)
    n = len(rp)
    mp = sum(rp) / n
    me = sum(re) / n
    dp = [x - mp for x in rp]
    de = [x - me for x in re]
    sp = math.sqrt(sum(d * d for d in dp))
    se = math.sqrt(sum(d * d for d in de))
    if sp == 0.0:
        raise ZeroVariance("predicted ranks")
    if se == 0.0:
        raise ZeroVariance("empirical ranks")
    cov = sum(a * b for a, b in zip(dp, de))
    return 100.0 * cov / (sp * se)


@dataclass(frozen=True)
class RankComparison:
    predicted: RankTable
    empirical: RankTable
    per_target: tuple[tuple[str, int, int, int], ...]  # (target, rp, re, |d|)
    distance_sum: int
    correlation_pct: float


def compare_tables(predicted: RankTable, empirical: RankTable) -> RankComparison:
    names, rp, re = _aligned_ranks(predicted, empirical)
    rows = tuple(
        (n, a, b, abs(a - b)) for n, a, b in zip(names, rp, re)
    )
    return RankComparison(
        predicted=predicted,
        empirical=empirical,
        per_target=rows,
        distance_sum=rank_distance_sum(predicted, empirical),
        correlation_pct=rank_correlation(predicted, empirical),
    )


def comparison_report(comp: RankComparison) -> str:
    """Human-readable table plus machine-readable summary lines."""
    width = max(len("target"), *(len(r[0]) for r in comp.per_target))
    lines = [f"{'target':<{width}}  predicted  measured  |d|"]
    for name, rp, re, d in comp.per_target:
        lines.append(f"{name:<{width}}  {rp:>9}  {re:>8}  {d:>3}")
    lines.append("")
    lines.append(
        f"rank distance sum {comp.distance_sum}, correlation {comp.correlation_pct:.1f}%"
    )
    lines.append(f"summary|d_s|{comp.distance_sum}")
    lines.append(f"summary|corr_pct|{comp.correlation_pct:.1f}")
    return "\n".join(lines) + "\n"


def comparison_csv(comp: RankComparison) -> str:
    lines = ["target,predicted_rank,measured_rank,abs_diff"]
    for name, rp, re, d in comp.per_target:
        lines.append(f"{name},{rp},{re},{d}")
    return "\n".join(lines) + "\n"


# -- file formats ---------------------------------------------------------


def load_timings(path: str | Path, label: str = "") -> TimingVector:
    """Read `target|seconds` lines."""
    entries: list[tuple[str, float]] = []
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("|")
        if len(parts) != 2:
            raise ParseError(line_no, f"expected target|seconds, got {len(parts)} fields")
        try:
            entries.append((parts[0].strip(), float(parts[1])))
        except ValueError as exc:
            raise MalformedValue(line_no, raw, str(exc)) from exc
    if not entries:
        raise ParseError(0, f"no timing lines in {path}")
    return TimingVector(entries=tuple(entries), label=label or str(path))


def load_rank_file(path: str | Path) -> RankTable:
    """Read a rank table: `target|rank` or `target|score|rank` lines."""
    rows: list[tuple[str, float, int]] = []
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split("|")]
        try:
            if len(parts) == 2:
                rows.append((parts[0], 0.0, int(parts[1])))
            elif len(parts) == 3:
                rows.append((parts[0], float(parts[1]), int(parts[2])))
            else:
                raise ParseError(
                    line_no, f"expected target|rank or target|score|rank, got {len(parts)} fields"
                )
        except ValueError as exc:
            raise MalformedValue(line_no, raw, str(exc)) from exc
    if not rows:
        raise ParseError(0, f"no rank lines in {path}")
    rows.sort(key=lambda r: r[2])
    entries = tuple(RankEntry(name, score, rk) for name, score, rk in rows)
    return RankTable(entries=entries, method=Method.NATIVE)


@dataclass(frozen=True)
class FixtureCell:
    """One published table cell: a predicted column next to the measured one."""

    case: int
    mode: str  # sequential | parallel
    method: Method
    size_mb: int
    rows: tuple[tuple[str, int, int], ...]  # (target, empirical_rank, predicted_rank)

    def empirical_table(self) -> RankTable:
        ordered = sorted(self.rows, key=lambda r: r[1])
        return RankTable(
            entries=tuple(RankEntry(t, 0.0, e) for t, e, _ in ordered),
            method=Method.EMPIRICAL,
        )

    def predicted_table(self) -> RankTable:
        ordered = sorted(self.rows, key=lambda r: r[2])
        return RankTable(
            entries=tuple(RankEntry(t, 0.0, p) for t, _, p in ordered),
            method=self.method,
        )


def load_rank_fixtures(path: str | Path) -> list[FixtureCell]:
    """Read `table|case|mode|method|size|target|empirical|rank` lines."""
    cells: dict[tuple[int, str, str, int], list[tuple[str, int, int]]] = {}
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split("|")]
        if len(parts) != 8 or parts[0] != "table":
            raise ParseError(line_no, "expected table|case|mode|method|size|target|empirical|rank")
        try:
            case = int(parts[1])
            mode, method_name = parts[2], parts[3]
            size = int(parts[4])
            target = parts[5]
            emp, rk = int(parts[6]), int(parts[7])
        except ValueError as exc:
            raise MalformedValue(line_no, raw, str(exc)) from exc
        if mode not in ("sequential", "parallel"):
            raise ParseError(line_no, f"unknown mode {mode!r}")
        if method_name not in ("native", "hybrid"):
            raise ParseError(line_no, f"unknown method {method_name!r}")
        cells.setdefault((case, mode, method_name, size), []).append((target, emp, rk))
    out = []
    for (case, mode, method_name, size), rows in sorted(cells.items()):
        out.append(
            FixtureCell(
                case=case,
                mode=mode,
                method=Method(method_name),
                size_mb=size,
                rows=tuple(rows),
            )
        )
    return out
