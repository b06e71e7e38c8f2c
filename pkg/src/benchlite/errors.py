"""Exception taxonomy shared across benchlite modules.

Every error carries a stable ``code`` (the class name) so the CLI and the
HTTP API can emit machine-parseable ``code``/``message`` pairs without
leaking stack traces.
"""

from __future__ import annotations


class BenchliteError(Exception):
    """Base class for all benchlite domain errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


# --- weights / catalog ------------------------------------------------------

class OutOfRange(BenchliteError):
    def __init__(self, group: str, value: float):
        self.group = group
        self.value = value
        super().__init__(f"weight for {group} is {value}, must be within [0, 5]")


class MissingGroup(BenchliteError):
    def __init__(self, group: str):
        self.group = group
        super().__init__(f"weight vector is missing group {group}")


class ParseError(BenchliteError):
    def __init__(self, line_no: int, reason: str):
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"line {line_no}: {reason}")


class EmptyGroup(BenchliteError):
    def __init__(self, group: str):
        self.group = group
        super().__init__(f"catalog has no attributes in group {group}")


# --- ingestion ---------------------------------------------------------------

class NoRecognizedAttributes(BenchliteError):
    def __init__(self, detail: str = "no attribute lines recognized in tool output"):
        super().__init__(detail)


class MalformedValue(BenchliteError):
    def __init__(self, line_no: int, line: str, reason: str = "non-numeric value"):
        self.line_no = line_no
        self.line = line
        super().__init__(f"line {line_no} ({line!r}): {reason}")


class MixedRuns(BenchliteError):
    def __init__(self, run_ids: set[str]):
        self.run_ids = run_ids
        super().__init__(f"records span multiple runs: {sorted(run_ids)}")


class InvariantViolation(BenchliteError):
    pass


# --- repository ---------------------------------------------------------------

class DuplicateRun(BenchliteError):
    def __init__(self, run_id: str):
        self.run_id = run_id
        super().__init__(f"run {run_id} already present in repository")


class RepositoryWriteFailure(BenchliteError):
    def __init__(self, reason: str, salvage_path: str | None = None):
        self.salvage_path = salvage_path
        msg = f"repository append failed: {reason}"
        if salvage_path:
            msg += f" (run output preserved at {salvage_path})"
        super().__init__(msg)


# --- orchestrator --------------------------------------------------------------

class EmptyInventory(BenchliteError):
    def __init__(self, detail: str = "inventory contains no targets"):
        super().__init__(detail)


class CoresExceedTarget(BenchliteError):
    def __init__(self, target: str, requested: int, available: int):
        self.target = target
        super().__init__(
            f"container requests {requested} cores but target {target} has {available} vcpus"
        )


class AllTargetsFailed(BenchliteError):
    def __init__(self, run_id: str):
        self.run_id = run_id
        super().__init__(f"run {run_id}: every target failed, nothing stored")


class UnknownTarget(BenchliteError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"target {name} not present in executor profile")


class ExecutorTimeout(BenchliteError):
    def __init__(self, target: str, timeout_s: float):
        self.target = target
        super().__init__(f"benchmark on {target} exceeded {timeout_s}s")


# --- ranking engine -------------------------------------------------------------

class RaggedData(BenchliteError):
    def __init__(self, target: str, missing: list[str]):
        self.target = target
        self.missing = missing
        super().__init__(f"target {target} is missing attributes: {', '.join(missing)}")


class TooFewTargets(BenchliteError):
    def __init__(self, count: int):
        self.count = count
        super().__init__(f"need at least 2 targets to normalise, got {count}")


class AllZeroWeights(BenchliteError):
    def __init__(self):
        super().__init__("all four group weights are zero; scores would be meaningless")


class TargetSetMismatch(BenchliteError):
    def __init__(self, only_left: set[str], only_right: set[str]):
        self.only_left = only_left
        self.only_right = only_right
        parts = []
        if only_left:
            parts.append(f"only in first: {sorted(only_left)}")
        if only_right:
            parts.append(f"only in second: {sorted(only_right)}")
        super().__init__("target sets differ; " + "; ".join(parts))


class InsufficientData(BenchliteError):
    def __init__(self, role: str, detail: str = ""):
        self.role = role
        msg = f"repository lacks {role} data for ranking"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


# --- rank analysis ----------------------------------------------------------------

class ZeroVariance(BenchliteError):
    def __init__(self, which: str):
        self.which = which
        super().__init__(f"{which} rank vector is constant; correlation undefined")
