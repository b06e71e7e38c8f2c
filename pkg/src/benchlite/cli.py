"""Command-line interface: run, rank, compare, import, serve.

Exit codes: 0 on success, 2 for input problems (bad flags, missing files,
malformed data), 1 for runtime failures (store conflicts, failed fleets).
Every failure prints a single `error|<Code>|<message>` line to stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .analysis import (
    compare_tables,
    comparison_csv,
    comparison_report,
    empirical_ranks,
    load_rank_file,
    load_timings,
)
from .engine import Method, rank_targets
from .errors import (
    AllTargetsFailed,
    BenchliteError,
    DuplicateRun,
    ExecutorTimeout,
    InsufficientData,
    InvariantViolation,
    RepositoryWriteFailure,
    TargetSetMismatch,
    ZeroVariance,
)
from .ingestion import Role
from .model import (
    ContainerSpec,
    default_catalog,
    load_catalog,
    load_inventory,
    weights_from_list,
)
from .orchestrator import (
    MockExecutor,
    RunOptions,
    execute_run,
    load_mock_profile,
    plan_run,
)
from .repository import Repository

# failures of the work itself, as opposed to failures of the invocation
_RUNTIME_ERRORS = (
    AllTargetsFailed,
    RepositoryWriteFailure,
    DuplicateRun,
    InsufficientData,
    ZeroVariance,
    TargetSetMismatch,
    ExecutorTimeout,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # keep the one-line contract even for flag typos
        print(f"error|UsageError|{message}", file=sys.stderr)
        raise SystemExit(2)


def _catalog(args: argparse.Namespace):
    return load_catalog(args.catalog) if args.catalog else default_catalog()


def _existing(path: str) -> Path:
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(2, "no such file", path)
    return p


def _parse_weights_flag(text: str):
    parts = text.split(",")
    try:
        values = [float(p) for p in parts]
    except ValueError as exc:
        raise InvariantViolation(f"bad --weights value: {exc}") from exc
    return weights_from_list(values)


def cmd_run(args: argparse.Namespace) -> int:
    catalog = _catalog(args)
    inventory = load_inventory(_existing(args.inventory))
    repository = Repository(args.repository, catalog)
    if args.executor != "mock":
        raise InvariantViolation(f"unknown executor {args.executor!r}")
    if not args.profile:
        raise InvariantViolation("--executor mock requires --profile")
    executor = MockExecutor(
        profile=load_mock_profile(_existing(args.profile)),
        seed=args.seed,
        catalog=catalog,
    )
    options = RunOptions(
        run_id=args.run_id,
        target_names=tuple(args.targets.split(",")) if args.targets else None,
        max_parallel_targets=args.max_parallel,
        timeout_s=args.timeout_s,
    )
    plan = plan_run(inventory, ContainerSpec(args.mem, args.cores), options)
    result = execute_run(plan, executor, repository, catalog=catalog)
    for name in sorted(result.outcomes):
        outcome = result.outcomes[name]
        line = f"{name}|{outcome.status.value}|{outcome.duration_s:.3f}"
        if outcome.reason:
            line += f"|{outcome.reason}"
        print(line)
    succeeded = len(result.succeeded())
    failed = len(result.outcomes) - succeeded
    print(f"run|{result.run_id}|succeeded={succeeded} failed={failed}")
    return 0


def cmd_rank(args: argparse.Namespace) -> int:
    catalog = _catalog(args)
    repository = Repository(_existing(args.repository), catalog)
    weights = _parse_weights_flag(args.weights)
    table = rank_targets(
        weights, repository, Method(args.method), container_mem_mb=args.mem, catalog=catalog
    )
    if args.machine:
        for e in table.entries:
            print(f"{e.target}|{e.score:.4f}|{e.rank}")
    else:
        width = max(len("target"), *(len(e.target) for e in table.entries))
        print(f"rank  {'target':<{width}}  score")
        for e in table.entries:
            print(f"{e.rank:>4}  {e.target:<{width}}  {e.score:>9.4f}")
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    predicted = load_rank_file(_existing(args.benchmark))
    timings = load_timings(_existing(args.empirical))
    comp = compare_tables(predicted, empirical_ranks(timings))
    text = comparison_csv(comp) if args.csv else comparison_report(comp)
    sys.stdout.write(text)
    return 0


def cmd_import(args: argparse.Namespace) -> int:
    catalog = _catalog(args)
    repository = Repository(args.repository, catalog)
    role = Role.HISTORIC if args.role == "historic" else Role.CURRENT
    text = _existing(args.file).read_text(encoding="utf-8")
    run_ids = repository.import_canonical(text, force_role=role)
    for run_id in run_ids:
        print(f"imported|{run_id}")
    print(f"import|{args.file}|runs={len(run_ids)}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    from .service import load_config, serve

    config = load_config(_existing(args.config))
    serve(config)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="benchlite", description="Container-sliced VM benchmarking and ranking.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="benchmark the fleet inside container slices")
    p_run.add_argument("--mem", type=int, required=True, help="container memory limit, MB")
    p_run.add_argument("--cores", type=int, required=True, help="container CPU core count")
    p_run.add_argument("--inventory", required=True, help="target inventory file")
    p_run.add_argument("--repository", required=True, help="benchmark store file")
    p_run.add_argument("--executor", default="mock")
    p_run.add_argument("--profile", help="mock executor profile file")
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--targets", help="comma-separated subset of inventory names")
    p_run.add_argument("--max-parallel", type=int, default=4)
    p_run.add_argument("--timeout-s", type=float, default=1800.0)
    p_run.add_argument("--catalog", help="attribute catalog override file")
    p_run.add_argument("--run-id", help="fixed run id (defaults to a timestamped one)")
    p_run.set_defaults(func=cmd_run)

    p_rank = sub.add_parser("rank", help="rank stored targets under user weights")
    p_rank.add_argument("--weights", required=True, help="four comma-separated values in [0,5]")
    p_rank.add_argument("--method", choices=["native", "hybrid"], required=True)
    p_rank.add_argument("--mem", type=int, required=True, help="container size to rank at, MB")
    p_rank.add_argument("--repository", required=True)
    p_rank.add_argument("--catalog")
    p_rank.add_argument("--machine", action="store_true", help="emit target|score|rank lines")
    p_rank.set_defaults(func=cmd_rank)

    p_cmp = sub.add_parser("compare", help="compare a predicted rank table against timings")
    p_cmp.add_argument("--benchmark", required=True, help="rank file: target|rank or target|score|rank")
    p_cmp.add_argument("--empirical", required=True, help="timing file: target|seconds")
    p_cmp.add_argument("--csv", action="store_true", help="emit per-target CSV instead of the report")
    p_cmp.set_defaults(func=cmd_compare)

    p_imp = sub.add_parser("import", help="load external canonical benchmark files")
    p_imp.add_argument("--role", choices=["historic", "current"], required=True)
    p_imp.add_argument("--repository", required=True)
    p_imp.add_argument("file", help="canonical benchmark file to import")
    p_imp.add_argument("--catalog")
    p_imp.set_defaults(func=cmd_import)

    p_srv = sub.add_parser("serve", help="start the HTTP API")
    p_srv.add_argument("--config", required=True, help="key=value config file")
    p_srv.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        path = exc.filename or str(exc)
        print(f"error|FileNotFound|{path}: no such file", file=sys.stderr)
        return 2
    except _RUNTIME_ERRORS as exc:
        print(f"error|{exc.code}|{exc}", file=sys.stderr)
        return 1
    except BenchliteError as exc:
        print(f"error|{exc.code}|{exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error|OSError|{exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
