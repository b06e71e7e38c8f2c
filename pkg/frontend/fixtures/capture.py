"""Regenerate the UI/CLI agreement fixtures from a real seeded backend.

Builds a deterministic store (seed 42, fixed run id), then saves the exact
/api/rankings response bytes and the `rank --machine` stdout for weights
{g1: 4, g2: 3, g3: 5, g4: 0} at 100 MB. Run from the repository root:

    python3 frontend/fixtures/capture.py
"""

from __future__ import annotations

import contextlib
import io
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from benchlite.cli import main
from benchlite.service import ApiConfig, create_app

HERE = Path(__file__).resolve().parent
PKG = HERE.parent.parent
FIXTURES = PKG / "tests" / "fixtures"

WEIGHTS_FLAG = "4,3,5,0"
WEIGHTS_BODY = {"g1": 4, "g2": 3, "g3": 5, "g4": 0}


def build_store(store: Path) -> None:
    code = main(
        [
            "run",
            "--mem", "100",
            "--cores", "1",
            "--inventory", str(FIXTURES / "inventory.txt"),
            "--profile", str(FIXTURES / "mock_profile.txt"),
            "--repository", str(store),
            "--seed", "42",
            "--run-id", "agree-42",
        ]
    )
    assert code == 0, "seed run failed"


def capture(store: Path) -> tuple[bytes, str]:
    config = ApiConfig(
        repository=store,
        inventory=FIXTURES / "inventory.txt",
        profile=FIXTURES / "mock_profile.txt",
        seed=42,
    )
    client = TestClient(create_app(config))
    response = client.post(
        "/api/rankings",
        json={"weights": WEIGHTS_BODY, "method": "native", "mem_mb": 100},
    )
    assert response.status_code == 200, response.text

    out = io.StringIO()
    with contextlib.redirect_stdout(out):
        code = main(
            [
                "rank",
                "--weights", WEIGHTS_FLAG,
                "--method", "native",
                "--mem", "100",
                "--repository", str(store),
                "--machine",
            ]
        )
    assert code == 0, "rank failed"
    return response.content, out.getvalue()


def run() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        store = Path(tmp) / "agreement.blt"
        build_store(store)
        body, cli = capture(store)
    (HERE / "ranking_4350.json").write_bytes(body)
    (HERE / "cli_rank_4350.txt").write_text(cli, encoding="utf-8")
    print(f"wrote {HERE / 'ranking_4350.json'} ({len(body)} bytes)")
    print(f"wrote {HERE / 'cli_rank_4350.txt'} ({len(cli.splitlines())} lines)")


if __name__ == "__main__":
    run()
