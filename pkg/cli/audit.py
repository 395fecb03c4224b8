from __future__ import annotations

"""Append-only audit trail of CLI runs."""

import datetime as dt
import json
from pathlib import Path
from typing import Any

from .correlation import run_id_ctx

LOG_NAME = "runs.log"


def log_run(
    out_dir: Path,
    command: str,
    seed: int | None = None,
    outcome: str = "ok",
    exit_code: int = 0,
    **extra: Any,
) -> None:
    """Append one JSON line to ``<out_dir>/runs.log``.

    Parameters:
        out_dir: output directory of the run
        command: subcommand name (exchange, send, energy, attack, experiment)
        seed: master seed the run used, if any
        outcome: short result tag (ok, config_error, key_mismatch, ...)
        exit_code: process exit status
    """
    entry = {
        "timestamp": dt.datetime.now(dt.timezone.utc).isoformat(),
        "command": command,
        "seed": seed,
        "outcome": outcome,
        "exit_code": exit_code,
        "run_id": run_id_ctx.get(None),
        **extra,
    }
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        with (out_dir / LOG_NAME).open("a", encoding="utf-8") as f:
            f.write(json.dumps(entry, default=str) + "\n")
    except Exception:
        # Logging should never raise; ignore errors
        pass
