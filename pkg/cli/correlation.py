"""
Run identifiers for correlating audit entries.

Each CLI command executes inside :func:`run_scope`, which stores a fresh
UUID in a context variable.  Audit lines written while the command runs pick
the value up so every entry of one run carries the same id.
"""
from __future__ import annotations

import contextvars
import uuid
from contextlib import contextmanager
from typing import Iterator

# Context variable to hold the current run ID
run_id_ctx: contextvars.ContextVar[str | None] = contextvars.ContextVar(
    "run_id", default=None
)


@contextmanager
def run_scope() -> Iterator[str]:
    rid = uuid.uuid4().hex
    token = run_id_ctx.set(rid)
    try:
        yield rid
    finally:
        # Restore the previous value so nested or sequential runs don't leak ids
        run_id_ctx.reset(token)
