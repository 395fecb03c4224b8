"""
Shared plumbing for subcommands.

Includes the global options object stored on the Typer context, config
loading that honours those options, and :func:`command_scope`, which runs a
command body under a run id, turns library exceptions into exit codes and
records the outcome in the audit log.
"""
from __future__ import annotations

import logging
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterator, Optional

import click
import typer

from mcsec.errors import KeyMismatch, McsecError

from .audit import log_run
from .config import CliConfig, ConfigDocumentError, load_cli_config
from .correlation import run_scope

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_USAGE = 2
EXIT_BAND = 3
EXIT_KEY_MISMATCH = 4

_OUTCOMES = {
    EXIT_OK: "ok",
    EXIT_CONFIG: "config_error",
    EXIT_USAGE: "usage_error",
    EXIT_BAND: "band_failure",
    EXIT_KEY_MISMATCH: "key_mismatch",
}


@dataclass
class GlobalOptions:
    seed: Optional[int] = None
    out: Optional[Path] = None
    config: Optional[Path] = None
    verbose: bool = False


@dataclass
class CommandScope:
    ctx: typer.Context
    command: str
    out: Path = Path("results")
    seed: Optional[int] = None
    details: dict = field(default_factory=dict)

    @property
    def options(self) -> GlobalOptions:
        return self.ctx.find_object(GlobalOptions) or GlobalOptions()

    def load(self, **flags: Any) -> CliConfig:
        """Resolve the command's config: flags, then global flags, then the document."""
        opts = self.options
        if flags.get("seed") is None:
            flags["seed"] = opts.seed
        flags.setdefault("out", opts.out)
        cfg = load_cli_config(opts.config, **flags)
        self.out = cfg.out
        self.seed = cfg.seed
        return cfg


@contextmanager
def command_scope(ctx: typer.Context, command: str) -> Iterator[CommandScope]:
    scope = CommandScope(ctx=ctx, command=command)
    if scope.options.out is not None:
        scope.out = scope.options.out
    code = EXIT_OK
    with run_scope():
        try:
            yield scope
        except typer.Exit as exc:
            code = exc.exit_code
            raise
        except click.UsageError:
            code = EXIT_USAGE
            raise
        except ConfigDocumentError as exc:
            code = EXIT_USAGE
            typer.echo(f"error: {exc}", err=True)
            raise typer.Exit(code) from exc
        except KeyMismatch as exc:
            code = EXIT_KEY_MISMATCH
            typer.echo(f"error: {exc}", err=True)
            raise typer.Exit(code) from exc
        except McsecError as exc:
            code = EXIT_CONFIG
            typer.echo(f"error: {exc}", err=True)
            raise typer.Exit(code) from exc
        except Exception:
            code = -1
            raise
        finally:
            logger.debug("%s finished with exit code %d", command, code)
            log_run(
                scope.out,
                command,
                seed=scope.seed,
                outcome=_OUTCOMES.get(code, "error"),
                exit_code=code,
                **scope.details,
            )
