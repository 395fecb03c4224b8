"""
Entrypoint for the ``mcsec`` command-line tool.

Creates the Typer app, installs the global options and registers the
subcommands.  Run it with ``python -m cli``.
"""
from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional

import typer
from rich.console import Console
from rich.logging import RichHandler

from .commands.attack import cmd_attack
from .commands.energy import cmd_energy
from .commands.exchange import cmd_exchange
from .commands.experiment import cmd_experiment
from .commands.send import cmd_send
from .deps import GlobalOptions


def configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def _main(
    ctx: typer.Context,
    seed: Optional[int] = typer.Option(None, "--seed", help="Master seed for every random stream."),
    out: Optional[Path] = typer.Option(None, "--out", help="Directory for result files and the run log (default: results)."),
    config: Optional[Path] = typer.Option(None, "--config", help="JSON document of configuration values, flat or with channel/energy sections; flags win over it."),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log per-round detail to stderr."),
) -> None:
    configure_logging(verbose)
    ctx.obj = GlobalOptions(seed=seed, out=out, config=config, verbose=verbose)


def create_app() -> typer.Typer:
    app = typer.Typer(
        name="mcsec",
        help="Secure molecular-communication link: key exchange, XOR cipher and energy accounting.",
        no_args_is_help=True,
        add_completion=False,
    )
    app.callback()(_main)
    app.command("exchange")(cmd_exchange)
    app.command("send")(cmd_send)
    app.command("energy")(cmd_energy)
    app.command("attack")(cmd_attack)
    app.command("experiment")(cmd_experiment)
    return app


app = create_app()


if __name__ == "__main__":
    app(prog_name="mcsec")
