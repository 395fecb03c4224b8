"""
`attack` subcommand.

Monte Carlo eavesdropper: one fresh ideal-channel exchange, then ``trials``
uniform guesses at the key.  Exits 3 when the empirical success rate falls
outside the 3-sigma band around 2^-K.
"""
from __future__ import annotations

from typing import Optional

import typer

from mcsec.experiment import ATTACK_COLUMNS, attack_rows, attack_statistics, write_csv

from ..config import flag_help
from ..deps import EXIT_BAND, command_scope


def cmd_attack(
    ctx: typer.Context,
    k: Optional[int] = typer.Option(None, "--k", help=flag_help("Key length K.", "key_bits")),
    trials: int = typer.Option(100_000, "--trials", help="Independent full-key guesses."),
    seed: Optional[int] = typer.Option(None, "--seed", help=flag_help("Master seed.", "seed")),
) -> None:
    """Estimate the eavesdropper's full-key recovery rate."""
    with command_scope(ctx, "attack") as scope:
        cfg = scope.load(key_bits=k, seed=seed)
        stats = attack_statistics(cfg.key_bits, trials, cfg.seed)

        typer.echo(f"k: {stats.k}")
        typer.echo(f"trials: {stats.trials}")
        typer.echo(f"successes: {stats.successes}")
        typer.echo(f"empirical rate: {stats.rate!r}")
        typer.echo(f"expected rate: {stats.expected_rate!r}")
        typer.echo(f"3-sigma band: +/- {stats.band!r}")
        write_csv(attack_rows([stats]), scope.out / "attack.csv", columns=ATTACK_COLUMNS)
        scope.details["rate"] = stats.rate

        if not stats.within_band:
            typer.echo("empirical rate outside the 3-sigma band", err=True)
            raise typer.Exit(EXIT_BAND)
        typer.echo("within band")
