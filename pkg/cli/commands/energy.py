"""
`energy` subcommand.

Prints the analytic energy report for one (N, K, M) point, or with
``--sweep`` the secured/plain energy table over several key lengths.
"""
from __future__ import annotations

import math
from typing import List, Optional

import typer
from rich.console import Console
from rich.table import Table

from mcsec.energy import build_report
from mcsec.errors import ConfigError
from mcsec.experiment import SWEEP_COLUMNS, sweep_key_length, sweep_rows, write_csv

from ..config import flag_help
from ..deps import command_scope


def _parse_key_lengths(raw: str) -> List[int]:
    try:
        values = [int(part) for part in raw.split(",") if part.strip()]
    except ValueError as exc:
        raise typer.BadParameter(f"expected comma-separated integers, got {raw!r}") from exc
    if not values:
        raise typer.BadParameter("at least one key length is required")
    return values


def cmd_energy(
    ctx: typer.Context,
    n: Optional[int] = typer.Option(None, "--n", help=flag_help("Information bits N.", "n_bits")),
    k: Optional[int] = typer.Option(None, "--k", help=flag_help("Key length K.", "key_bits")),
    m: Optional[int] = typer.Option(None, "--m", help="Key generations M (default: derived from frames and rekey interval, 2 for the reference layout)."),
    ebt: Optional[float] = typer.Option(None, "--ebt", help=flag_help("Energy per transmitted bit E_b^T.", "e_bit_tx")),
    ebc: Optional[float] = typer.Option(None, "--ebc", help="Energy per one-bit logical operation E_b^C (default: 0.001 x E_b^T)."),
    sweep: Optional[str] = typer.Option(None, "--sweep", help="Comma-separated key lengths, e.g. 8,16,32; prints the energy-vs-K CSV."),
    simulate: bool = typer.Option(False, "--simulate", help="With --sweep, also run the simulation to fill the measured column."),
) -> None:
    """Energy of secured versus plain transmission."""
    with command_scope(ctx, "energy") as scope:
        key_lengths = _parse_key_lengths(sweep) if sweep is not None else None
        cfg = scope.load(n_bits=n, key_bits=k, e_bit_tx=ebt, e_bit_compute=ebc)
        params = cfg.energy_params()
        if m is None and min(cfg.frame_bits, cfg.rekey_every_frames) < 1:
            raise ConfigError("frame_bits and rekey_every_frames must be >= 1")
        rekey_count = m if m is not None else math.ceil(cfg.n_bits / cfg.frame_bits / cfg.rekey_every_frames)

        if key_lengths is None:
            report = build_report(cfg.n_bits, cfg.key_bits, rekey_count, params)
            table = Table(title="energy report")
            table.add_column("field")
            table.add_column("value", justify="right")
            for name, value in report.to_row().items():
                table.add_row(name, "" if value is None else repr(value))
            Console().print(table)
            return

        if simulate:
            base = cfg.experiment_config()
            points = sweep_key_length(base, key_lengths)
        else:
            points = [(kb, build_report(cfg.n_bits, kb, rekey_count, params)) for kb in key_lengths]
        rows = sweep_rows(points)
        path = scope.out / "sweep.csv"
        write_csv(rows, path, columns=SWEEP_COLUMNS)
        typer.echo(path.read_text(encoding="utf-8"), nl=False)
