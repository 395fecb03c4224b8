"""
`exchange` subcommand.

Runs one simultaneous-transmission key exchange and prints the key, the
number of slots it took and the kept slot indexes.
"""
from __future__ import annotations

from pathlib import Path
from typing import Optional

import typer

from mcsec.experiment import KEY_STREAM, write_transcript
from mcsec.keyexchange import KeySourcePolicy, run_key_exchange
from mcsec.rng import derive_rng
from mcsec.schemas import bits_to_str

from ..config import flag_help
from ..deps import EXIT_KEY_MISMATCH, command_scope


def cmd_exchange(
    ctx: typer.Context,
    key_bits: Optional[int] = typer.Option(None, "--key-bits", help=flag_help("Key length K in bits.", "key_bits")),
    z1: Optional[int] = typer.Option(None, "--z1", help=flag_help("Molecules released per bit-1 impulse.", "z1")),
    threshold: Optional[int] = typer.Option(None, "--threshold", help=flag_help("Detection threshold z in molecules.", "threshold")),
    policy: Optional[KeySourcePolicy] = typer.Option(None, "--policy", help=flag_help("Whose bits form the key: a or c.", "policy")),
    batch_size: Optional[int] = typer.Option(None, "--batch-size", help=flag_help("Slots per exchange round.", "batch_size")),
    arrival_prob: Optional[float] = typer.Option(None, "--arrival-prob", help=flag_help("Per-molecule arrival probability.", "arrival_prob")),
    background_rate: Optional[float] = typer.Option(None, "--background-rate", help=flag_help("Mean spurious molecules per slot.", "background_rate")),
    seed: Optional[int] = typer.Option(None, "--seed", help=flag_help("Master seed.", "seed")),
    transcript_out: Optional[Path] = typer.Option(None, "--transcript-out", help="Write the slot transcript as CSV to this path."),
) -> None:
    """Exchange a secret key over the simulated channel."""
    with command_scope(ctx, "exchange") as scope:
        cfg = scope.load(
            key_bits=key_bits,
            z1=z1,
            threshold=threshold,
            policy=policy,
            batch_size=batch_size,
            arrival_prob=arrival_prob,
            background_rate=background_rate,
            seed=seed,
            transcript_out=transcript_out,
        )
        session = run_key_exchange(
            cfg.key_bits,
            cfg.policy,
            cfg.channel_params(),
            cfg.batch_size,
            derive_rng(cfg.seed, KEY_STREAM, 0),
        )
        typer.echo(f"key: {bits_to_str(session.key_a)}")
        if not session.succeeded:
            typer.echo(f"key (C): {bits_to_str(session.key_c)}")
        typer.echo(f"slots used: {session.slots_used}")
        typer.echo(f"slots transmitted: {session.slots_transmitted}")
        typer.echo(f"kept indexes: {session.kept_indexes.tolist()}")
        typer.echo(f"status: {session.status.value}")
        scope.details["slots_used"] = session.slots_used

        if cfg.transcript_out is not None:
            write_transcript(session, cfg.transcript_out)
            typer.echo(f"transcript written to {cfg.transcript_out}")

        if not session.succeeded:
            raise typer.Exit(EXIT_KEY_MISMATCH)
