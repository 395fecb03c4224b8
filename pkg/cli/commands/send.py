"""
`send` subcommand.

Exchanges a key, encrypts a UTF-8 message with it, transmits the ciphertext
with the peer silent, then demodulates and decrypts at the receiver.
"""
from __future__ import annotations

from typing import Optional

import numpy as np
import typer

from mcsec.channel import transmit
from mcsec.cipher import bits_to_bytes, bytes_to_bits, decrypt_stream, encrypt_stream, key_block_from
from mcsec.experiment import DATA_STREAM, KEY_STREAM
from mcsec.keyexchange import run_key_exchange
from mcsec.rng import derive_rng

from ..config import flag_help
from ..deps import EXIT_KEY_MISMATCH, command_scope


def cmd_send(
    ctx: typer.Context,
    message: str = typer.Option(..., "--message", "-m", help="Text to send."),
    key_bits: Optional[int] = typer.Option(None, "--key-bits", help=flag_help("Key length K in bits.", "key_bits")),
    z1: Optional[int] = typer.Option(None, "--z1", help=flag_help("Molecules released per bit-1 impulse.", "z1")),
    threshold: Optional[int] = typer.Option(None, "--threshold", help=flag_help("Detection threshold z in molecules.", "threshold")),
    arrival_prob: Optional[float] = typer.Option(None, "--arrival-prob", help=flag_help("Per-molecule arrival probability.", "arrival_prob")),
    background_rate: Optional[float] = typer.Option(None, "--background-rate", help=flag_help("Mean spurious molecules per slot.", "background_rate")),
    seed: Optional[int] = typer.Option(None, "--seed", help=flag_help("Master seed.", "seed")),
) -> None:
    """Send an encrypted message across the simulated link."""
    with command_scope(ctx, "send") as scope:
        cfg = scope.load(
            key_bits=key_bits,
            z1=z1,
            threshold=threshold,
            arrival_prob=arrival_prob,
            background_rate=background_rate,
            seed=seed,
        )
        params = cfg.channel_params()
        session = run_key_exchange(
            cfg.key_bits, cfg.policy, params, cfg.batch_size, derive_rng(cfg.seed, KEY_STREAM, 0)
        )
        plaintext = bytes_to_bits(message.encode("utf-8"))
        ciphertext = encrypt_stream(key_block_from(session.key_a), plaintext)
        _, _, demodulated = transmit(ciphertext, params, derive_rng(cfg.seed, DATA_STREAM, 0))
        recovered = decrypt_stream(key_block_from(session.key_c), demodulated)
        errors = int(np.count_nonzero(recovered != plaintext))

        typer.echo(f"ciphertext: {bits_to_bytes(ciphertext).hex()}")
        typer.echo(f"received: {bits_to_bytes(recovered).decode('utf-8', errors='replace')}")
        typer.echo(f"bit errors: {errors}")
        scope.details["bit_errors"] = errors

        if not session.succeeded:
            raise typer.Exit(EXIT_KEY_MISMATCH)
