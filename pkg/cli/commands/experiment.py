"""
`experiment` subcommand.

Runs the full secured-link simulation and writes its outputs to ``--out``:
``experiment.json`` (the full result), ``sweep.csv`` (the energy row for the
configured key length), ``attack.csv`` when attack trials were requested and
``noise.csv`` for ``--noise-sweep``.
"""
from __future__ import annotations

from typing import List, Optional

import typer
from rich.console import Console
from rich.table import Table

from mcsec import experiment as harness
from mcsec.errors import IoError

from ..config import flag_help
from ..deps import EXIT_KEY_MISMATCH, command_scope


def _parse_probs(raw: str) -> List[float]:
    try:
        values = [float(part) for part in raw.split(",") if part.strip()]
    except ValueError as exc:
        raise typer.BadParameter(f"expected comma-separated probabilities, got {raw!r}") from exc
    if not values:
        raise typer.BadParameter("at least one arrival probability is required")
    return values


def cmd_experiment(
    ctx: typer.Context,
    n_bits: Optional[int] = typer.Option(None, "--n-bits", help=flag_help("Information bits N.", "n_bits")),
    frame_bits: Optional[int] = typer.Option(None, "--frame-bits", help=flag_help("Bits per frame.", "frame_bits")),
    rekey_every_frames: Optional[int] = typer.Option(None, "--rekey-every", help=flag_help("Frames per key.", "rekey_every_frames")),
    key_bits: Optional[int] = typer.Option(None, "--key-bits", help=flag_help("Key length K, a multiple of 8.", "key_bits")),
    z1: Optional[int] = typer.Option(None, "--z1", help=flag_help("Molecules released per bit-1 impulse.", "z1")),
    threshold: Optional[int] = typer.Option(None, "--threshold", help=flag_help("Detection threshold z in molecules.", "threshold")),
    arrival_prob: Optional[float] = typer.Option(None, "--arrival-prob", help=flag_help("Per-molecule arrival probability.", "arrival_prob")),
    background_rate: Optional[float] = typer.Option(None, "--background-rate", help=flag_help("Mean spurious molecules per slot.", "background_rate")),
    ebt: Optional[float] = typer.Option(None, "--ebt", help=flag_help("Energy per transmitted bit E_b^T.", "e_bit_tx")),
    attack_trials: Optional[int] = typer.Option(None, "--attack-trials", help=flag_help("Eavesdropper guesses per key.", "attack_trials")),
    plaintext: Optional[str] = typer.Option(None, "--plaintext", help=flag_help("Plaintext source: random, zeros or ones.", "plaintext")),
    seed: Optional[int] = typer.Option(None, "--seed", help=flag_help("Master seed.", "seed")),
    noise_sweep: Optional[str] = typer.Option(None, "--noise-sweep", help="Comma-separated arrival probabilities; writes noise.csv."),
) -> None:
    """Run the end-to-end secured transmission experiment."""
    with command_scope(ctx, "experiment") as scope:
        probs = _parse_probs(noise_sweep) if noise_sweep is not None else None
        cfg = scope.load(
            n_bits=n_bits,
            frame_bits=frame_bits,
            rekey_every_frames=rekey_every_frames,
            key_bits=key_bits,
            z1=z1,
            threshold=threshold,
            arrival_prob=arrival_prob,
            background_rate=background_rate,
            e_bit_tx=ebt,
            attack_trials=attack_trials,
            plaintext=plaintext,
            seed=seed,
        )
        config = cfg.experiment_config()
        result = harness.run_experiment(config)

        out = scope.out
        try:
            out.mkdir(parents=True, exist_ok=True)
            (out / "experiment.json").write_text(result.to_json() + "\n", encoding="utf-8")
        except OSError as exc:
            raise IoError(out / "experiment.json", exc.strerror or str(exc)) from exc
        harness.write_csv(
            harness.sweep_rows([(config.key_bits, result.energy)]),
            out / "sweep.csv",
            columns=harness.SWEEP_COLUMNS,
        )
        if result.attack_trials:
            stats = harness.AttackStats(
                k=config.key_bits, trials=result.attack_trials, successes=result.attack_successes
            )
            harness.write_csv(
                harness.attack_rows([stats]),
                out / "attack.csv",
                columns=harness.ATTACK_COLUMNS,
            )
        if probs is not None:
            harness.write_csv(
                harness.sweep_noise(config, probs), out / "noise.csv", columns=harness.NOISE_COLUMNS
            )

        table = Table(title="experiment summary")
        table.add_column("metric")
        table.add_column("value", justify="right")
        table.add_row("keys_generated", str(result.keys_generated))
        table.add_row("key_agreement_failures", str(result.key_agreement_failures))
        table.add_row("bit_errors", str(result.bit_errors))
        table.add_row("slots_used_key_exchange", str(result.slots_used_key_exchange))
        table.add_row("slots_transmitted_key_exchange", str(result.slots_transmitted_key_exchange))
        table.add_row("e_secure_total", repr(result.energy.e_secure_total))
        table.add_row("e_plain_total", repr(result.energy.e_plain_total))
        table.add_row("e_measured_secure", repr(result.energy.e_measured_secure))
        table.add_row("e_measured_key_exchange_total", repr(result.energy.e_measured_key_exchange_total))
        table.add_row("overhead_ratio", f"{result.energy.overhead_ratio:.6f}")
        if result.attack_trials:
            table.add_row("attack_success_rate", repr(result.attack_success_rate))
        Console().print(table)
        scope.details.update(
            keys_generated=result.keys_generated,
            key_agreement_failures=result.key_agreement_failures,
            bit_errors=result.bit_errors,
        )

        if result.key_agreement_failures:
            raise typer.Exit(EXIT_KEY_MISMATCH)
