"""
End-to-end secured-link simulation.

A run splits ``n_bits`` of plaintext into frames, exchanges a fresh key every
``rekey_every_frames`` frames, encrypts each frame, sends it over the
channel with the peer silent, demodulates and decrypts it at the receiver,
and tallies bit errors.  Energy is reported both analytically and from the
molecules actually released.  Optionally the eavesdropper takes
``attack_trials`` guesses at every key.

Every random stream is derived from ``(seed, stream, index)`` so runs are
reproducible and independent of execution order.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Literal, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import Field, model_validator

from .channel import ChannelParams, transmit
from .cipher import BLOCK_BITS, decrypt_stream, encrypt_stream, key_block_from
from .config import DEFAULTS
from .energy import EnergyParams, EnergyReport, build_report, measured_energy
from .errors import ConfigError, EmptyInput, IoError
from .keyexchange import (
    KeySession,
    KeySourcePolicy,
    SessionStatus,
    attack_session,
    run_key_exchange,
)
from .rng import derive_rng
from .schemas import Schema

logger = logging.getLogger(__name__)

# stream identifiers for derive_rng(seed, stream, index)
KEY_STREAM = 0
DATA_STREAM = 1
ATTACK_STREAM = 2
PLAINTEXT_STREAM = 3

SWEEP_COLUMNS = ["k", "m", "n", "e_secure_analytic", "e_secure_measured", "e_plain", "overhead_ratio"]
ATTACK_COLUMNS = ["k", "trials", "successes", "rate", "expected_rate"]
NOISE_COLUMNS = ["arrival_prob", "key_agreement_failures", "bit_errors", "ber"]

PlaintextKind = Literal["random", "zeros", "ones"]


class ExperimentConfig(Schema):
    n_bits: int = Field(default=DEFAULTS.n_bits, ge=1)
    frame_bits: int = Field(default=DEFAULTS.frame_bits, ge=1)
    rekey_every_frames: int = Field(default=DEFAULTS.rekey_every_frames, ge=1)
    key_bits: int = Field(default=DEFAULTS.key_bits, ge=1)
    channel: ChannelParams = Field(default_factory=ChannelParams)
    energy: EnergyParams = Field(default_factory=EnergyParams)
    policy: KeySourcePolicy = KeySourcePolicy(DEFAULTS.policy)
    seed: int = Field(default=DEFAULTS.seed, ge=0)
    attack_trials: int = Field(default=DEFAULTS.attack_trials, ge=0)
    batch_size: int = Field(default=DEFAULTS.batch_size, ge=1)
    plaintext: PlaintextKind = "random"

    @model_validator(mode="after")
    def _frame_layout(self) -> "ExperimentConfig":
        if self.n_bits % self.frame_bits:
            raise ValueError(
                f"n_bits ({self.n_bits}) must be a multiple of frame_bits ({self.frame_bits})"
            )
        if self.frame_bits % BLOCK_BITS:
            raise ValueError(f"frame_bits ({self.frame_bits}) must be a multiple of {BLOCK_BITS}")
        if self.key_bits % BLOCK_BITS:
            raise ValueError(f"key_bits ({self.key_bits}) must be a multiple of {BLOCK_BITS}")
        return self

    @property
    def frames(self) -> int:
        return self.n_bits // self.frame_bits

    @property
    def rekey_count(self) -> int:
        return math.ceil(self.frames / self.rekey_every_frames)

    @property
    def cost_per_molecule(self) -> float:
        # equiprobable bits release z1/2 molecules per bit on average
        return self.energy.e_bit_tx / (self.channel.z1 / 2.0)


class ExperimentResult(Schema):
    keys_generated: int = Field(ge=1)
    key_agreement_failures: int = Field(ge=0)
    bit_errors: int = Field(ge=0)
    energy: EnergyReport
    attack_trials: int = Field(ge=0)
    attack_successes: int = Field(ge=0)
    attack_success_rate: float = Field(ge=0.0, le=1.0)
    slots_used_key_exchange: int = Field(ge=1)
    slots_transmitted_key_exchange: int = Field(ge=1)
    data_slots: int = Field(ge=0)

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)


@dataclass(frozen=True)
class AttackStats:
    k: int
    trials: int
    successes: int

    @property
    def rate(self) -> float:
        return self.successes / self.trials

    @property
    def expected_rate(self) -> float:
        return 2.0 ** -self.k

    @property
    def band(self) -> float:
        return binomial_band(self.expected_rate, self.trials)

    @property
    def within_band(self) -> bool:
        return abs(self.rate - self.expected_rate) <= self.band

    def to_row(self) -> dict:
        return {
            "k": self.k,
            "trials": self.trials,
            "successes": self.successes,
            "rate": self.rate,
            "expected_rate": self.expected_rate,
        }


def binomial_band(p: float, trials: int, sigmas: float = 3.0) -> float:
    """Half-width of the ``sigmas``-sigma band for a Bernoulli(p) success rate."""
    if trials < 1:
        raise ConfigError(f"trials must be >= 1, got {trials}")
    return sigmas * math.sqrt(p * (1.0 - p) / trials)


def _coerce(config: Union[ExperimentConfig, Mapping]) -> ExperimentConfig:
    if isinstance(config, ExperimentConfig):
        return config
    return ExperimentConfig.build(**dict(config))


def _plaintext(cfg: ExperimentConfig) -> np.ndarray:
    if cfg.plaintext == "zeros":
        return np.zeros(cfg.n_bits, dtype=np.uint8)
    if cfg.plaintext == "ones":
        return np.ones(cfg.n_bits, dtype=np.uint8)
    rng = derive_rng(cfg.seed, PLAINTEXT_STREAM)
    return rng.integers(0, 2, size=cfg.n_bits, dtype=np.uint8)


def run_experiment(config: Union[ExperimentConfig, Mapping]) -> ExperimentResult:
    cfg = _coerce(config)
    plaintext = _plaintext(cfg)
    frames = plaintext.reshape(cfg.frames, cfg.frame_bits)

    sessions: List[KeySession] = []
    emissions: List[np.ndarray] = []
    failures = bit_errors = attack_successes = 0

    for epoch in range(cfg.rekey_count):
        session = run_key_exchange(
            cfg.key_bits,
            cfg.policy,
            cfg.channel,
            cfg.batch_size,
            derive_rng(cfg.seed, KEY_STREAM, epoch),
        )
        sessions.append(session)
        if session.status is SessionStatus.KEY_MISMATCH:
            failures += 1
        tx_key = key_block_from(session.key_a)
        rx_key = key_block_from(session.key_c)

        data_rng = derive_rng(cfg.seed, DATA_STREAM, epoch)
        first = epoch * cfg.rekey_every_frames
        for frame in frames[first:first + cfg.rekey_every_frames]:
            ciphertext = encrypt_stream(tx_key, frame)
            emission, _, demodulated = transmit(ciphertext, cfg.channel, data_rng)
            emissions.append(emission)
            recovered = decrypt_stream(rx_key, demodulated)
            bit_errors += int(np.count_nonzero(recovered != frame))

        if cfg.attack_trials and session.succeeded:
            attack_successes += attack_session(
                session, cfg.channel, cfg.attack_trials, derive_rng(cfg.seed, ATTACK_STREAM, epoch)
            )
        logger.debug("epoch %d: %d key slots, status %s", epoch, session.slots_used, session.status.value)

    cost = cfg.cost_per_molecule
    key_transcripts = [s.key_transcript for s in sessions]
    analytic = build_report(cfg.n_bits, cfg.key_bits, cfg.rekey_count, cfg.energy)
    report = build_report(
        cfg.n_bits,
        cfg.key_bits,
        cfg.rekey_count,
        cfg.energy,
        measured_secure=measured_energy(key_transcripts, emissions, cost, per_party=True)
        + analytic.e_compute,
        measured_key_exchange_total=measured_energy(key_transcripts, [], cost),
    )

    attempts = cfg.attack_trials * sum(1 for s in sessions if s.succeeded)
    result = ExperimentResult(
        keys_generated=len(sessions),
        key_agreement_failures=failures,
        bit_errors=bit_errors,
        energy=report,
        attack_trials=attempts,
        attack_successes=attack_successes,
        attack_success_rate=attack_successes / attempts if attempts else 0.0,
        slots_used_key_exchange=sum(s.slots_used for s in sessions),
        slots_transmitted_key_exchange=sum(s.slots_transmitted for s in sessions),
        data_slots=int(sum(e.size for e in emissions)),
    )
    if failures:
        logger.warning("%d of %d key exchanges ended in a key mismatch", failures, len(sessions))
    logger.info(
        "experiment seed=%d: %d keys, %d bit errors, overhead %.6f",
        cfg.seed, result.keys_generated, bit_errors, report.overhead_ratio,
    )
    return result


def _with(base: ExperimentConfig, **changes) -> ExperimentConfig:
    data = base.model_dump()
    for section in ("channel", "energy"):
        if section in changes and isinstance(changes[section], Mapping):
            changes[section] = {**data[section], **changes[section]}
    return ExperimentConfig.build(**{**data, **changes})


def sweep_key_length(
    base: ExperimentConfig,
    key_lengths: Sequence[int],
    max_workers: Optional[int] = None,
) -> List[Tuple[int, EnergyReport]]:
    """One run per key length; the plain-energy column is the same for every K."""
    if not key_lengths:
        raise EmptyInput("key_lengths must not be empty")
    configs = [_with(base, key_bits=int(k)) for k in key_lengths]
    if max_workers and max_workers > 1:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(run_experiment, configs))
    else:
        results = [run_experiment(c) for c in configs]
    return [(c.key_bits, r.energy) for c, r in zip(configs, results)]


def sweep_rows(sweep: Iterable[Tuple[int, EnergyReport]]) -> List[dict]:
    return [
        {
            "k": k,
            "m": report.rekey_count,
            "n": report.n_bits,
            "e_secure_analytic": report.e_secure_total,
            "e_secure_measured": report.e_measured_secure,
            "e_plain": report.e_plain_total,
            "overhead_ratio": report.overhead_ratio,
        }
        for k, report in sweep
    ]


def sweep_noise(base: ExperimentConfig, arrival_probs: Sequence[float]) -> List[dict]:
    """Key-agreement failures and data bit errors as the arrival probability drops."""
    if not arrival_probs:
        raise EmptyInput("arrival_probs must not be empty")
    rows = []
    for p in arrival_probs:
        result = run_experiment(_with(base, channel={"arrival_prob": float(p)}))
        rows.append(
            {
                "arrival_prob": float(p),
                "key_agreement_failures": result.key_agreement_failures,
                "bit_errors": result.bit_errors,
                "ber": result.bit_errors / base.n_bits,
            }
        )
    return rows


def attack_statistics(
    key_bits: int,
    trials: int,
    seed: int,
    params: Optional[ChannelParams] = None,
) -> AttackStats:
    if key_bits < 1:
        raise ConfigError(f"key_bits must be >= 1, got {key_bits}")
    if trials < 1:
        raise ConfigError(f"trials must be >= 1, got {trials}")
    params = params or ChannelParams()
    session = run_key_exchange(
        key_bits, KeySourcePolicy.PARTY_C, params, DEFAULTS.batch_size, derive_rng(seed, KEY_STREAM, 0)
    )
    successes = attack_session(session, params, trials, derive_rng(seed, ATTACK_STREAM, 0))
    return AttackStats(k=key_bits, trials=trials, successes=successes)


def attack_rows(stats: Iterable[AttackStats]) -> List[dict]:
    return [s.to_row() for s in stats]


def monte_carlo_attack(key_bits: int, trials: int, seed: int) -> float:
    """Fraction of uniform full-key guesses that recover a fresh ideal-channel key."""
    return attack_statistics(key_bits, trials, seed).rate


def write_csv(
    rows: Union[pd.DataFrame, Iterable[Mapping]],
    path: Union[str, Path],
    columns: Optional[Sequence[str]] = None,
) -> None:
    """Header row plus data rows, UTF-8, ``\\n`` line endings, full float precision."""
    path = Path(path)
    frame = rows if isinstance(rows, pd.DataFrame) else pd.DataFrame(list(rows), columns=columns)
    if columns is not None:
        frame = frame.reindex(columns=list(columns))
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, encoding="utf-8", lineterminator="\n")
    except OSError as exc:
        raise IoError(path, exc.strerror or str(exc)) from exc


def write_transcript(session: KeySession, path: Union[str, Path]) -> None:
    write_csv(session.transcript_frame(), path)
