"""
Energy accounting for secured versus plain transmission.

Analytic model (molecules are the native unit)::

    E_K   = 2 * K * E_b^T                 one key exchange
    E_C   = 2 * N * E_b^C                 encrypt + decrypt
    E_T^S = N * E_b^T + M * E_K + E_C     secured total
    E_T^0 = N * E_b^T                     plain total

With E_b^C = 0.001 * E_b^T the secured total reduces to
``(1.002 * N + 2 * K * M) * E_b^T``.

Measured values come from simulation transcripts: the molecules the parties
actually released, converted with ``cost_per_molecule``.
"""
from __future__ import annotations

import math
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
from pydantic import Field, computed_field, model_validator

from .channel import SlotRecord
from .config import DEFAULTS
from .errors import ConfigError
from .schemas import Schema

REPORT_COLUMNS = [
    "n_bits",
    "key_bits",
    "rekey_count",
    "e_key_exchange",
    "e_compute",
    "e_secure_total",
    "e_plain_total",
    "e_measured_secure",
    "overhead_ratio",
]


class EnergyParams(Schema):
    e_bit_tx: float = Field(default=DEFAULTS.e_bit_tx, gt=0.0)
    e_bit_compute: Optional[float] = Field(default=None, ge=0.0)

    @model_validator(mode="before")
    @classmethod
    def _default_compute_cost(cls, data):
        if isinstance(data, dict) and data.get("e_bit_compute") is None:
            e_tx = data.get("e_bit_tx", DEFAULTS.e_bit_tx)
            if isinstance(e_tx, (int, float)):
                data = {**data, "e_bit_compute": DEFAULTS.compute_ratio * e_tx}
        return data

    @model_validator(mode="after")
    def _compute_below_transmit(self) -> "EnergyParams":
        if self.e_bit_compute is not None and self.e_bit_compute > self.e_bit_tx:
            raise ValueError("e_bit_compute must not exceed e_bit_tx")
        return self

    @property
    def compute_cost(self) -> float:
        return float(self.e_bit_compute or 0.0)


class EnergyReport(Schema):
    n_bits: int = Field(ge=1)
    key_bits: int = Field(ge=1)
    rekey_count: int = Field(ge=1)
    e_key_exchange: float = Field(ge=0.0)
    e_compute: float = Field(ge=0.0)
    e_secure_total: float = Field(ge=0.0)
    e_plain_total: float = Field(ge=0.0)
    # simulation-side numbers; None for purely analytic reports
    e_measured_secure: Optional[float] = None
    e_measured_key_exchange_total: Optional[float] = None

    @model_validator(mode="after")
    def _decomposes(self) -> "EnergyReport":
        expected = self.e_plain_total + self.rekey_count * self.e_key_exchange + self.e_compute
        if not math.isclose(self.e_secure_total, expected, rel_tol=1e-9, abs_tol=1e-9):
            raise ValueError(
                "e_secure_total must equal e_plain_total + rekey_count * e_key_exchange + e_compute"
            )
        if self.e_secure_total < self.e_plain_total:
            raise ValueError("secured energy cannot be below plain energy")
        return self

    @computed_field  # type: ignore[prop-decorator]
    @property
    def overhead_ratio(self) -> float:
        return self.e_secure_total / self.e_plain_total

    def to_row(self) -> dict:
        data = self.model_dump()
        return {col: data[col] for col in REPORT_COLUMNS}


def _require_positive(**counts: int) -> None:
    for name, value in counts.items():
        if value < 1:
            raise ConfigError(f"{name} must be >= 1, got {value}")


def key_exchange_energy(key_bits: int, params: EnergyParams) -> float:
    _require_positive(key_bits=key_bits)
    return 2.0 * key_bits * params.e_bit_tx


def compute_energy(n_bits: int, params: EnergyParams) -> float:
    _require_positive(n_bits=n_bits)
    return 2.0 * n_bits * params.compute_cost


def plain_total_energy(n_bits: int, params: EnergyParams) -> float:
    _require_positive(n_bits=n_bits)
    return n_bits * params.e_bit_tx


def secure_total_energy(n_bits: int, key_bits: int, rekey_count: int, params: EnergyParams) -> float:
    _require_positive(n_bits=n_bits, key_bits=key_bits, rekey_count=rekey_count)
    return (
        plain_total_energy(n_bits, params)
        + rekey_count * key_exchange_energy(key_bits, params)
        + compute_energy(n_bits, params)
    )


def secure_total_energy_reduced(n_bits: int, key_bits: int, rekey_count: int, params: EnergyParams) -> float:
    """Closed form ``(1.002 N + 2 K M) E_b^T``; only valid at the 1/1000 compute ratio."""
    _require_positive(n_bits=n_bits, key_bits=key_bits, rekey_count=rekey_count)
    return (1.002 * n_bits + 2.0 * key_bits * rekey_count) * params.e_bit_tx


def overhead_ratio(n_bits: int, key_bits: int, rekey_count: int, params: EnergyParams) -> float:
    return secure_total_energy(n_bits, key_bits, rekey_count, params) / plain_total_energy(n_bits, params)


def key_exchange_molecules(transcript: Sequence[SlotRecord]) -> Tuple[int, int]:
    """Molecules released by A and by C over one exchange."""
    released_a = sum(r.emitted_a for r in transcript)
    released_c = sum(r.emitted_c for r in transcript)
    return released_a, released_c


def data_molecules(emissions: Iterable[np.ndarray]) -> int:
    return int(sum(int(np.asarray(e, dtype=np.int64).sum()) for e in emissions))


def measured_energy(
    key_transcripts: Iterable[Sequence[SlotRecord]],
    data_emissions: Iterable[np.ndarray],
    cost_per_molecule: float = 1.0,
    *,
    per_party: bool = False,
) -> float:
    """Molecules released during key exchange plus data slots, times the cost.

    With ``per_party`` the key-exchange molecules are split evenly between
    A and C, which is what one party pays in the secured total.
    """
    if cost_per_molecule <= 0:
        raise ConfigError(f"cost_per_molecule must be > 0, got {cost_per_molecule}")
    key_total = sum(sum(key_exchange_molecules(t)) for t in key_transcripts)
    if per_party:
        key_total /= 2.0
    return (key_total + data_molecules(data_emissions)) * cost_per_molecule


def build_report(
    n_bits: int,
    key_bits: int,
    rekey_count: int,
    params: EnergyParams,
    *,
    measured_secure: Optional[float] = None,
    measured_key_exchange_total: Optional[float] = None,
) -> EnergyReport:
    return EnergyReport(
        n_bits=n_bits,
        key_bits=key_bits,
        rekey_count=rekey_count,
        e_key_exchange=key_exchange_energy(key_bits, params),
        e_compute=compute_energy(n_bits, params),
        e_secure_total=secure_total_energy(n_bits, key_bits, rekey_count, params),
        e_plain_total=plain_total_energy(n_bits, params),
        e_measured_secure=measured_secure,
        e_measured_key_exchange_total=measured_key_exchange_total,
    )
