"""
Slotted, memoryless on-off-keyed molecular channel.

A bit 1 is an impulse of ``z1`` molecules released at the start of the slot,
a bit 0 releases nothing.  Simultaneous transmitters superpose: the channel
carries the sum of what every party released.  A receiver counts the
molecules arriving within the slot and compares the count with the threshold
``z``.  The count is exact under the default (ideal) knobs; ``arrival_prob``
thins it binomially and ``background_rate`` adds Poisson-distributed
spurious molecules.

Every function is pure apart from the explicit ``rng`` argument.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
import numpy.typing as npt
from pydantic import Field, model_validator

from .config import DEFAULTS
from .errors import EmptyInput, LengthMismatch
from .schemas import Bits, Schema, as_bits

Emission = npt.NDArray[np.int64]


class ChannelParams(Schema):
    """Slot-level parameters shared by every party on the link."""

    z1: int = Field(default=DEFAULTS.z1, ge=1)
    threshold: int = Field(default=DEFAULTS.threshold, ge=1)
    arrival_prob: float = Field(default=DEFAULTS.arrival_prob, gt=0.0, le=1.0)
    background_rate: float = Field(default=DEFAULTS.background_rate, ge=0.0)

    @model_validator(mode="after")
    def _threshold_within_impulse(self) -> "ChannelParams":
        # a clean bit-1 impulse must decode as 1 on the ideal channel
        if self.threshold > self.z1:
            raise ValueError(
                f"threshold ({self.threshold}) must not exceed z1 ({self.z1})"
            )
        return self

    @property
    def is_ideal(self) -> bool:
        return self.arrival_prob == 1.0 and self.background_rate == 0.0


@dataclass(frozen=True, slots=True)
class SlotRecord:
    """Ground truth for one slot of a simultaneous exchange.

    ``observed`` is party A's count; C and the eavesdropper draw their own.
    """

    emitted_a: int
    emitted_c: int
    channel_sum: int
    observed: int
    observed_c: int
    observed_eve: int

    def __post_init__(self) -> None:
        if self.channel_sum != self.emitted_a + self.emitted_c:
            raise ValueError("channel_sum must equal emitted_a + emitted_c")


def modulate(bits: str | Sequence[int] | np.ndarray, params: ChannelParams) -> Emission:
    """Map bits to per-slot molecule releases (``z1`` for 1, nothing for 0)."""
    arr = as_bits(bits)
    if arr.size == 0:
        raise EmptyInput("cannot modulate an empty bit sequence")
    return arr.astype(np.int64) * params.z1


def superpose(a: Sequence[int] | np.ndarray, c: Sequence[int] | np.ndarray) -> Emission:
    a_arr = np.asarray(a, dtype=np.int64)
    c_arr = np.asarray(c, dtype=np.int64)
    if a_arr.shape != c_arr.shape:
        raise LengthMismatch(f"emissions differ in length: {a_arr.size} vs {c_arr.size}")
    return a_arr + c_arr


def observe(channel_sum: int, params: ChannelParams, rng: np.random.Generator) -> int:
    """Count the molecules a receiver picks up from one slot."""
    if params.is_ideal:
        return int(channel_sum)
    count = int(channel_sum)
    if params.arrival_prob < 1.0:
        count = int(rng.binomial(count, params.arrival_prob))
    if params.background_rate > 0.0:
        count += int(rng.poisson(params.background_rate))
    return count


def observe_counts(
    channel_sums: Sequence[int] | np.ndarray,
    params: ChannelParams,
    rng: np.random.Generator,
) -> npt.NDArray[np.int64]:
    """Vectorised :func:`observe`; consumes no randomness on the ideal channel."""
    sums = np.asarray(channel_sums, dtype=np.int64)
    if params.is_ideal:
        return sums.copy()
    counts = sums
    if params.arrival_prob < 1.0:
        counts = rng.binomial(sums, params.arrival_prob).astype(np.int64)
    if params.background_rate > 0.0:
        counts = counts + rng.poisson(params.background_rate, size=sums.shape)
    return counts


def demodulate(observed: int, params: ChannelParams) -> int:
    return 0 if observed < params.threshold else 1


def demodulate_counts(observed: Sequence[int] | np.ndarray, params: ChannelParams) -> Bits:
    return (np.asarray(observed) >= params.threshold).astype(np.uint8)


def decode_peer_bit(observed_total: int, own_emission: int, params: ChannelParams) -> int:
    """Cancel the party's own release and demodulate what is left.

    The subtraction saturates at zero so a noisy undercount never goes
    negative.
    """
    return demodulate(max(int(observed_total) - int(own_emission), 0), params)


def decode_peer_bits(
    observed_total: Sequence[int] | np.ndarray,
    own_emission: Sequence[int] | np.ndarray,
    params: ChannelParams,
) -> Bits:
    residual = np.asarray(observed_total, dtype=np.int64) - np.asarray(own_emission, dtype=np.int64)
    return demodulate_counts(np.maximum(residual, 0), params)


def transmit(
    bits: str | Sequence[int] | np.ndarray,
    params: ChannelParams,
    rng: np.random.Generator,
) -> Tuple[Emission, npt.NDArray[np.int64], Bits]:
    """Send ``bits`` with a single active transmitter (the peer stays silent).

    Returns the emission, the receiver's counts and the demodulated bits.
    """
    emission = modulate(bits, params)
    observed = observe_counts(emission, params, rng)
    return emission, observed, demodulate_counts(observed, params)


def slot_records(
    emitted_a: np.ndarray,
    emitted_c: np.ndarray,
    observed_a: np.ndarray,
    observed_c: np.ndarray,
    observed_eve: np.ndarray,
) -> List[SlotRecord]:
    sums = superpose(emitted_a, emitted_c)
    return [
        SlotRecord(int(ea), int(ec), int(s), int(oa), int(oc), int(oe))
        for ea, ec, s, oa, oc, oe in zip(
            emitted_a.tolist(),
            emitted_c.tolist(),
            sums.tolist(),
            observed_a.tolist(),
            observed_c.tolist(),
            observed_eve.tolist(),
        )
    ]
