"""
Secret-key exchange over the superposed molecular channel.

Both parties transmit random bits in the same slots and listen while they
transmit.  Each knows what it released, so subtracting its own impulse from
the count reveals the peer's bit.  Slots where both sent the same value are
discarded; on the remaining slots exactly one party sent a 1, the channel
carries exactly ``z1`` molecules, and an eavesdropper who only sees the sum
cannot tell which party it was.  A prior agreement (the key-source policy)
says whose bits on the kept slots form the key.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Sequence, Tuple

import numpy as np
import numpy.typing as npt
import pandas as pd

from .channel import (
    ChannelParams,
    SlotRecord,
    decode_peer_bits,
    modulate,
    observe_counts,
    slot_records,
    superpose,
)
from .config import DEFAULTS
from .errors import ConfigError, EmptyInput, KeyMismatch, LengthMismatch, SiftViolation
from .schemas import Bits, as_bits

logger = logging.getLogger(__name__)

Indexes = npt.NDArray[np.int64]

TRANSCRIPT_COLUMNS = ["slot_index", "emitted_a", "emitted_c", "channel_sum", "kept"]


class KeySourcePolicy(str, Enum):
    """Whose transmitted bits on the kept slots become the key."""

    PARTY_A = "a"
    PARTY_C = "c"


class CaseLabel(str, Enum):
    BOTH_ZERO = "both_zero"
    BOTH_ONE = "both_one"
    AMBIGUOUS = "ambiguous"


class SessionStatus(str, Enum):
    PENDING = "pending"
    COMPLETE = "complete"
    KEY_MISMATCH = "key_mismatch"


def _empty_bits() -> Bits:
    return np.zeros(0, dtype=np.uint8)


def _empty_indexes() -> Indexes:
    return np.zeros(0, dtype=np.int64)


@dataclass
class KeySession:
    """State of one key exchange between parties A and C.

    ``kept_indexes`` is A's sifting view and ``kept_indexes_c`` is C's; on
    the ideal channel they are identical.
    """

    target_key_bits: int
    policy: KeySourcePolicy
    sent_a: Bits = field(default_factory=_empty_bits)
    sent_c: Bits = field(default_factory=_empty_bits)
    kept_indexes: Indexes = field(default_factory=_empty_indexes)
    kept_indexes_c: Indexes = field(default_factory=_empty_indexes)
    key_a: Bits = field(default_factory=_empty_bits)
    key_c: Bits = field(default_factory=_empty_bits)
    transcript: List[SlotRecord] = field(default_factory=list)
    status: SessionStatus = SessionStatus.PENDING
    rounds: int = 0

    @property
    def slots_used(self) -> int:
        """Slots up to and including the last kept key bit of either party.

        Surplus slots of the final round are recorded in the transcript but
        are not needed by the key; see :attr:`slots_transmitted`.
        """
        last = [int(ix[-1]) for ix in (self.kept_indexes, self.kept_indexes_c) if ix.size]
        return max(last) + 1 if last else 0

    @property
    def slots_transmitted(self) -> int:
        return len(self.transcript)

    @property
    def key_transcript(self) -> List[SlotRecord]:
        return self.transcript[: self.slots_used]

    @property
    def succeeded(self) -> bool:
        return self.status is SessionStatus.COMPLETE

    @property
    def key(self) -> Bits:
        """The agreed key; raises if the parties ended up disagreeing."""
        if self.status is SessionStatus.KEY_MISMATCH:
            raise KeyMismatch("parties hold different keys")
        return self.key_a

    def transcript_frame(self) -> pd.DataFrame:
        kept = np.zeros(self.slots_transmitted, dtype=np.int64)
        kept[self.kept_indexes] = 1
        return pd.DataFrame(
            {
                "slot_index": np.arange(self.slots_transmitted, dtype=np.int64),
                "emitted_a": [r.emitted_a for r in self.transcript],
                "emitted_c": [r.emitted_c for r in self.transcript],
                "channel_sum": [r.channel_sum for r in self.transcript],
                "kept": kept,
            },
            columns=TRANSCRIPT_COLUMNS,
        )


def random_bits(n: int, rng: np.random.Generator) -> Bits:
    if n < 1:
        raise EmptyInput("need at least one random bit")
    return np.asarray(rng.integers(0, 2, size=n, dtype=np.uint8), dtype=np.uint8)


def sift(
    sent_self: str | Sequence[int] | np.ndarray,
    decoded_peer: str | Sequence[int] | np.ndarray,
) -> Tuple[Indexes, Bits, Bits]:
    """Keep the slots where the two bit streams differ."""
    own = as_bits(sent_self)
    peer = as_bits(decoded_peer)
    if own.size != peer.size:
        raise LengthMismatch(f"cannot sift streams of length {own.size} and {peer.size}")
    kept = np.flatnonzero(own != peer).astype(np.int64)
    return kept, own[kept], peer[kept]


def extract_key(
    kept_a_bits: str | Sequence[int] | np.ndarray,
    kept_c_bits: str | Sequence[int] | np.ndarray,
    policy: KeySourcePolicy,
) -> Bits:
    a_bits = as_bits(kept_a_bits)
    c_bits = as_bits(kept_c_bits)
    if a_bits.size != c_bits.size:
        raise SiftViolation("kept bit sequences differ in length")
    if np.any(a_bits == c_bits):
        raise SiftViolation("kept slots must carry different bits from A and C")
    source = a_bits if KeySourcePolicy(policy) is KeySourcePolicy.PARTY_A else c_bits
    return source.copy()


def run_key_exchange(
    target_key_bits: int,
    policy: KeySourcePolicy,
    params: ChannelParams,
    batch_size: int = DEFAULTS.batch_size,
    rng: np.random.Generator | None = None,
) -> KeySession:
    """Exchange random slots in rounds until both parties hold ``target_key_bits`` kept bits.

    Surplus kept bits from the last round are dropped (earliest kept bits
    win); the transcript still records every slot.
    """
    if target_key_bits < 1:
        raise ConfigError(f"target_key_bits must be >= 1, got {target_key_bits}")
    if batch_size < 1:
        raise ConfigError(f"batch_size must be >= 1, got {batch_size}")
    if rng is None:
        raise ConfigError("run_key_exchange needs an explicit random stream")
    policy = KeySourcePolicy(policy)

    session = KeySession(target_key_bits=target_key_bits, policy=policy)
    sent_a: List[Bits] = []
    sent_c: List[Bits] = []
    peer_at_a: List[Bits] = []
    peer_at_c: List[Bits] = []
    kept_a: List[Indexes] = []
    kept_c: List[Indexes] = []
    n_kept_a = n_kept_c = 0
    offset = 0

    while min(n_kept_a, n_kept_c) < target_key_bits:
        bits_a = random_bits(batch_size, rng)
        bits_c = random_bits(batch_size, rng)
        emitted_a = modulate(bits_a, params)
        emitted_c = modulate(bits_c, params)
        sums = superpose(emitted_a, emitted_c)
        observed_a = observe_counts(sums, params, rng)
        observed_c = observe_counts(sums, params, rng)
        observed_eve = observe_counts(sums, params, rng)

        decoded_c = decode_peer_bits(observed_a, emitted_a, params)
        decoded_a = decode_peer_bits(observed_c, emitted_c, params)
        idx_a, _, _ = sift(bits_a, decoded_c)
        idx_c, _, _ = sift(bits_c, decoded_a)

        sent_a.append(bits_a)
        sent_c.append(bits_c)
        peer_at_a.append(decoded_c)
        peer_at_c.append(decoded_a)
        kept_a.append(idx_a + offset)
        kept_c.append(idx_c + offset)
        n_kept_a += idx_a.size
        n_kept_c += idx_c.size
        session.transcript.extend(
            slot_records(emitted_a, emitted_c, observed_a, observed_c, observed_eve)
        )
        offset += batch_size
        session.rounds += 1
        logger.debug(
            "round %d: kept %d/%d slots at A, %d at C",
            session.rounds, idx_a.size, batch_size, idx_c.size,
        )

    session.sent_a = np.concatenate(sent_a)
    session.sent_c = np.concatenate(sent_c)
    decoded_c_all = np.concatenate(peer_at_a)
    decoded_a_all = np.concatenate(peer_at_c)
    session.kept_indexes = np.concatenate(kept_a)[:target_key_bits]
    session.kept_indexes_c = np.concatenate(kept_c)[:target_key_bits]

    ka, kc = session.kept_indexes, session.kept_indexes_c
    session.key_a = extract_key(session.sent_a[ka], decoded_c_all[ka], policy)
    session.key_c = extract_key(decoded_a_all[kc], session.sent_c[kc], policy)

    if np.array_equal(session.key_a, session.key_c):
        session.status = SessionStatus.COMPLETE
        logger.info(
            "key exchange complete: %d-bit key in %d slots (%d rounds)",
            target_key_bits, session.slots_used, session.rounds,
        )
    else:
        session.status = SessionStatus.KEY_MISMATCH
        logger.warning(
            "key mismatch after %d slots: %d of %d key bits differ",
            session.slots_used,
            int(np.count_nonzero(session.key_a != session.key_c)),
            target_key_bits,
        )
    return session


# -- eavesdropper ---------------------------------------------------------

def eavesdrop_classify(observed: int, params: ChannelParams) -> CaseLabel:
    """Three-level reading of the superposed count by a passive listener."""
    if observed < params.threshold:
        return CaseLabel.BOTH_ZERO
    if observed < params.z1 + params.threshold:
        return CaseLabel.AMBIGUOUS
    return CaseLabel.BOTH_ONE


def reconstruct_kept_indexes(
    transcript: Sequence[SlotRecord], params: ChannelParams, target_key_bits: int
) -> Indexes:
    """Sift the way the parties do, from the eavesdropper's counts alone.

    The key length is public, so surplus ambiguous slots are dropped the same
    way the parties drop them.
    """
    ambiguous = [
        i for i, rec in enumerate(transcript)
        if eavesdrop_classify(rec.observed_eve, params) is CaseLabel.AMBIGUOUS
    ]
    return np.asarray(ambiguous[:target_key_bits], dtype=np.int64)


def guess_success_count(key: Sequence[int] | np.ndarray, trials: int, rng: np.random.Generator) -> int:
    """Number of ``trials`` independent uniform guesses that hit ``key`` exactly."""
    key_arr = as_bits(key)
    hits = 0
    chunk = max(1, min(trials, 1 << 16))
    remaining = trials
    while remaining > 0:
        n = min(chunk, remaining)
        guesses = rng.integers(0, 2, size=(n, key_arr.size), dtype=np.uint8)
        hits += int(np.all(guesses == key_arr, axis=1).sum())
        remaining -= n
    return hits


def _attack_key(session: KeySession) -> Bits:
    if session.status is SessionStatus.KEY_MISMATCH:
        raise KeyMismatch("cannot attack a session whose parties disagree")
    return session.key_a


def eavesdrop_attack(
    session: KeySession, params: ChannelParams, rng: np.random.Generator
) -> Tuple[Bits, bool]:
    """One full-key recovery attempt against a finished session.

    The attacker locates the kept slots from the transcript, then has to
    guess the source bit of each of them: every kept slot carries exactly
    ``z1`` molecules whoever sent it.
    """
    key = _attack_key(session)
    kept = reconstruct_kept_indexes(session.transcript, params, session.target_key_bits)
    guessed = np.asarray(rng.integers(0, 2, size=kept.size, dtype=np.uint8), dtype=np.uint8)
    return guessed, bool(np.array_equal(guessed, key))


def attack_session(
    session: KeySession, params: ChannelParams, trials: int, rng: np.random.Generator
) -> int:
    """Successes out of ``trials`` independent guesses against one session."""
    key = _attack_key(session)
    kept = reconstruct_kept_indexes(session.transcript, params, session.target_key_bits)
    if kept.size != key.size:
        # misplaced slots: no guess of this length can equal the key
        return 0
    return guess_success_count(key, trials, rng)
