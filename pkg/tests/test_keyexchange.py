"""
Tests for the simultaneous-transmission key exchange.

``ScriptedRng`` replays fixed bit patterns so the worked example (A sends
10110101, C sends 01011101) can be driven through ``run_key_exchange``.
"""
import os
import sys

import numpy as np
import pytest

current_dir = os.path.dirname(__file__)
project_root = os.path.abspath(os.path.join(current_dir, ".."))
if project_root not in sys.path:
    sys.path.insert(0, project_root)

from mcsec import keyexchange as kx  # noqa: E402
from mcsec.channel import ChannelParams  # noqa: E402
from mcsec.errors import ConfigError, EmptyInput, KeyMismatch, LengthMismatch, SiftViolation  # noqa: E402
from mcsec.keyexchange import KeySourcePolicy, SessionStatus  # noqa: E402
from mcsec.rng import derive_rng, make_rng  # noqa: E402


class ScriptedRng:
    """Stands in for a numpy Generator; ``integers`` returns queued bit arrays."""

    def __init__(self, *patterns: str) -> None:
        self.patterns = [np.array([int(c) for c in p], dtype=np.uint8) for p in patterns]

    def integers(self, low, high, size=None, dtype=np.int64):
        bits = self.patterns.pop(0)
        assert bits.size == size
        return bits.astype(dtype)


def test_random_bits_deterministic_per_seed():
    assert np.array_equal(kx.random_bits(8, make_rng(42)), kx.random_bits(8, make_rng(42)))


def test_random_bits_balanced():
    bits = kx.random_bits(100_000, make_rng(1))
    assert 0.49 <= bits.mean() <= 0.51
    assert kx.random_bits(1, make_rng(2))[0] in (0, 1)


def test_random_bits_rejects_zero():
    with pytest.raises(EmptyInput):
        kx.random_bits(0, make_rng(0))


def test_sift_worked_example():
    kept, own, peer = kx.sift("10110101", "01011101")
    assert kept.tolist() == [0, 1, 2, 4]
    assert own.tolist() == [1, 0, 1, 0]
    assert peer.tolist() == [0, 1, 0, 1]


def test_sift_edge_cases():
    assert kx.sift("0110", "0110")[0].size == 0
    assert kx.sift("1111", "0000")[0].tolist() == [0, 1, 2, 3]
    with pytest.raises(LengthMismatch):
        kx.sift("01", "011")


def test_extract_key_policies():
    assert kx.extract_key("1010", "0101", KeySourcePolicy.PARTY_C).tolist() == [0, 1, 0, 1]
    assert kx.extract_key("1010", "0101", KeySourcePolicy.PARTY_A).tolist() == [1, 0, 1, 0]
    assert kx.extract_key([], [], KeySourcePolicy.PARTY_A).size == 0


def test_extract_key_rejects_equal_bits():
    with pytest.raises(SiftViolation):
        kx.extract_key("1010", "0111", KeySourcePolicy.PARTY_C)


def test_exchange_worked_example_party_c():
    rng = ScriptedRng("10110101", "01011101")
    session = kx.run_key_exchange(4, KeySourcePolicy.PARTY_C, ChannelParams(), batch_size=8, rng=rng)
    assert session.status is SessionStatus.COMPLETE
    assert session.kept_indexes.tolist() == [0, 1, 2, 4]
    assert session.key.tolist() == [0, 1, 0, 1]
    assert session.rounds == 1
    assert session.slots_used == 5
    assert session.slots_transmitted == 8


def test_exchange_worked_example_party_a():
    rng = ScriptedRng("10110101", "01011101")
    session = kx.run_key_exchange(4, KeySourcePolicy.PARTY_A, ChannelParams(), batch_size=8, rng=rng)
    assert session.key.tolist() == [1, 0, 1, 0]


def test_exchange_single_slot():
    for policy, expected in ((KeySourcePolicy.PARTY_A, [1]), (KeySourcePolicy.PARTY_C, [0])):
        session = kx.run_key_exchange(1, policy, ChannelParams(), batch_size=1, rng=ScriptedRng("1", "0"))
        assert session.slots_used == 1
        assert session.key.tolist() == expected


def test_exchange_runs_extra_rounds_and_truncates():
    # round one keeps only slot 1, round two keeps slots 4, 6 and 7
    rng = ScriptedRng("0100", "0000", "1011", "0000")
    session = kx.run_key_exchange(2, KeySourcePolicy.PARTY_A, ChannelParams(), batch_size=4, rng=rng)
    assert session.rounds == 2
    assert session.kept_indexes.tolist() == [1, 4]
    assert session.key.tolist() == [1, 1]
    assert session.slots_used == 5
    assert len(session.transcript) == 8


def test_exchange_argument_checks():
    with pytest.raises(ConfigError):
        kx.run_key_exchange(0, "c", ChannelParams(), rng=make_rng(0))
    with pytest.raises(ConfigError):
        kx.run_key_exchange(8, "c", ChannelParams(), batch_size=0, rng=make_rng(0))
    with pytest.raises(ConfigError):
        kx.run_key_exchange(8, "c", ChannelParams())


def test_session_invariants_and_statistics():
    params = ChannelParams()
    slots = []
    for trial in range(10_000):
        session = kx.run_key_exchange(8, KeySourcePolicy.PARTY_C, params, rng=derive_rng(7, trial))
        assert session.succeeded
        assert np.array_equal(session.key_a, session.key_c)
        assert np.array_equal(session.kept_indexes, session.kept_indexes_c)
        assert session.key.size == 8
        for ix in session.kept_indexes:
            record = session.transcript[ix]
            assert record.emitted_a != record.emitted_c
            assert record.channel_sum == params.z1
        slots.append(session.slots_used)
    assert 15.2 <= np.mean(slots) <= 16.8


def test_sift_rate_is_one_half():
    rng = make_rng(2024)
    a = kx.random_bits(100_000, rng)
    c = kx.random_bits(100_000, rng)
    kept, _, _ = kx.sift(a, c)
    assert 0.495 <= kept.size / a.size <= 0.505


def test_exchange_is_deterministic():
    params = ChannelParams()
    s1 = kx.run_key_exchange(16, "a", params, rng=derive_rng(3, 0, 0))
    s2 = kx.run_key_exchange(16, "a", params, rng=derive_rng(3, 0, 0))
    assert np.array_equal(s1.key, s2.key)
    assert s1.transcript == s2.transcript


def test_noisy_exchange_marks_mismatch():
    params = ChannelParams(arrival_prob=0.05)
    statuses = {
        kx.run_key_exchange(8, "c", params, rng=derive_rng(1, i)).status for i in range(200)
    }
    assert SessionStatus.KEY_MISMATCH in statuses


def test_key_property_raises_on_mismatch():
    session = kx.KeySession(target_key_bits=1, policy=KeySourcePolicy.PARTY_C)
    session.status = SessionStatus.KEY_MISMATCH
    with pytest.raises(KeyMismatch):
        session.key


def test_transcript_frame_columns():
    rng = ScriptedRng("10110101", "01011101")
    session = kx.run_key_exchange(4, "c", ChannelParams(), batch_size=8, rng=rng)
    frame = session.transcript_frame()
    assert list(frame.columns) == kx.TRANSCRIPT_COLUMNS
    assert frame["kept"].tolist() == [1, 1, 1, 0, 1, 0, 0, 0]
    assert frame["channel_sum"].tolist() == [250, 250, 250, 500, 250, 500, 0, 500]
