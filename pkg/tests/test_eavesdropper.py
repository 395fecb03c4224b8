"""
Tests for the passive eavesdropper: three-level classification of the
superposed count, recovery of the kept slots, and full-key guessing.
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
from mcsec.errors import KeyMismatch  # noqa: E402
from mcsec.experiment import binomial_band  # noqa: E402
from mcsec.keyexchange import CaseLabel, KeySourcePolicy, SessionStatus  # noqa: E402
from mcsec.rng import derive_rng  # noqa: E402


def _session(key_bits: int, seed: int, params: ChannelParams = ChannelParams()):
    return kx.run_key_exchange(key_bits, KeySourcePolicy.PARTY_C, params, rng=derive_rng(seed, 0))


def test_classify_three_levels():
    params = ChannelParams(z1=125, threshold=20)
    assert kx.eavesdrop_classify(0, params) is CaseLabel.BOTH_ZERO
    assert kx.eavesdrop_classify(250, params) is CaseLabel.BOTH_ONE
    assert kx.eavesdrop_classify(125, params) is CaseLabel.AMBIGUOUS
    assert kx.eavesdrop_classify(19, params) is CaseLabel.BOTH_ZERO
    assert kx.eavesdrop_classify(145, params) is CaseLabel.BOTH_ONE


def test_attacker_finds_the_kept_slots():
    params = ChannelParams()
    for seed in range(500):
        session = _session(8, seed)
        found = kx.reconstruct_kept_indexes(session.transcript, params, session.target_key_bits)
        assert np.array_equal(found, session.kept_indexes)


def test_discarded_slots_are_classified_correctly():
    params = ChannelParams()
    for seed in range(200):
        for rec in _session(8, seed).transcript:
            if rec.emitted_a == rec.emitted_c == 0:
                assert kx.eavesdrop_classify(rec.observed_eve, params) is CaseLabel.BOTH_ZERO
            elif rec.emitted_a == rec.emitted_c:
                assert kx.eavesdrop_classify(rec.observed_eve, params) is CaseLabel.BOTH_ONE


def test_kept_slots_look_identical_for_every_key():
    params = ChannelParams()
    for seed in range(200):
        session = _session(8, seed)
        sums = {session.transcript[i].channel_sum for i in session.kept_indexes}
        observed = {session.transcript[i].observed_eve for i in session.kept_indexes}
        assert sums == {params.z1}
        assert observed == {params.z1}


def test_single_attack_returns_key_sized_guess():
    params = ChannelParams()
    session = _session(8, 1)
    guessed, success = kx.eavesdrop_attack(session, params, derive_rng(1, 2))
    assert guessed.size == 8
    assert success == bool(np.array_equal(guessed, session.key))


@pytest.mark.parametrize("key_bits", [2, 4, 8])
def test_attack_success_matches_guessing_rate(key_bits):
    params = ChannelParams()
    trials = 100_000
    session = _session(key_bits, 10 + key_bits)
    hits = kx.attack_session(session, params, trials, derive_rng(99, key_bits))
    p = 2.0 ** -key_bits
    assert abs(hits / trials - p) <= binomial_band(p, trials)


def test_guess_success_count_is_exact_for_short_keys():
    # a 1-bit key is hit by roughly half the guesses
    hits = kx.guess_success_count([1], 200_000, derive_rng(5))
    assert abs(hits / 200_000 - 0.5) <= binomial_band(0.5, 200_000)


def test_attack_refuses_mismatched_session():
    session = kx.KeySession(target_key_bits=1, policy=KeySourcePolicy.PARTY_C)
    session.status = SessionStatus.KEY_MISMATCH
    with pytest.raises(KeyMismatch):
        kx.attack_session(session, ChannelParams(), 10, derive_rng(0))
