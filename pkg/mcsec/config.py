from __future__ import annotations
from dataclasses import dataclass

@dataclass(frozen=True)
class Defaults:
    # Channel: impulse per bit-1 and detection threshold z
    z1: int = 250
    threshold: int = 20
    arrival_prob: float = 1.0
    background_rate: float = 0.0

    # Energy: molecules per transmitted bit on average, E_b^C / E_b^T
    e_bit_tx: float = 125.0
    compute_ratio: float = 0.001

    # Transmission layout: 4 frames of 1024 bits, new key every 2 frames
    n_bits: int = 4096
    frame_bits: int = 1024
    rekey_every_frames: int = 2

    # Key exchange
    key_bits: int = 8
    batch_size: int = 8
    policy: str = "c"
    seed: int = 0
    attack_trials: int = 0


DEFAULTS = Defaults()
