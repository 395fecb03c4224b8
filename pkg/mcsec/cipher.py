"""
XOR block cipher with serial-to-parallel framing.

The serial bit stream is cut into 8-bit blocks (S/P), each block is XORed
with the 8-bit key, and the blocks are joined back into a stream (P/S).
Decryption is the same operation.  ``mode="serial"`` models the equivalent
single-XOR-gate datapath that walks the stream bit by bit with the key bit
``j mod 8``; both modes give identical output.
"""
from __future__ import annotations

from typing import Literal, Sequence

import numpy as np
import numpy.typing as npt

from .errors import BlockAlignment, KeyLengthError
from .schemas import Bits, as_bits

BLOCK_BITS = 8

CipherMode = Literal["parallel", "serial"]
Blocks = npt.NDArray[np.uint8]


def as_key_block(key: str | Sequence[int] | np.ndarray) -> Bits:
    arr = as_bits(key)
    if arr.size != BLOCK_BITS:
        raise KeyLengthError(f"key block must be {BLOCK_BITS} bits, got {arr.size}")
    return arr


def key_block_from(key: str | Sequence[int] | np.ndarray) -> Bits:
    """The 8-bit cipher key for a key produced by the exchange.

    Keys longer than one block must be a whole number of blocks; only the
    first block is used.
    """
    arr = as_bits(key)
    if arr.size == 0 or arr.size % BLOCK_BITS:
        raise KeyLengthError(
            f"key length must be a positive multiple of {BLOCK_BITS}, got {arr.size}"
        )
    return arr[:BLOCK_BITS].copy()


def _aligned(stream: str | Sequence[int] | np.ndarray) -> Bits:
    arr = as_bits(stream)
    if arr.size == 0 or arr.size % BLOCK_BITS:
        raise BlockAlignment(
            f"stream length must be a positive multiple of {BLOCK_BITS}, got {arr.size}"
        )
    return arr


def serial_to_parallel(stream: str | Sequence[int] | np.ndarray) -> Blocks:
    return _aligned(stream).reshape(-1, BLOCK_BITS).copy()


def parallel_to_serial(blocks: np.ndarray) -> Bits:
    return np.asarray(blocks, dtype=np.uint8).reshape(-1).copy()


def xor_block(key: str | Sequence[int] | np.ndarray, block: str | Sequence[int] | np.ndarray) -> Bits:
    k = as_key_block(key)
    b = as_bits(block)
    if b.size != BLOCK_BITS:
        raise BlockAlignment(f"block must be {BLOCK_BITS} bits, got {b.size}")
    return np.bitwise_xor(k, b)


def xor_serial(key: str | Sequence[int] | np.ndarray, stream: str | Sequence[int] | np.ndarray) -> Bits:
    k = as_key_block(key)
    s = _aligned(stream)
    out = np.empty_like(s)
    for j, bit in enumerate(s):
        out[j] = bit ^ k[j % BLOCK_BITS]
    return out


def encrypt_stream(
    key: str | Sequence[int] | np.ndarray,
    plaintext: str | Sequence[int] | np.ndarray,
    mode: CipherMode = "parallel",
) -> Bits:
    if mode == "serial":
        return xor_serial(key, plaintext)
    if mode != "parallel":
        raise ValueError(f"unknown cipher mode {mode!r}")
    k = as_key_block(key)
    blocks = serial_to_parallel(plaintext)
    return parallel_to_serial(np.bitwise_xor(blocks, k))


def decrypt_stream(
    key: str | Sequence[int] | np.ndarray,
    demodulated: str | Sequence[int] | np.ndarray,
    mode: CipherMode = "parallel",
) -> Bits:
    return encrypt_stream(key, demodulated, mode)


def bytes_to_bits(data: bytes) -> Bits:
    """Most significant bit first."""
    return np.unpackbits(np.frombuffer(data, dtype=np.uint8))


def bits_to_bytes(bits: str | Sequence[int] | np.ndarray) -> bytes:
    return np.packbits(_aligned(bits)).tobytes()
