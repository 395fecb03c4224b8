"""Exception types raised by the secure-channel library.

Library code raises these; only the command-line layer turns them into exit
codes.
"""
from __future__ import annotations

from pathlib import Path


class McsecError(Exception):
    """Base class for every domain failure."""


class EmptyInput(McsecError, ValueError):
    pass


class LengthMismatch(McsecError, ValueError):
    pass


class SiftViolation(McsecError, ValueError):
    """Kept bits where both parties sent the same value."""


class BlockAlignment(McsecError, ValueError):
    """Stream length is not a positive multiple of the 8-bit block."""


class KeyLengthError(McsecError, ValueError):
    pass


class ConfigError(McsecError):
    """A configuration invariant was violated; the message names it."""


class KeyMismatch(McsecError):
    """The two parties finished a key exchange holding different keys."""


class IoError(McsecError, OSError):
    def __init__(self, path: str | Path, reason: str) -> None:
        self.path = Path(path)
        super().__init__(f"{self.path}: {reason}")
