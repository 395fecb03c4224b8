"""
Shared pydantic base for the library's validated value types.

Parameter sets (channel, energy, experiment) are pydantic models so their
invariants are checked once, at construction.  ``Schema.build`` is the
entry point used by callers that want a ``ConfigError`` instead of pydantic's
``ValidationError``.
"""
from __future__ import annotations

from typing import Any, Sequence

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, ValidationError

from .errors import ConfigError

Bits = npt.NDArray[np.uint8]


def describe_validation_error(exc: ValidationError) -> str:
    """Flatten a ValidationError into ``field: message`` pairs."""
    parts = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err.get("loc", ())) or exc.title
        msg = str(err.get("msg", "invalid value")).removeprefix("Value error, ")
        parts.append(f"{loc}: {msg}")
    return "; ".join(parts)


class Schema(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    @classmethod
    def build(cls, **data: Any):
        try:
            return cls(**data)
        except ValidationError as exc:
            raise ConfigError(describe_validation_error(exc)) from exc


def as_bits(bits: str | Sequence[int] | np.ndarray) -> Bits:
    """Coerce a bit string (``"1011"``) or sequence of 0/1 into a uint8 array."""
    if isinstance(bits, str):
        cleaned = "".join(bits.split())
        if set(cleaned) - {"0", "1"}:
            raise ValueError(f"not a bit string: {bits!r}")
        return np.fromiter((c == "1" for c in cleaned), dtype=np.uint8, count=len(cleaned))
    arr = np.asarray(bits)
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValueError("bit sequences may only contain 0 and 1")
    return arr.astype(np.uint8, copy=False).reshape(-1)


def bits_to_str(bits: Sequence[int] | np.ndarray) -> str:
    return "".join("1" if b else "0" for b in np.asarray(bits).reshape(-1))
