"""
Configuration for the command-line front end.

Values come from two places: command-line flags and an optional JSON
document passed with ``--config`` whose keys match the field names below.
The document may also group the channel and energy values under ``channel``
and ``energy`` objects, the way :class:`mcsec.experiment.ExperimentConfig`
nests them.  Flags win over the document; anything set in neither falls back to the
defaults in :mod:`mcsec.config`.  Environment variables are not consulted.
"""
from __future__ import annotations

import contextvars
import json
from pathlib import Path
from typing import Any, Literal, Optional, Tuple, Type

from pydantic import Field, ValidationError, model_validator
from pydantic_settings import (
    BaseSettings,
    JsonConfigSettingsSource,
    PydanticBaseSettingsSource,
    SettingsConfigDict,
)

from mcsec.channel import ChannelParams
from mcsec.config import DEFAULTS
from mcsec.energy import EnergyParams
from mcsec.experiment import ExperimentConfig
from mcsec.keyexchange import KeySourcePolicy
from mcsec.schemas import describe_validation_error

# JSON document for the settings currently being loaded
_config_file: contextvars.ContextVar[Optional[Path]] = contextvars.ContextVar(
    "config_file", default=None
)

# where each default comes from
PROVENANCE = {
    "threshold": "reference setting z = 20",
    "e_bit_tx": "reference setting, 125 molecules/bit",
    "n_bits": "reference setting, 4K information bits",
    "frame_bits": "reference setting, 4 frames",
    "rekey_every_frames": "reference setting, new key every 2 frames",
    "key_bits": "reference setting, 8-bit key",
    "z1": "inferred from the 125 molecules/bit average",
    "policy": "reference example keys on C's bits",
}


# nested sections of an ExperimentConfig-shaped document
_SECTIONS = {
    "channel": frozenset(ChannelParams.model_fields),
    "energy": frozenset(EnergyParams.model_fields),
}


class ConfigDocumentError(Exception):
    """The ``--config`` document is missing, unreadable or malformed."""


class CliConfig(BaseSettings):
    """Flat view of every tunable the subcommands accept."""

    n_bits: int = DEFAULTS.n_bits
    frame_bits: int = DEFAULTS.frame_bits
    rekey_every_frames: int = DEFAULTS.rekey_every_frames
    key_bits: int = DEFAULTS.key_bits
    batch_size: int = DEFAULTS.batch_size

    z1: int = DEFAULTS.z1
    threshold: int = DEFAULTS.threshold
    arrival_prob: float = DEFAULTS.arrival_prob
    background_rate: float = DEFAULTS.background_rate

    e_bit_tx: float = DEFAULTS.e_bit_tx
    e_bit_compute: Optional[float] = None

    policy: KeySourcePolicy = KeySourcePolicy(DEFAULTS.policy)
    seed: int = Field(default=DEFAULTS.seed, ge=0)
    attack_trials: int = DEFAULTS.attack_trials
    plaintext: Literal["random", "zeros", "ones"] = "random"

    out: Path = Field(default=Path("results"))
    transcript_out: Optional[Path] = None

    model_config = SettingsConfigDict(
        extra="forbid",          # unknown keys in the document are a usage error
        populate_by_name=True,
    )

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: Type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> Tuple[PydanticBaseSettingsSource, ...]:
        json_file = _config_file.get()
        if json_file is None:
            return (init_settings,)
        return (init_settings, JsonConfigSettingsSource(settings_cls, json_file=json_file))

    @model_validator(mode="before")
    @classmethod
    def _flatten_sections(cls, data: Any) -> Any:
        """Accept ``channel`` and ``energy`` sections shaped like ``ExperimentConfig``."""
        if not isinstance(data, dict):
            return data
        data = dict(data)
        for section in _SECTIONS:
            values = data.pop(section, None)
            if values is None:
                continue
            if not isinstance(values, dict):
                raise ValueError(f"{section} section must be a JSON object")
            for key, value in values.items():
                if key not in _SECTIONS[section]:
                    raise ValueError(f"unknown {section} key: {key}")
                # top-level keys and flags win over the section
                data.setdefault(key, value)
        return data

    def channel_params(self) -> ChannelParams:
        return ChannelParams.build(
            z1=self.z1,
            threshold=self.threshold,
            arrival_prob=self.arrival_prob,
            background_rate=self.background_rate,
        )

    def energy_params(self) -> EnergyParams:
        return EnergyParams.build(e_bit_tx=self.e_bit_tx, e_bit_compute=self.e_bit_compute)

    def experiment_config(self) -> ExperimentConfig:
        return ExperimentConfig.build(
            n_bits=self.n_bits,
            frame_bits=self.frame_bits,
            rekey_every_frames=self.rekey_every_frames,
            key_bits=self.key_bits,
            channel=self.channel_params(),
            energy=self.energy_params(),
            policy=self.policy,
            seed=self.seed,
            attack_trials=self.attack_trials,
            batch_size=self.batch_size,
            plaintext=self.plaintext,
        )


def load_cli_config(config_path: Optional[Path] = None, **flags: Any) -> CliConfig:
    """Merge the JSON document at ``config_path`` with explicitly given flags.

    Flags whose value is ``None`` were not given and do not override the
    document.
    """
    if config_path is not None:
        path = Path(config_path)
        if not path.is_file():
            raise ConfigDocumentError(f"config file not found: {path}")
        try:
            document = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ConfigDocumentError(f"cannot read config file {path}: {exc}") from exc
        if not isinstance(document, dict):
            raise ConfigDocumentError(f"config file {path} must hold a JSON object")

    overrides = {k: v for k, v in flags.items() if v is not None}
    token = _config_file.set(Path(config_path) if config_path is not None else None)
    try:
        return CliConfig(**overrides)
    except ValidationError as exc:
        raise ConfigDocumentError(describe_validation_error(exc)) from exc
    finally:
        _config_file.reset(token)


def flag_help(text: str, field: str) -> str:
    """Help text that states the default and where it comes from."""
    default = CliConfig.model_fields[field].default
    if isinstance(default, KeySourcePolicy):
        default = default.value
    source = PROVENANCE.get(field)
    suffix = f"default: {default}" + (f"; {source}" if source else "")
    return f"{text} ({suffix})"
