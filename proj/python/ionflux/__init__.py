"""Heat transport and rectification in chains of trapped ions."""

from ._core import (
    ConfigError,
    SolverError,
    __version__,
    bath_temperature,
    bias_pair,
    characteristic_length,
    config_hash,
    langevin,
    normalize,
    preset_names,
    preset_text,
    rectification_factor,
    steady_state,
    sweep,
    validate,
)

__all__ = [
    "ConfigError",
    "SolverError",
    "__version__",
    "bath_temperature",
    "bias_pair",
    "characteristic_length",
    "config_hash",
    "langevin",
    "normalize",
    "preset_names",
    "preset_text",
    "rectification_factor",
    "steady_state",
    "sweep",
    "validate",
]
