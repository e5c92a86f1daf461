"""Topic-model evaluation and bootstrapped covariate effects."""

from tmeval._core import (
    Error,
    InvariantError,
    ParseError,
    __version__,
    align,
    build_design,
    diversity,
    effects,
    format_p_value,
    load_bundle,
    npmi_from_counts,
    ols_fit,
    run_cli,
    sha256_file,
    synth,
    t_sf,
    uniqueness,
    validate_bundle,
)

__all__ = [
    "Error",
    "InvariantError",
    "ParseError",
    "__version__",
    "align",
    "build_design",
    "diversity",
    "effects",
    "format_p_value",
    "load_bundle",
    "npmi_from_counts",
    "ols_fit",
    "run_cli",
    "sha256_file",
    "synth",
    "t_sf",
    "uniqueness",
    "validate_bundle",
]
