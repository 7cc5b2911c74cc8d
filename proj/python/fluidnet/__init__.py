"""Two-node stochastic fluid network: simulation, tail bounds and asymptotes."""

from ._core import (
    ConfigError,
    Direction,
    HeavyDist,
    Network,
    NumericError,
    __version__,
    big_jump_series,
    classify_direction,
    config_hash,
    derive_report,
    directional_bounds,
    exact_asymptote,
    fluid_contents,
    reachable,
    simulate,
    single_node_bounds,
)

__all__ = [
    "ConfigError",
    "Direction",
    "HeavyDist",
    "Network",
    "NumericError",
    "__version__",
    "big_jump_series",
    "classify_direction",
    "config_hash",
    "derive_report",
    "directional_bounds",
    "exact_asymptote",
    "fluid_contents",
    "reachable",
    "simulate",
    "single_node_bounds",
]
