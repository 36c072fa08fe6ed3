"""Configuration parsing, CSV/JSON/SVG emission, and the command line."""

from .config import ConfigError, RunConfig, load_config, parse_config
from .emit import (
    emit_edge_state_csv,
    emit_population_csv,
    emit_spectrum_csv,
    emit_sweep_csv,
    read_spectrum_csv,
    read_sweep_csv,
    verify_manifest,
    write_manifest,
)
from .plots import (
    plot_fidelity_sweep,
    plot_gap_vs_length,
    plot_population,
    plot_spectrum,
    plot_state_profile,
)

__all__ = [
    "ConfigError",
    "RunConfig",
    "load_config",
    "parse_config",
    "emit_edge_state_csv",
    "emit_population_csv",
    "emit_spectrum_csv",
    "emit_sweep_csv",
    "read_spectrum_csv",
    "read_sweep_csv",
    "verify_manifest",
    "write_manifest",
    "plot_fidelity_sweep",
    "plot_gap_vs_length",
    "plot_population",
    "plot_spectrum",
    "plot_state_profile",
]
