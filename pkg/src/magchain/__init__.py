"""Topological state transfer in a 1D cavity-magnon chain.

The package simulates an alternating chain of cavity and magnon modes in
the single-excitation subspace: a pump angle theta sweeps the two
sublattice couplings against each other, dragging a localized in-gap
mode from one end of the chain to the other.  Submodules:

- ``model``       chain description, coupling schedule, Hamiltonian builder
- ``spectral``    eigensolves over a theta grid, gap-state tracking,
                  closed-form edge mode, localization diagnostics
- ``dynamics``    ramped Schrodinger integration and transfer fidelity
- ``experiments`` named presets and fidelity-vs-ramp-rate sweeps
- ``cli_io``      config parsing, CSV/JSON/SVG emission, command line
"""

from .model import (
    ChainSpec,
    CouplingPoint,
    SiteIndex,
    SiteKind,
    basis_state,
    build_hamiltonian,
    schedule,
    site_labels,
)
from .spectral import (
    EdgeStateAnalytic,
    SpectrumScan,
    analytic_zero_mode,
    eigendecompose,
    gap_width,
    localization_profile,
    scan_spectrum,
)
from .dynamics import (
    IntegrationError,
    RampProtocol,
    TransferResult,
    evolve,
    fidelity,
    propagate_constant_theta,
    propagate_piecewise,
    propagate_piecewise_converged,
)
from .experiments import (
    Preset,
    SweepResult,
    SweepRow,
    SweepSpec,
    plateau_interval,
    run_preset,
    sweep_fidelity,
)

__version__ = "0.1.0"

__all__ = [
    "ChainSpec",
    "CouplingPoint",
    "SiteIndex",
    "SiteKind",
    "basis_state",
    "build_hamiltonian",
    "schedule",
    "site_labels",
    "EdgeStateAnalytic",
    "SpectrumScan",
    "analytic_zero_mode",
    "eigendecompose",
    "gap_width",
    "localization_profile",
    "scan_spectrum",
    "IntegrationError",
    "RampProtocol",
    "TransferResult",
    "evolve",
    "fidelity",
    "propagate_constant_theta",
    "propagate_piecewise",
    "propagate_piecewise_converged",
    "Preset",
    "SweepResult",
    "SweepRow",
    "SweepSpec",
    "plateau_interval",
    "run_preset",
    "sweep_fidelity",
    "__version__",
]
