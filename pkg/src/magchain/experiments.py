"""Named experiment presets and fidelity-vs-ramp-rate sweep drivers.

Each preset bundles a chain, an initial/target site pair, and an omega
grid reproducing one family of transfer curves: photonic transfer with
and without the direct cavity hop, magnonic transfer, magnon-to-photon
conversion, and the gap-width-versus-chain-length trend.  Sweep points
are independent; they run on a bounded thread pool (the integrator
kernel releases the GIL) and results keep grid order regardless of
completion order.  Nothing here uses randomness: reruns are
bit-identical apart from wall-clock timings.
"""

from __future__ import annotations

import enum
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dynamics import IntegrationError, RampProtocol, evolve
from .model import ChainSpec, SiteIndex, basis_state, build_hamiltonian
from .spectral import eigendecompose, gap_width


class Preset(enum.Enum):
    PHOTON_J0 = "PhotonJ0"
    PHOTON_J = "PhotonJ"
    MAGNONIC = "Magnonic"
    MAGNON_TO_PHOTON = "MagnonToPhoton"
    GAP_VS_LENGTH = "GapVsLength"
    CUSTOM = "Custom"

    @classmethod
    def from_name(cls, name: str) -> "Preset":
        for preset in cls:
            if preset.value.lower() == name.strip().lower():
                return preset
        known = ", ".join(p.value for p in cls)
        raise ValueError(f"unknown preset {name!r}; known presets: {known}")


def default_omega_grid() -> np.ndarray:
    """41 log-spaced ramp rates covering 1e-4 .. 1e-1."""
    return np.logspace(-4.0, -1.0, 41)


DEFAULT_J_VALUES = (0.125, 0.2, 0.3, 0.4, 0.5)
DEFAULT_GAP_LENGTHS = (2, 3, 4, 5, 6, 7, 8)


def _validate_grid(omega_grid) -> np.ndarray:
    grid = np.asarray(omega_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("omega grid must be a nonempty 1-D sequence")
    if np.any(grid <= 0.0) or not np.all(np.isfinite(grid)):
        raise ValueError("omega grid values must be positive and finite")
    if grid.size > 1 and not np.all(np.diff(grid) > 0):
        raise ValueError("omega grid must be strictly ascending")
    return grid


@dataclass(frozen=True)
class SweepSpec:
    """Validated description of one sweep: preset, grid, chain overrides."""

    preset: Preset
    omega_grid: np.ndarray = field(default_factory=default_omega_grid)
    j_values: tuple[float, ...] | None = None
    overrides: dict | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "omega_grid", _validate_grid(self.omega_grid))


@dataclass(frozen=True)
class SweepRow:
    """One parameter point of a sweep.

    Fidelity presets fill omega/fidelity/norm_drift and leave gap_width
    None; the gap-vs-length preset does the opposite.  wall_time is the
    measured evolve duration in seconds and is the one column that is
    not deterministic across reruns.
    """

    preset: str
    n_cells: int
    g0: float
    g0_prime: float
    j_hop: float
    omega: float | None
    fidelity: float | None
    norm_drift: float | None
    wall_time: float
    gap_width: float | None = None


@dataclass
class SweepResult:
    rows: list[SweepRow]

    def __len__(self) -> int:
        return len(self.rows)

    def fidelity_series(self) -> list[tuple[float, np.ndarray, np.ndarray]]:
        """Rows grouped by j_hop as (j_hop, omegas, fidelities), j ascending."""
        groups: dict[float, list[SweepRow]] = {}
        for row in self.rows:
            if row.omega is None or row.fidelity is None:
                continue
            groups.setdefault(row.j_hop, []).append(row)
        series = []
        for j in sorted(groups):
            rows = sorted(groups[j], key=lambda r: r.omega)
            series.append((
                j,
                np.array([r.omega for r in rows]),
                np.array([r.fidelity for r in rows]),
            ))
        return series


def _worker_count(workers: int | None) -> int:
    if workers is None:
        env = os.environ.get("MAGCHAIN_WORKERS", "").strip()
        workers = int(env) if env else min(4, os.cpu_count() or 1)
    workers = int(workers)
    if workers < 1:
        raise ValueError("worker count must be >= 1")
    return workers


def sweep_fidelity(spec: ChainSpec, omega_grid, initial: np.ndarray, target: np.ndarray,
                   *, preset_name: str = "Custom", theta_start: float = 0.0,
                   theta_end: float = math.pi, snapshot_count: int = 0,
                   workers: int | None = None) -> SweepResult:
    """One ramp integration per grid point; rows ordered by omega.

    Integration failures carry the offending parameter point in their
    message.  Points run concurrently on a bounded thread pool when
    workers > 1; the row order is the grid order either way.
    """
    grid = _validate_grid(omega_grid)

    def one_point(omega: float) -> SweepRow:
        start = time.perf_counter()
        protocol = RampProtocol(omega=float(omega), theta_start=theta_start, theta_end=theta_end)
        try:
            result = evolve(spec, protocol, initial, target, snapshot_count=snapshot_count)
        except IntegrationError as exc:
            raise IntegrationError(f"{preset_name} at omega={omega:g}: {exc}") from exc
        return SweepRow(
            preset=preset_name,
            n_cells=spec.n_cells,
            g0=spec.g0,
            g0_prime=spec.g0_prime,
            j_hop=spec.j_hop,
            omega=float(omega),
            fidelity=result.fidelity,
            norm_drift=result.norm_drift,
            wall_time=time.perf_counter() - start,
        )

    n_workers = _worker_count(workers)
    if n_workers == 1 or grid.size == 1:
        rows = [one_point(om) for om in grid]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            rows = list(pool.map(one_point, grid))
    return SweepResult(rows=rows)


def gap_state(spec: ChainSpec, theta: float) -> np.ndarray:
    """Numeric mid-gap eigenvector at one angle, as a complex state."""
    _, vecs = eigendecompose(build_hamiltonian(spec, theta))
    return np.ascontiguousarray(vecs[:, spec.n_cells], dtype=np.complex128)


_ALLOWED_OVERRIDES = {
    "n_cells", "g0", "g0_prime", "j_hop", "omega_grid", "j_values", "n_values",
    "initial_site", "target_site", "init_mode", "snapshot_count", "workers",
    "theta_start", "theta_end", "theta_points",
}


def run_preset(preset: Preset | str, overrides: dict | None = None) -> SweepResult:
    """Execute a named preset, optionally overriding its parameters.

    Fidelity presets sweep the omega grid for their chain; GapVsLength
    instead reports the minimum spectral gap per chain length.  The
    init_mode override selects "basis" sites (default) or the exact
    numeric "gap-state" at the ramp endpoints as initial/target states.
    """
    if isinstance(preset, str):
        preset = Preset.from_name(preset)
    ov = dict(overrides or {})
    unknown = set(ov) - _ALLOWED_OVERRIDES
    if unknown:
        raise ValueError(f"unknown preset overrides: {sorted(unknown)}")

    defaults = {
        Preset.PHOTON_J0: dict(n_cells=10, g0=1.0, g0_prime=1.0, j_hop=0.0),
        Preset.PHOTON_J: dict(n_cells=10, g0=1.0, g0_prime=1.0, j_hop=0.125),
        Preset.MAGNONIC: dict(n_cells=2, g0=1.0, g0_prime=1.0, j_hop=8.0),
        Preset.MAGNON_TO_PHOTON: dict(n_cells=2, g0=16.0, g0_prime=1.0, j_hop=8.0),
        Preset.GAP_VS_LENGTH: dict(n_cells=2, g0=1.0, g0_prime=1.0, j_hop=8.0),
        Preset.CUSTOM: dict(n_cells=10, g0=1.0, g0_prime=1.0, j_hop=0.0),
    }[preset]

    n_cells = int(ov.get("n_cells", defaults["n_cells"]))
    g0 = float(ov.get("g0", defaults["g0"]))
    g0_prime = float(ov.get("g0_prime", defaults["g0_prime"]))
    j_hop = float(ov.get("j_hop", defaults["j_hop"]))
    omega_grid = _validate_grid(ov.get("omega_grid", default_omega_grid()))
    theta_start = float(ov.get("theta_start", 0.0))
    theta_end = float(ov.get("theta_end", math.pi))
    snapshot_count = int(ov.get("snapshot_count", 0))
    workers = ov.get("workers")
    init_mode = str(ov.get("init_mode", "basis"))
    if init_mode not in ("basis", "gap-state"):
        raise ValueError("init_mode must be 'basis' or 'gap-state'")

    if preset is Preset.GAP_VS_LENGTH:
        n_values = tuple(int(n) for n in ov.get("n_values", DEFAULT_GAP_LENGTHS))
        theta_points = int(ov.get("theta_points", 201))
        thetas = np.linspace(0.0, 2.0 * math.pi, theta_points)
        rows = []
        for n in n_values:
            spec = ChainSpec(n_cells=n, g0=g0, g0_prime=g0_prime, j_hop=j_hop)
            start = time.perf_counter()
            width = gap_width(spec, thetas)
            rows.append(SweepRow(
                preset=preset.value, n_cells=n, g0=g0, g0_prime=g0_prime,
                j_hop=j_hop, omega=None, fidelity=None, norm_drift=None,
                wall_time=time.perf_counter() - start, gap_width=width,
            ))
        return SweepResult(rows=rows)

    spec = ChainSpec(n_cells=n_cells, g0=g0, g0_prime=g0_prime, j_hop=j_hop)
    default_sites = {
        Preset.PHOTON_J0: ("a1", f"a{n_cells + 1}"),
        Preset.PHOTON_J: ("a1", f"a{n_cells + 1}"),
        Preset.MAGNONIC: ("m1", f"m{n_cells}"),
        Preset.MAGNON_TO_PHOTON: ("m1", f"a{n_cells + 1}"),
        Preset.CUSTOM: ("a1", f"a{n_cells + 1}"),
    }[preset]
    initial_label = str(ov.get("initial_site", default_sites[0]))
    target_label = str(ov.get("target_site", default_sites[1]))

    def endpoint_states(chain: ChainSpec) -> tuple[np.ndarray, np.ndarray]:
        if init_mode == "gap-state":
            return gap_state(chain, theta_start), gap_state(chain, theta_end)
        initial = basis_state(chain, SiteIndex.from_label(initial_label))
        target = basis_state(chain, SiteIndex.from_label(target_label))
        return initial, target

    if preset is Preset.PHOTON_J:
        j_values = tuple(float(j) for j in ov.get("j_values", DEFAULT_J_VALUES))
        rows = []
        for j in j_values:
            chain = ChainSpec(n_cells=n_cells, g0=g0, g0_prime=g0_prime, j_hop=j)
            initial, target = endpoint_states(chain)
            part = sweep_fidelity(
                chain, omega_grid, initial, target, preset_name=preset.value,
                theta_start=theta_start, theta_end=theta_end,
                snapshot_count=snapshot_count, workers=workers,
            )
            rows.extend(part.rows)
        return SweepResult(rows=rows)

    initial, target = endpoint_states(spec)
    return sweep_fidelity(
        spec, omega_grid, initial, target, preset_name=preset.value,
        theta_start=theta_start, theta_end=theta_end,
        snapshot_count=snapshot_count, workers=workers,
    )


def plateau_interval(result: SweepResult, threshold: float = 0.99,
                     j_hop: float | None = None) -> tuple[float, float] | None:
    """Longest contiguous omega run with fidelity >= threshold.

    Returns (omega_low, omega_high) of that run, or None when no point
    reaches the threshold.  Ties go to the slowest-ramp (lowest omega)
    run.  Rows without fidelity (gap rows) are ignored.
    """
    rows = [r for r in result.rows
            if r.fidelity is not None and r.omega is not None
            and (j_hop is None or r.j_hop == j_hop)]
    rows.sort(key=lambda r: r.omega)
    best: tuple[float, float] | None = None
    best_len = 0
    run_start = None
    run_len = 0
    for row in rows:
        if row.fidelity >= threshold:
            if run_start is None:
                run_start = row.omega
                run_len = 0
            run_len += 1
            if run_len > best_len:
                best_len = run_len
                best = (run_start, row.omega)
        else:
            run_start = None
            run_len = 0
    return best
