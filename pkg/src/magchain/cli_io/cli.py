"""Command-line front end.

Subcommands map one-to-one onto the panel families: `spectrum`
(energies over theta), `edge-state` (analytic vs numeric gap state),
`evolve` (a single ramp with population snapshots), `sweep` (custom
fidelity sweep), `preset` (named experiment families), and `verify`
(recheck a run manifest).  Exit codes: 0 success, 2 configuration
error, 3 integration failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

import numpy as np

from .. import __version__
from ..dynamics import IntegrationError, RampProtocol, evolve
from ..experiments import Preset, gap_state, plateau_interval, run_preset, sweep_fidelity
from ..model import SiteIndex, basis_state, site_labels
from ..spectral import analytic_zero_mode, localization_profile, scan_spectrum
from . import emit, plots
from .config import ConfigError, RunConfig, load_config

# threshold markers drawn on preset fidelity plots
_PRESET_VLINES = {Preset.MAGNONIC: -2.3}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key=value configuration file")
    common.add_argument("--out-dir", metavar="DIR", help="output directory (default '.')")
    common.add_argument("--no-plots", action="store_true", help="skip SVG emission")
    common.add_argument("--workers", type=int, help="sweep worker pool size "
                        "(default: MAGCHAIN_WORKERS or a small pool)")
    common.add_argument("--n-cells", type=int, help="number of unit cells N")
    common.add_argument("--g0", type=float, help="intracell coupling amplitude")
    common.add_argument("--g0-prime", type=float, help="intercell coupling amplitude (energy unit)")
    common.add_argument("--j-hop", type=float, help="direct cavity-cavity hop")
    common.add_argument("--detuning", type=float, help="uniform diagonal detuning (spectra only)")

    parser = argparse.ArgumentParser(
        prog="magchain",
        description="Topological state transfer in a 1D cavity-magnon chain",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[common],
                       help="eigenvalues over a theta grid, CSV + SVG")
    p.add_argument("--theta-start", type=float)
    p.add_argument("--theta-end", type=float)
    p.add_argument("--theta-points", type=int)

    p = sub.add_parser("edge-state", parents=[common],
                       help="analytic vs numeric gap state at one angle")
    p.add_argument("--theta", type=float)

    p = sub.add_parser("evolve", parents=[common],
                       help="integrate one ramp and report the fidelity")
    p.add_argument("--omega", type=float)
    p.add_argument("--theta-start", type=float)
    p.add_argument("--theta-end", type=float)
    p.add_argument("--initial-site", metavar="LABEL")
    p.add_argument("--target-site", metavar="LABEL")
    p.add_argument("--init-mode", choices=["basis", "gap-state"])
    p.add_argument("--snapshot-count", type=int)

    p = sub.add_parser("sweep", parents=[common],
                       help="fidelity over a log-spaced omega grid")
    p.add_argument("--omega-min", type=float)
    p.add_argument("--omega-max", type=float)
    p.add_argument("--omega-points", type=int)
    p.add_argument("--initial-site", metavar="LABEL")
    p.add_argument("--target-site", metavar="LABEL")
    p.add_argument("--init-mode", choices=["basis", "gap-state"])

    p = sub.add_parser("preset", parents=[common],
                       help="run a named experiment preset")
    p.add_argument("name", nargs="?", help="preset name (or set `preset` in the config)")
    p.add_argument("--omega-min", type=float)
    p.add_argument("--omega-max", type=float)
    p.add_argument("--omega-points", type=int)
    p.add_argument("--j-values", metavar="LIST", help="comma-separated j_hop values")
    p.add_argument("--n-values", metavar="LIST", help="comma-separated chain lengths")
    p.add_argument("--init-mode", choices=["basis", "gap-state"])

    p = sub.add_parser("verify", help="recheck the checksums in a run manifest")
    p.add_argument("manifest", help="path to a run manifest JSON file")

    return parser


def _merge_config(args: argparse.Namespace) -> RunConfig:
    config = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    overrides = {}
    mapping = {
        "out_dir": "out_dir", "workers": "workers", "n_cells": "n_cells",
        "g0": "g0", "g0_prime": "g0_prime", "j_hop": "j_hop", "detuning": "detuning",
        "theta_start": "theta_start", "theta_end": "theta_end",
        "theta_points": "theta_points", "theta": "theta", "omega": "omega",
        "omega_min": "omega_min", "omega_max": "omega_max", "omega_points": "omega_points",
        "initial_site": "initial_site", "target_site": "target_site",
        "init_mode": "init_mode", "snapshot_count": "snapshot_count",
    }
    for arg_name, key in mapping.items():
        value = getattr(args, arg_name, None)
        if value is not None:
            overrides[key] = value
    if getattr(args, "no_plots", False):
        overrides["plots"] = False
    if getattr(args, "j_values", None) is not None:
        try:
            overrides["j_values"] = [float(part) for part in args.j_values.split(",")]
        except ValueError as exc:
            raise ConfigError(f"--j-values: {exc}") from None
    if getattr(args, "n_values", None) is not None:
        try:
            overrides["n_values"] = [int(part) for part in args.n_values.split(",")]
        except ValueError as exc:
            raise ConfigError(f"--n-values: {exc}") from None
    if getattr(args, "name", None):
        overrides["preset"] = args.name
    try:
        return config.updated(**overrides)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _config_echo(config: RunConfig) -> dict:
    import dataclasses
    return dataclasses.asdict(config)


def _out_path(config: RunConfig, name: str) -> str:
    os.makedirs(config.out_dir, exist_ok=True)
    return os.path.join(config.out_dir, name)


def _finish(config: RunConfig, outputs: list[str], started: float) -> None:
    manifest_path = _out_path(config, "run_manifest.json")
    emit.write_manifest(manifest_path, _config_echo(config), outputs,
                        time.perf_counter() - started)
    for out in outputs + [manifest_path]:
        print(f"wrote {out}")


def _cmd_spectrum(config: RunConfig) -> int:
    started = time.perf_counter()
    spec = config.chain_spec()
    lo, hi = config.scan_window()
    if config.theta_points < 2:
        raise ConfigError("spectrum needs theta_points >= 2")
    thetas = np.linspace(lo, hi, config.theta_points)
    scan = scan_spectrum(spec, thetas, detuning=config.detuning)
    outputs = [emit.emit_spectrum_csv(scan, _out_path(config, "spectrum.csv"))]
    if config.plots:
        outputs.append(plots.plot_spectrum(scan, _out_path(config, "spectrum.svg")))
    mid = scan.energies[:, scan.gap_state_index]
    print(f"scanned {config.theta_points} angles on [{lo:g}, {hi:g}] for D={spec.dim}")
    print(f"mid-gap branch energy range: [{mid.min():.6g}, {mid.max():.6g}]")
    _finish(config, outputs, started)
    return 0


def _cmd_edge_state(config: RunConfig) -> int:
    started = time.perf_counter()
    spec = config.chain_spec()
    theta = config.theta
    analytic = analytic_zero_mode(spec, theta)
    numeric = gap_state(spec, theta).real
    overlap = abs(float(np.dot(analytic.amplitudes, numeric)))
    profile = localization_profile(numeric)
    labels = site_labels(spec)
    outputs = [emit.emit_edge_state_csv(labels, analytic.amplitudes, numeric,
                                        _out_path(config, "edge_state.csv"))]
    if config.plots:
        outputs.append(plots.plot_state_profile(
            profile.probabilities, _out_path(config, "edge_state.svg"), labels,
            title=f"gap state at theta={theta:.4g}"))
    print(f"theta={theta:g}  analytic-numeric overlap={overlap:.12f}")
    if spec.j_hop != 0.0:
        print("note: the closed-form state assumes j_hop=0; overlap is a diagnostic here")
    if not analytic.valid:
        print(f"note: {analytic.note}")
    print(f"edge weight left={profile.edge_weight_left:.6f} "
          f"right={profile.edge_weight_right:.6f} ipr={profile.ipr:.6f}")
    _finish(config, outputs, started)
    return 0


def _endpoint_states(config: RunConfig, spec, theta_start: float, theta_end: float):
    if config.init_mode == "gap-state":
        return gap_state(spec, theta_start), gap_state(spec, theta_end)
    initial_label = config.initial_site or "a1"
    target_label = config.target_site or f"a{spec.n_cells + 1}"
    initial = basis_state(spec, SiteIndex.from_label(initial_label))
    target = basis_state(spec, SiteIndex.from_label(target_label))
    return initial, target


def _cmd_evolve(config: RunConfig) -> int:
    started = time.perf_counter()
    spec = config.chain_spec()
    lo, hi = config.ramp_window()
    if lo == hi:
        raise ConfigError("theta_start and theta_end must differ for a ramp")
    protocol = RampProtocol(omega=config.omega, theta_start=lo, theta_end=hi)
    initial, target = _endpoint_states(config, spec, lo, hi)
    result = evolve(spec, protocol, initial, target,
                    snapshot_count=max(config.snapshot_count, 2))
    labels = site_labels(spec)
    outputs = [emit.emit_population_csv(result.snapshots, labels,
                                        _out_path(config, "population.csv"))]
    if config.plots:
        outputs.append(plots.plot_population(result.snapshots, labels,
                                             _out_path(config, "population.svg")))
    print(f"omega={config.omega:g}  t_final={protocol.t_final:.6g}")
    print(f"fidelity={result.fidelity:.9f}  norm_drift={result.norm_drift:.3e}")
    _finish(config, outputs, started)
    return 0


def _cmd_sweep(config: RunConfig) -> int:
    started = time.perf_counter()
    spec = config.chain_spec()
    lo, hi = config.ramp_window()
    if lo == hi:
        raise ConfigError("theta_start and theta_end must differ for a ramp")
    initial, target = _endpoint_states(config, spec, lo, hi)
    result = sweep_fidelity(spec, config.omega_grid(), initial, target,
                            theta_start=lo, theta_end=hi, workers=config.workers)
    outputs = [emit.emit_sweep_csv(result, _out_path(config, "sweep.csv"))]
    if config.plots:
        outputs.append(plots.plot_fidelity_sweep(result, _out_path(config, "fidelity.svg")))
    best = max(result.rows, key=lambda r: r.fidelity)
    print(f"swept {len(result.rows)} omega points on [{config.omega_min:g}, {config.omega_max:g}]")
    print(f"best fidelity {best.fidelity:.9f} at omega={best.omega:g}")
    _finish(config, outputs, started)
    return 0


def _cmd_preset(config: RunConfig) -> int:
    started = time.perf_counter()
    preset = Preset.from_name(config.preset)
    overrides: dict = {
        "n_cells": config.n_cells, "g0": config.g0, "g0_prime": config.g0_prime,
        "init_mode": config.init_mode, "workers": config.workers,
    }
    # chain parameters follow the preset unless explicitly configured
    defaults = RunConfig()
    for key in ("n_cells", "g0", "g0_prime"):
        if getattr(config, key) == getattr(defaults, key):
            overrides.pop(key)
    if config.j_hop != defaults.j_hop:
        overrides["j_hop"] = config.j_hop
    if (config.omega_min, config.omega_max, config.omega_points) != \
            (defaults.omega_min, defaults.omega_max, defaults.omega_points):
        overrides["omega_grid"] = config.omega_grid()
    if config.j_values is not None:
        overrides["j_values"] = config.j_values
    if config.n_values is not None:
        overrides["n_values"] = config.n_values
    if config.initial_site is not None:
        overrides["initial_site"] = config.initial_site
    if config.target_site is not None:
        overrides["target_site"] = config.target_site
    result = run_preset(preset, overrides)

    csv_name = f"preset_{preset.value}.csv"
    outputs = [emit.emit_sweep_csv(result, _out_path(config, csv_name))]
    if preset is Preset.GAP_VS_LENGTH:
        if config.plots:
            outputs.append(plots.plot_gap_vs_length(result, _out_path(config, "gap_width.svg")))
        for row in result.rows:
            print(f"n_cells={row.n_cells}  gap_width={row.gap_width:.9f}")
    else:
        if config.plots:
            outputs.append(plots.plot_fidelity_sweep(
                result, _out_path(config, "fidelity.svg"),
                vline_log10_omega=_PRESET_VLINES.get(preset), threshold=0.99))
        plateau = plateau_interval(result, threshold=0.99)
        print(f"ran preset {preset.value}: {len(result.rows)} points")
        if plateau is not None:
            print(f"fidelity >= 0.99 plateau: omega in [{plateau[0]:g}, {plateau[1]:g}]")
        else:
            print("fidelity >= 0.99 plateau: none")
    _finish(config, outputs, started)
    return 0


def _cmd_verify(manifest_path: str) -> int:
    ok, lines = emit.verify_manifest(manifest_path)
    for line in lines:
        print(line)
    if ok:
        print(f"manifest {manifest_path}: all {len(lines)} outputs verified")
        return 0
    print(f"manifest {manifest_path}: verification FAILED", file=sys.stderr)
    return 4


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return _cmd_verify(args.manifest)
        config = _merge_config(args)
        handler = {
            "spectrum": _cmd_spectrum,
            "edge-state": _cmd_edge_state,
            "evolve": _cmd_evolve,
            "sweep": _cmd_sweep,
            "preset": _cmd_preset,
        }[args.command]
        return handler(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except IntegrationError as exc:
        print(f"integration error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, IndexError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    raise SystemExit(main())
