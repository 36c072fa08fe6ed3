"""CSV and manifest serialization.

All floats are written with 17 significant digits so parsing a file
reproduces the in-memory doubles bit-exactly.  Files are UTF-8 with LF
line endings.  The run manifest (JSON) is written atomically, after all
data files succeeded, and records their sha256 checksums for the
`verify` subcommand.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
import tempfile

import numpy as np

from .. import __version__
from ..experiments import SweepResult, SweepRow
from ..spectral import SpectrumScan
from .config import ConfigError


def format_float(value: float | None) -> str:
    """17-significant-digit text for a float; empty string for None."""
    if value is None:
        return ""
    return format(float(value), ".17g")


def parse_optional_float(text: str) -> float | None:
    return None if text == "" else float(text)


def _open_csv(path):
    return open(path, "w", encoding="utf-8", newline="")


def emit_spectrum_csv(scan: SpectrumScan, path: str) -> str:
    """One row per (theta, level): header theta,level_index,energy."""
    if scan.thetas.size == 0:
        raise ValueError("cannot emit an empty spectrum scan")
    with _open_csv(path) as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["theta", "level_index", "energy"])
        for i, theta in enumerate(scan.thetas):
            theta_text = format_float(theta)
            for level in range(scan.dim):
                writer.writerow([theta_text, level, format_float(scan.energies[i, level])])
    return path


def read_spectrum_csv(path: str) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of emit_spectrum_csv: (thetas, energies) arrays."""
    thetas: list[float] = []
    rows: list[list[float]] = []
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        if header != ["theta", "level_index", "energy"]:
            raise ValueError(f"unexpected spectrum header: {header}")
        for record in reader:
            theta, level, energy = float(record[0]), int(record[1]), float(record[2])
            if level == 0:
                thetas.append(theta)
                rows.append([])
            rows[-1].append(energy)
    return np.array(thetas), np.array(rows)


_SWEEP_HEADER = ["preset", "n_cells", "g0", "g0_prime", "j_hop", "omega",
                 "fidelity", "norm_drift", "wall_time", "gap_width"]


def emit_sweep_csv(result: SweepResult, path: str) -> str:
    """One row per sweep point; optional columns are left empty."""
    if not result.rows:
        raise ValueError("cannot emit an empty sweep result")
    with _open_csv(path) as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(_SWEEP_HEADER)
        for row in result.rows:
            writer.writerow([
                row.preset,
                row.n_cells,
                format_float(row.g0),
                format_float(row.g0_prime),
                format_float(row.j_hop),
                format_float(row.omega),
                format_float(row.fidelity),
                format_float(row.norm_drift),
                format_float(row.wall_time),
                format_float(row.gap_width),
            ])
    return path


def read_sweep_csv(path: str) -> SweepResult:
    """Inverse of emit_sweep_csv."""
    rows: list[SweepRow] = []
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        if header != _SWEEP_HEADER:
            raise ValueError(f"unexpected sweep header: {header}")
        for record in reader:
            rows.append(SweepRow(
                preset=record[0],
                n_cells=int(record[1]),
                g0=float(record[2]),
                g0_prime=float(record[3]),
                j_hop=float(record[4]),
                omega=parse_optional_float(record[5]),
                fidelity=parse_optional_float(record[6]),
                norm_drift=parse_optional_float(record[7]),
                wall_time=float(record[8]),
                gap_width=parse_optional_float(record[9]),
            ))
    return SweepResult(rows=rows)


def emit_population_csv(snapshots, site_labels: list[str], path: str) -> str:
    """Site probabilities over time: header time,<site labels...>."""
    if not snapshots:
        raise ValueError("cannot emit an empty snapshot list")
    with _open_csv(path) as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["time"] + list(site_labels))
        for t, probs in snapshots:
            writer.writerow([format_float(t)] + [format_float(p) for p in probs])
    return path


def emit_edge_state_csv(site_labels: list[str], analytic: np.ndarray,
                        numeric: np.ndarray, path: str) -> str:
    """Analytic vs numeric gap-state amplitudes per site."""
    if len(site_labels) == 0:
        raise ValueError("cannot emit an empty edge-state table")
    with _open_csv(path) as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["site", "label", "analytic_amplitude",
                         "numeric_amplitude", "numeric_probability"])
        for i, label in enumerate(site_labels):
            writer.writerow([
                i,
                label,
                format_float(float(analytic[i])),
                format_float(float(numeric[i])),
                format_float(float(abs(numeric[i]) ** 2)),
            ])
    return path


def sha256_file(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def write_manifest(path: str, config_echo: dict, output_paths: list[str],
                   total_wall_time: float) -> str:
    """Atomically write the run manifest after all outputs succeeded.

    Output paths are stored relative to the manifest's directory so the
    manifest stays valid when the whole directory moves.
    """
    base_dir = os.path.dirname(os.path.abspath(path))
    outputs = []
    for out in output_paths:
        outputs.append({
            "path": os.path.relpath(os.path.abspath(out), base_dir),
            "sha256": sha256_file(out),
            "bytes": os.path.getsize(out),
        })
    manifest = {
        "artifact_version": __version__,
        "config": config_echo,
        "outputs": outputs,
        "total_wall_time_s": total_wall_time,
    }
    fd, tmp_path = tempfile.mkstemp(dir=base_dir, suffix=".manifest.tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            json.dump(manifest, handle, indent=2, sort_keys=True)
            handle.write("\n")
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise
    return path


def verify_manifest(path: str) -> tuple[bool, list[str]]:
    """Check every file recorded in a manifest against its checksum.

    Returns (all_ok, per-file report lines).  A malformed manifest is a
    configuration error; missing or altered files are reported as
    failures in the lines.
    """
    try:
        with open(path, encoding="utf-8") as handle:
            manifest = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read manifest {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"manifest {path} is not valid JSON: {exc}") from None
    if not isinstance(manifest, dict) or "outputs" not in manifest:
        raise ConfigError(f"manifest {path} has no 'outputs' list")
    base_dir = os.path.dirname(os.path.abspath(path))
    lines = []
    all_ok = True
    for entry in manifest["outputs"]:
        rel = entry.get("path")
        expected = entry.get("sha256")
        if not isinstance(rel, str) or not isinstance(expected, str):
            raise ConfigError(f"manifest {path} has a malformed output entry: {entry}")
        target = os.path.join(base_dir, rel)
        if not os.path.exists(target):
            lines.append(f"MISSING  {rel}")
            all_ok = False
            continue
        actual = sha256_file(target)
        if actual == expected:
            lines.append(f"OK       {rel}")
        else:
            lines.append(f"MISMATCH {rel}")
            all_ok = False
    return all_ok, lines
