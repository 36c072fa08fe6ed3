"""Human-readable run configuration: `key = value` lines.

Grammar: one `key = value` assignment per line; blank lines and text
after `#` are ignored; keys are case-insensitive; list values are
comma-separated.  Unknown and duplicate keys are rejected with the
offending line number.  All physical parameters are validated before
any computation runs.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from ..experiments import Preset
from ..model import ChainSpec, SiteIndex


class ConfigError(ValueError):
    """Malformed configuration text or invalid parameter values."""


@dataclass
class RunConfig:
    """Everything a CLI run needs: chain, ramp, sweep grid, and outputs.

    theta_start/theta_end stay None until a command picks its own
    default window (spectra scan a full period, ramps a half period).
    """

    preset: str = "PhotonJ0"
    n_cells: int = 10
    g0: float = 1.0
    g0_prime: float = 1.0
    j_hop: float = 0.0
    detuning: float = 0.0
    omega: float = 0.03
    omega_min: float = 1e-4
    omega_max: float = 1e-1
    omega_points: int = 41
    j_values: list[float] | None = None
    n_values: list[int] | None = None
    theta: float = math.pi / 4.0
    theta_start: float | None = None
    theta_end: float | None = None
    theta_points: int = 201
    initial_site: str | None = None
    target_site: str | None = None
    init_mode: str = "basis"
    snapshot_count: int = 200
    out_dir: str = "."
    plots: bool = True
    workers: int | None = None

    def chain_spec(self) -> ChainSpec:
        try:
            return ChainSpec(n_cells=self.n_cells, g0=self.g0,
                             g0_prime=self.g0_prime, j_hop=self.j_hop)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def omega_grid(self) -> np.ndarray:
        if self.omega_points == 1:
            return np.array([self.omega_min])
        return np.logspace(math.log10(self.omega_min), math.log10(self.omega_max),
                           self.omega_points)

    def ramp_window(self) -> tuple[float, float]:
        start = 0.0 if self.theta_start is None else self.theta_start
        end = math.pi if self.theta_end is None else self.theta_end
        return start, end

    def scan_window(self) -> tuple[float, float]:
        start = 0.0 if self.theta_start is None else self.theta_start
        end = 2.0 * math.pi if self.theta_end is None else self.theta_end
        return start, end

    def updated(self, **changes) -> "RunConfig":
        """A copy with the given fields replaced, re-validated."""
        merged = dataclasses.replace(self, **changes)
        merged.validate()
        return merged

    def validate(self) -> None:
        try:
            Preset.from_name(self.preset)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        self.chain_spec()
        if not math.isfinite(self.detuning):
            raise ConfigError("detuning must be finite")
        if not (self.omega > 0) or not math.isfinite(self.omega):
            raise ConfigError("omega must be positive")
        if self.omega_min <= 0 or self.omega_max <= 0:
            raise ConfigError("omega_min and omega_max must be positive")
        if self.omega_points < 1:
            raise ConfigError("omega_points must be >= 1")
        if self.omega_points > 1 and self.omega_min >= self.omega_max:
            raise ConfigError("omega_min must be below omega_max")
        if self.theta_points < 1:
            raise ConfigError("theta_points must be >= 1")
        for name in ("theta", "theta_start", "theta_end"):
            value = getattr(self, name)
            if value is not None and not math.isfinite(value):
                raise ConfigError(f"{name} must be finite")
        if self.snapshot_count < 0:
            raise ConfigError("snapshot_count must be >= 0")
        if self.init_mode not in ("basis", "gap-state"):
            raise ConfigError("init_mode must be 'basis' or 'gap-state'")
        if self.workers is not None and self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.j_values is not None and not self.j_values:
            raise ConfigError("j_values must not be empty")
        if self.j_values is not None and any(j < 0 for j in self.j_values):
            raise ConfigError("j_values must be nonnegative")
        if self.n_values is not None and any(n < 1 for n in self.n_values):
            raise ConfigError("n_values must be >= 1")
        chain = self.chain_spec()
        for field_name in ("initial_site", "target_site"):
            label = getattr(self, field_name)
            if label is None:
                continue
            try:
                site = SiteIndex.from_label(label)
            except ValueError as exc:
                raise ConfigError(f"{field_name}: {exc}") from None
            if not site.in_range(chain):
                raise ConfigError(
                    f"{field_name} {label!r} is out of range for n_cells={self.n_cells}"
                )


_INT_KEYS = {"n_cells", "omega_points", "theta_points", "snapshot_count", "workers"}
_FLOAT_KEYS = {"g0", "g0_prime", "j_hop", "detuning", "omega", "omega_min",
               "omega_max", "theta", "theta_start", "theta_end"}
_STR_KEYS = {"preset", "initial_site", "target_site", "init_mode", "out_dir"}
_BOOL_KEYS = {"plots"}
_FLOAT_LIST_KEYS = {"j_values"}
_INT_LIST_KEYS = {"n_values"}
_ALL_KEYS = (_INT_KEYS | _FLOAT_KEYS | _STR_KEYS | _BOOL_KEYS
             | _FLOAT_LIST_KEYS | _INT_LIST_KEYS)


def _parse_bool(raw: str) -> bool:
    lowered = raw.lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def parse_config(text: str) -> RunConfig:
    """Parse and validate configuration text into a RunConfig."""
    values: dict = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw_line.strip()!r}")
        key, _, raw_value = line.partition("=")
        key = key.strip().lower()
        raw_value = raw_value.strip()
        if key not in _ALL_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if not raw_value:
            raise ConfigError(f"line {lineno}: empty value for {key!r}")
        try:
            if key in _INT_KEYS:
                values[key] = int(raw_value)
            elif key in _FLOAT_KEYS:
                values[key] = float(raw_value)
            elif key in _BOOL_KEYS:
                values[key] = _parse_bool(raw_value)
            elif key in _FLOAT_LIST_KEYS:
                values[key] = [float(part) for part in raw_value.split(",") if part.strip()]
            elif key in _INT_LIST_KEYS:
                values[key] = [int(part) for part in raw_value.split(",") if part.strip()]
            else:
                values[key] = raw_value.strip("'\"")
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from None
    config = RunConfig(**values)
    config.validate()
    return config


def load_config(path: str) -> RunConfig:
    """Read and parse a configuration file."""
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    return parse_config(text)
