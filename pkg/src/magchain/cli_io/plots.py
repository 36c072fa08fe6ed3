"""Static SVG line plots, hand-rolled (no plotting dependency).

Plots render the standard panels: spectrum branches over the pump
angle, site probability profiles, fidelity against log10 of the ramp
rate, site populations over time, and gap width against chain length.
Plotting only reads result objects; it never touches the data files.
"""

from __future__ import annotations

import math

import numpy as np

from ..experiments import SweepResult
from ..spectral import SpectrumScan

_WIDTH, _HEIGHT = 640, 420
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 72, 24, 42, 52
_PALETTE = ["#1b6ca8", "#d1495b", "#2e8b57", "#e08d2e",
            "#7d5ba6", "#3aa6a6", "#8a5a44", "#4d4d4d"]


class _Frame:
    """Maps data coordinates onto the pixel plot area."""

    def __init__(self, xlo, xhi, ylo, yhi):
        if xhi <= xlo:
            pad = max(abs(xlo), 1.0) * 0.05 + 1e-12
            xlo, xhi = xlo - pad, xhi + pad
        if yhi <= ylo:
            pad = max(abs(ylo), 1.0) * 0.05 + 1e-12
            ylo, yhi = ylo - pad, yhi + pad
        self.xlo, self.xhi, self.ylo, self.yhi = xlo, xhi, ylo, yhi

    def x(self, v) -> float:
        span = _WIDTH - _MARGIN_L - _MARGIN_R
        return _MARGIN_L + (v - self.xlo) / (self.xhi - self.xlo) * span

    def y(self, v) -> float:
        span = _HEIGHT - _MARGIN_T - _MARGIN_B
        return _HEIGHT - _MARGIN_B - (v - self.ylo) / (self.yhi - self.ylo) * span


def _fmt(v: float) -> str:
    return f"{v:.4g}"


def _axes(frame: _Frame, title: str, xlabel: str, ylabel: str) -> list[str]:
    parts = [
        f'<rect x="0" y="0" width="{_WIDTH}" height="{_HEIGHT}" fill="#ffffff"/>',
        f'<text x="{_WIDTH / 2:.1f}" y="24" text-anchor="middle" '
        f'font-family="monospace" font-size="14">{title}</text>',
    ]
    x0, x1 = _MARGIN_L, _WIDTH - _MARGIN_R
    y0, y1 = _HEIGHT - _MARGIN_B, _MARGIN_T
    parts.append(f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="#000" stroke-width="1"/>')
    parts.append(f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="#000" stroke-width="1"/>')
    for tick in np.linspace(frame.xlo, frame.xhi, 6):
        px = frame.x(tick)
        parts.append(f'<line x1="{px:.1f}" y1="{y0}" x2="{px:.1f}" y2="{y0 + 5}" stroke="#000"/>')
        parts.append(f'<text x="{px:.1f}" y="{y0 + 18}" text-anchor="middle" '
                     f'font-family="monospace" font-size="11">{_fmt(tick)}</text>')
    for tick in np.linspace(frame.ylo, frame.yhi, 6):
        py = frame.y(tick)
        parts.append(f'<line x1="{x0 - 5}" y1="{py:.1f}" x2="{x0}" y2="{py:.1f}" stroke="#000"/>')
        parts.append(f'<text x="{x0 - 8}" y="{py + 4:.1f}" text-anchor="end" '
                     f'font-family="monospace" font-size="11">{_fmt(tick)}</text>')
    parts.append(f'<text x="{(x0 + x1) / 2:.1f}" y="{_HEIGHT - 14}" text-anchor="middle" '
                 f'font-family="monospace" font-size="12">{xlabel}</text>')
    parts.append(f'<text x="18" y="{(y0 + y1) / 2:.1f}" text-anchor="middle" '
                 f'font-family="monospace" font-size="12" '
                 f'transform="rotate(-90 18 {(y0 + y1) / 2:.1f})">{ylabel}</text>')
    return parts


def _polyline(frame: _Frame, xs, ys, color: str, width: float = 1.5,
              dash: str | None = None) -> str:
    points = " ".join(f"{frame.x(x):.2f},{frame.y(y):.2f}" for x, y in zip(xs, ys))
    dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
    return (f'<polyline points="{points}" fill="none" stroke="{color}" '
            f'stroke-width="{width}"{dash_attr}/>')


def _document(parts: list[str]) -> str:
    body = "\n".join(parts)
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
            f'height="{_HEIGHT}" viewBox="0 0 {_WIDTH} {_HEIGHT}">\n{body}\n</svg>\n')


def _write(path: str, parts: list[str]) -> str:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(_document(parts))
    return path


def plot_spectrum(scan: SpectrumScan, path: str, title: str = "energy spectrum") -> str:
    """All level branches over theta; the mid-gap branch highlighted."""
    if scan.thetas.size == 0:
        raise ValueError("cannot plot an empty spectrum scan")
    frame = _Frame(float(scan.thetas[0]), float(scan.thetas[-1]),
                   float(scan.energies.min()), float(scan.energies.max()))
    parts = _axes(frame, title, "theta", "energy")
    for level in range(scan.dim):
        color = "#d1495b" if level == scan.gap_state_index else "#9aa5b1"
        width = 2.0 if level == scan.gap_state_index else 1.0
        parts.append(_polyline(frame, scan.thetas, scan.energies[:, level], color, width))
    return _write(path, parts)


def plot_state_profile(probabilities: np.ndarray, path: str,
                       labels: list[str] | None = None,
                       title: str = "state distribution") -> str:
    """Probability per site as bars."""
    probs = np.asarray(probabilities, dtype=float)
    if probs.size == 0:
        raise ValueError("cannot plot an empty probability profile")
    frame = _Frame(-0.5, probs.size - 0.5, 0.0, max(float(probs.max()), 1e-12))
    parts = _axes(frame, title, "site index", "probability")
    bar_px = max(2.0, 0.8 * (_WIDTH - _MARGIN_L - _MARGIN_R) / probs.size)
    base_y = frame.y(0.0)
    for i, p in enumerate(probs):
        cx = frame.x(float(i))
        top = frame.y(float(p))
        parts.append(f'<rect x="{cx - bar_px / 2:.2f}" y="{top:.2f}" width="{bar_px:.2f}" '
                     f'height="{max(base_y - top, 0.0):.2f}" fill="#1b6ca8"/>')
    if labels is not None and len(labels) <= 24:
        for i, label in enumerate(labels):
            cx = frame.x(float(i))
            parts.append(f'<text x="{cx:.1f}" y="{_HEIGHT - _MARGIN_B + 32}" text-anchor="middle" '
                         f'font-family="monospace" font-size="9">{label}</text>')
    return _write(path, parts)


def plot_fidelity_sweep(result: SweepResult, path: str,
                        vline_log10_omega: float | None = None,
                        threshold: float | None = None,
                        title: str = "transfer fidelity") -> str:
    """Fidelity against log10(omega), one curve per j_hop value."""
    series = result.fidelity_series()
    if not series:
        raise ValueError("cannot plot an empty sweep (no fidelity rows)")
    all_logs = np.concatenate([np.log10(om) for _, om, _ in series])
    frame = _Frame(float(all_logs.min()), float(all_logs.max()), 0.0, 1.0)
    parts = _axes(frame, title, "log10(omega)", "fidelity")
    for idx, (j, omegas, fids) in enumerate(series):
        color = _PALETTE[idx % len(_PALETTE)]
        parts.append(_polyline(frame, np.log10(omegas), fids, color, 1.8))
        parts.append(f'<text x="{_WIDTH - _MARGIN_R - 6}" y="{_MARGIN_T + 16 + 14 * idx}" '
                     f'text-anchor="end" font-family="monospace" font-size="11" '
                     f'fill="{color}">j_hop={_fmt(j)}</text>')
    if vline_log10_omega is not None and frame.xlo <= vline_log10_omega <= frame.xhi:
        px = frame.x(vline_log10_omega)
        parts.append(f'<line x1="{px:.1f}" y1="{frame.y(0.0):.1f}" x2="{px:.1f}" '
                     f'y2="{frame.y(1.0):.1f}" stroke="#555" stroke-width="1" '
                     f'stroke-dasharray="5,4"/>')
        parts.append(f'<text x="{px + 4:.1f}" y="{frame.y(1.0) + 12:.1f}" '
                     f'font-family="monospace" font-size="10" fill="#555">'
                     f'log10(omega)={_fmt(vline_log10_omega)}</text>')
    if threshold is not None:
        py = frame.y(threshold)
        parts.append(f'<line x1="{frame.x(frame.xlo):.1f}" y1="{py:.1f}" '
                     f'x2="{frame.x(frame.xhi):.1f}" y2="{py:.1f}" stroke="#888" '
                     f'stroke-width="1" stroke-dasharray="2,3"/>')
    return _write(path, parts)


def plot_population(snapshots, site_labels: list[str], path: str,
                    title: str = "site populations") -> str:
    """Per-site probability curves over time."""
    if not snapshots:
        raise ValueError("cannot plot an empty snapshot list")
    times = np.array([t for t, _ in snapshots])
    probs = np.vstack([p for _, p in snapshots])
    frame = _Frame(float(times[0]), float(times[-1]), 0.0, 1.0)
    parts = _axes(frame, title, "time", "population")
    for site in range(probs.shape[1]):
        color = _PALETTE[site % len(_PALETTE)]
        parts.append(_polyline(frame, times, probs[:, site], color, 1.4))
    if len(site_labels) <= 10:
        for site, label in enumerate(site_labels):
            color = _PALETTE[site % len(_PALETTE)]
            parts.append(f'<text x="{_WIDTH - _MARGIN_R - 6}" y="{_MARGIN_T + 16 + 13 * site}" '
                         f'text-anchor="end" font-family="monospace" font-size="11" '
                         f'fill="{color}">{label}</text>')
    return _write(path, parts)


def plot_gap_vs_length(result: SweepResult, path: str,
                       title: str = "gap width vs chain length") -> str:
    """Minimum spectral gap against the unit-cell count."""
    rows = [r for r in result.rows if r.gap_width is not None]
    if not rows:
        raise ValueError("cannot plot an empty gap-width result")
    rows.sort(key=lambda r: r.n_cells)
    ns = np.array([r.n_cells for r in rows], dtype=float)
    widths = np.array([r.gap_width for r in rows])
    frame = _Frame(float(ns.min()), float(ns.max()), 0.0, float(widths.max()) * 1.05)
    parts = _axes(frame, title, "unit cells", "gap width")
    parts.append(_polyline(frame, ns, widths, "#1b6ca8", 1.8))
    for n, w in zip(ns, widths):
        parts.append(f'<circle cx="{frame.x(n):.2f}" cy="{frame.y(w):.2f}" r="3.5" '
                     f'fill="#d1495b"/>')
    return _write(path, parts)
