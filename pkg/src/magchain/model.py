"""Chain geometry, coupling schedule, and the single-excitation Hamiltonian.

The chain alternates cavity and magnon modes: N unit cells of (cavity,
magnon) plus one closing cavity, for D = 2N + 1 sites ordered

    a1, m1, a2, m2, ..., aN, mN, a(N+1).

In the single-excitation subspace the Hamiltonian is a real symmetric
D x D matrix with three coupling families, all in units of the intercell
amplitude g0_prime (hbar = 1, so time is measured in 1/g0_prime):

    a_k -- m_k      g  = g0       * (1 - cos theta)   intracell
    m_k -- a_(k+1)  g' = g0_prime * (1 + cos theta)   intercell
    a_k -- a_(k+1)  J                                 direct cavity hop

Ramping theta from 0 to pi swaps which sublattice bond dominates, which
is what carries the in-gap edge mode from one end to the other.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass

import numpy as np


class SiteKind(enum.Enum):
    """Which sublattice a site belongs to."""

    CAVITY = "cavity"
    MAGNON = "magnon"


@dataclass(frozen=True)
class ChainSpec:
    """Static description of one chain.

    n_cells is the number of (cavity, magnon) unit cells; the chain has
    n_cells + 1 cavities in total.  g0 and j_hop are expressed in units
    of g0_prime, which is the global energy unit and must stay positive
    (zero would degenerate the schedule everywhere).
    """

    n_cells: int
    g0: float = 1.0
    g0_prime: float = 1.0
    j_hop: float = 0.0

    def __post_init__(self) -> None:
        if isinstance(self.n_cells, bool) or not isinstance(self.n_cells, (int, np.integer)):
            raise ValueError("n_cells must be an integer")
        if self.n_cells < 1:
            raise ValueError("n_cells must be >= 1")
        for name in ("g0", "g0_prime", "j_hop"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite")
        if self.g0 < 0:
            raise ValueError("g0 must be nonnegative")
        if self.g0_prime <= 0:
            raise ValueError("g0_prime must be positive (it sets the energy unit)")
        if self.j_hop < 0:
            raise ValueError("j_hop must be nonnegative")

    @property
    def dim(self) -> int:
        """Single-excitation Hilbert-space dimension, 2*n_cells + 1."""
        return 2 * self.n_cells + 1


@dataclass(frozen=True)
class CouplingPoint:
    """Instantaneous couplings produced by the schedule at one angle."""

    theta: float
    g: float
    g_prime: float
    j_hop: float


_LABEL_RE = re.compile(r"^([am])([0-9]+)$")


@dataclass(frozen=True)
class SiteIndex:
    """1-based address of a site on one sublattice.

    Cavity k lives at flat index 2*(k-1) and magnon k at 2*k - 1
    (0-based), matching the a1, m1, a2, ... ordering.
    """

    kind: SiteKind
    ordinal: int

    def __post_init__(self) -> None:
        if self.ordinal < 1:
            raise ValueError("site ordinal is 1-based and must be >= 1")

    @property
    def flat_index(self) -> int:
        if self.kind is SiteKind.CAVITY:
            return 2 * (self.ordinal - 1)
        return 2 * self.ordinal - 1

    @property
    def label(self) -> str:
        prefix = "a" if self.kind is SiteKind.CAVITY else "m"
        return f"{prefix}{self.ordinal}"

    @classmethod
    def from_label(cls, text: str) -> "SiteIndex":
        """Parse a compact label such as 'a1' or 'm3'."""
        m = _LABEL_RE.match(text.strip().lower())
        if m is None:
            raise ValueError(f"bad site label {text!r}; expected 'a<k>' or 'm<k>'")
        kind = SiteKind.CAVITY if m.group(1) == "a" else SiteKind.MAGNON
        return cls(kind, int(m.group(2)))

    def in_range(self, spec: ChainSpec) -> bool:
        if self.kind is SiteKind.CAVITY:
            return self.ordinal <= spec.n_cells + 1
        return self.ordinal <= spec.n_cells


def site_labels(spec: ChainSpec) -> list[str]:
    """Labels of all sites in flat order: a1, m1, a2, ..., a(N+1)."""
    labels = []
    for k in range(1, spec.n_cells + 1):
        labels.append(f"a{k}")
        labels.append(f"m{k}")
    labels.append(f"a{spec.n_cells + 1}")
    return labels


def schedule(spec: ChainSpec, theta: float) -> CouplingPoint:
    """Couplings at pump angle theta (2*pi periodic).

    g grows from 0 at theta=0 to 2*g0 at theta=pi while g_prime shrinks
    from 2*g0_prime to 0, so the dominant bond swaps sublattices over a
    half period.  j_hop is theta independent.  Both returned couplings
    are nonnegative for every real theta because |cos| <= 1.
    """
    c = math.cos(theta)
    return CouplingPoint(
        theta=float(theta),
        g=spec.g0 * (1.0 - c),
        g_prime=spec.g0_prime * (1.0 + c),
        j_hop=spec.j_hop,
    )


def build_hamiltonian(spec: ChainSpec, theta: float, detuning: float = 0.0) -> np.ndarray:
    """Dense real symmetric Hamiltonian at pump angle theta.

    Rows and columns follow the flat site order of SiteIndex.  The
    diagonal is zero in the resonant frame; a uniform detuning adds
    detuning * I, which shifts spectra but is only a global phase in
    the dynamics.
    """
    point = schedule(spec, theta)
    dim = spec.dim
    h = np.zeros((dim, dim))
    for k in range(spec.n_cells):
        a_k = 2 * k
        m_k = 2 * k + 1
        a_next = 2 * k + 2
        h[a_k, m_k] = h[m_k, a_k] = point.g
        h[m_k, a_next] = h[a_next, m_k] = point.g_prime
        h[a_k, a_next] = h[a_next, a_k] = point.j_hop
    if detuning != 0.0:
        np.fill_diagonal(h, detuning)
    return h


def basis_state(spec: ChainSpec, site: SiteIndex) -> np.ndarray:
    """Unit vector (complex dtype) with all amplitude on one site."""
    if not site.in_range(spec):
        raise IndexError(
            f"site {site.label} is out of range for a chain with n_cells={spec.n_cells}"
        )
    state = np.zeros(spec.dim, dtype=np.complex128)
    state[site.flat_index] = 1.0
    return state
