"""Normal modes of the rotating-wave two-mode model.

Keeping only the beam-splitter coupling ``g c d^dagger + h.c.`` between
cavity ``d`` (energy ``-delta - i kappa/2``) and mechanics ``c`` (energy
``omega_m - i gamma/2``), with ``g = B*Omega/2 - A*abar*kappa``, the two
complex mode energies are ``mean +/- sqrt((diff/2)**2 + |g|**2)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import SystemParams


@dataclass(frozen=True)
class EigenPair:
    e_plus: complex
    e_minus: complex

    @property
    def gap(self) -> float:
        return float(self.e_plus.real - self.e_minus.real)

    @property
    def linewidths(self) -> tuple:
        return -2.0 * self.e_plus.imag, -2.0 * self.e_minus.imag


def coupling_element(p: SystemParams) -> complex:
    return 0.5 * p.b_diss * p.drive - p.a_disp * p.abar * p.kappa


def eigenvalues(p: SystemParams, damping: bool = True) -> EigenPair:
    """Mode energies; ``damping=False`` drops kappa and gamma from the diagonal.

    E+ is the mode with the larger real part.
    """
    kappa, gamma = (p.kappa, p.gamma) if damping else (0.0, 0.0)
    cav = -p.delta - 0.5j * kappa
    mech = p.omega_m - 0.5j * gamma
    mean = 0.5 * (cav + mech)
    g = 0.5 * p.b_diss * p.abar * (p.delta + 0.5j * kappa) - p.a_disp * p.abar * p.kappa
    root = np.sqrt(complex(0.25 * (cav - mech) ** 2 + abs(g) ** 2))
    first, second = mean + root, mean - root
    if second.real > first.real:
        first, second = second, first
    return EigenPair(complex(first), complex(second))


def critical_coupling(p: SystemParams) -> tuple:
    """Onset of mode splitting at ``delta = -omega_m``: (A*abar, B*abar) thresholds.

    Only ``omega_m``, ``kappa`` and ``gamma`` of ``p`` are used.
    """
    if p.kappa <= p.gamma:
        raise ValueError("no splitting threshold for kappa <= gamma")
    dispersive = (p.kappa - p.gamma) / (4.0 * p.kappa)
    dissipative = (p.kappa - p.gamma) / math.sqrt(4.0 * p.omega_m**2 + p.kappa**2)
    return dispersive, dissipative


def min_split_detuning(p: SystemParams) -> float:
    """Detuning of smallest undamped mode splitting for purely dissipative coupling."""
    if p.a_disp != 0:
        raise ValueError("minimal-splitting detuning is defined for a_disp = 0 only")
    return -p.omega_m / (1.0 + (p.b_diss * p.abar) ** 2)
