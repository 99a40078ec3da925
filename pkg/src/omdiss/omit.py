"""Response of the driven system to a weak probe at detuning delta_probe = omega_p - omega_d.

All amplitudes are normalised by the probe amplitude, so probe power never
enters; the probe is treated strictly linearly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    SystemParams,
    alpha,
    cavity_response,
    inverse_mech_response,
    n_denominator,
)


@dataclass(frozen=True)
class OMITResponse:
    delta_probe: np.ndarray
    a_minus: np.ndarray
    a_plus: np.ndarray
    a_minus_approx: np.ndarray
    a_plus_approx: np.ndarray


def anti_stokes(p: SystemParams, delta_probe):
    """Output amplitude at the probe frequency, A^- / d_probe."""
    d = np.asarray(delta_probe)
    bare = 1.0 - p.kappa * cavity_response(p, d)
    # alpha squared, not its modulus
    return bare + 2j * p.kappa * p.omega_m * p.abar**2 * alpha(p, d) ** 2 / n_denominator(p, d)


def stokes(p: SystemParams, delta_probe):
    """Output amplitude at the mirror frequency, A^+ / conj(d_probe)."""
    d = np.asarray(delta_probe)
    return (-2j * p.kappa * p.omega_m * p.abar**2 * np.conj(alpha(p, d)) * alpha(p, -d)
            / n_denominator(p, -d))


def truncated_self_energy(p: SystemParams, omega):
    """Self-energy keeping only the part with weight near omega = +omega_m."""
    chi = cavity_response(p, omega)
    up = 1j * p.delta + 0.5 * p.kappa
    n_phot = p.abar**2
    return chi * (
        -1j * (p.a_disp * p.kappa * p.abar) ** 2
        + 1j * (0.5 * p.b_diss) ** 2 * n_phot * up**2
        + p.b_diss * p.a_disp * p.kappa * n_phot * up
    )


def anti_stokes_approx(p: SystemParams, delta_probe):
    """Resolved-sideband approximation of A^- / d_probe (anti-Stokes scattering only).

    The matching Stokes amplitude is identically zero.
    """
    d = np.asarray(delta_probe)
    bare = 1.0 - p.kappa * cavity_response(p, d)
    denom = inverse_mech_response(p, d) + 1j * truncated_self_energy(p, d)
    return bare - p.kappa * p.abar**2 * alpha(p, d) ** 2 / denom


def omit_response(p: SystemParams, delta_probe) -> OMITResponse:
    d = np.asarray(delta_probe, dtype=float)
    return OMITResponse(
        delta_probe=d,
        a_minus=np.asarray(anti_stokes(p, d)),
        a_plus=np.asarray(stokes(p, d)),
        a_minus_approx=np.asarray(anti_stokes_approx(p, d)),
        a_plus_approx=np.zeros(d.shape, dtype=complex),
    )


def homodyne_quadrature(a, theta=0.0):
    """Re[exp(i theta) a]; theta = 0 gives the in-phase quadrature."""
    return np.real(np.exp(1j * np.asarray(theta)) * a)
