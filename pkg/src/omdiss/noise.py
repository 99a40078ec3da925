"""Weak-coupling (quantum noise) picture of the mechanical oscillator.

The radiation backaction is summarised by the force spectrum
``s_ff(omega) = kappa * abar**2 * |alpha(omega)|**2``; its values at
``-omega_m`` and ``+omega_m`` are the amplification and cooling rates.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .model import SystemParams, UnstableError, ConvergenceError, alpha, self_energy
from .quadrature import QuadratureSettings


class UndefinedDetuningError(ValueError):
    """Special detunings need a nonzero dissipative coupling."""


@dataclass(frozen=True)
class WeakCouplingReport:
    gamma_up: float
    gamma_down: float
    gamma_opt: float
    n_opt: float
    n_osc: float
    delta_omega_m: float
    gamma_tot: float


def force_spectrum(p: SystemParams, omega):
    """Backaction force spectrum in rate units (Fano profile when ``b_diss != 0``)."""
    return p.kappa * p.abar**2 * np.abs(alpha(p, omega)) ** 2


def rates(p: SystemParams) -> WeakCouplingReport:
    """Amplification/cooling rates; ``n_osc`` and ``delta_omega_m`` are left as NaN.

    ``n_opt`` is ``inf`` whenever ``gamma_opt <= 0``: no backaction-limited
    occupancy exists without net optical damping.
    """
    up = float(force_spectrum(p, -p.omega_m))
    down = float(force_spectrum(p, p.omega_m))
    g_opt = down - up
    n_opt = up / g_opt if g_opt > 0 else math.inf
    return WeakCouplingReport(up, down, g_opt, n_opt, math.nan, math.nan, p.gamma + g_opt)


def freq_shift(p: SystemParams) -> float:
    """Optical spring shift Re[Sigma(omega_m)]."""
    return float(np.real(self_energy(p, p.omega_m)))


def optical_damping_from_self_energy(p: SystemParams) -> float:
    return float(-2.0 * np.imag(self_energy(p, p.omega_m)))


def _pv_core(p, settings, half_width):
    # Fold onto omega >= 0: the kernel 1/(w_m - w) - 1/(w_m + w) is odd, so only
    # s(w) - s(-w) survives, and the remaining pole sits at w = omega_m.
    om = p.omega_m

    def numer(w):
        return -2.0 * w * (force_spectrum(p, w) - force_spectrum(p, -w)) / (om + w)

    core, err_core = integrate.quad(
        numer, 0.0, half_width, weight="cauchy", wvar=om,
        limit=settings.limit, epsabs=settings.epsabs, epsrel=settings.epsrel,
    )
    tail, err_tail = integrate.quad(
        lambda w: numer(w) / (w - om), half_width, np.inf,
        limit=settings.limit, epsabs=settings.epsabs, epsrel=settings.epsrel,
    )
    return (core + tail) / (2.0 * np.pi), (err_core + err_tail) / (2.0 * np.pi)


def freq_shift_integral(p: SystemParams, quad: QuadratureSettings | None = None) -> float:
    """Optical spring shift from the principal-value integral over the force spectrum.

    Independent of the self-energy; agrees with :func:`freq_shift`.
    """
    settings = quad or QuadratureSettings()
    half = settings.window * p.omega_m
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, _ = _pv_core(p, settings, half)
            check, _ = _pv_core(p, settings, 2.0 * half)
        except integrate.IntegrationWarning as exc:
            raise ConvergenceError(f"principal-value integral did not converge: {exc}") from exc
    scale = max(abs(value), abs(check), settings.epsabs)
    if abs(value - check) > settings.check_rtol * scale:
        raise ConvergenceError(
            f"principal-value integral changed from {value!r} to {check!r} on doubling the window"
        )
    return value


def occupancy(p: SystemParams) -> float:
    """Steady-state phonon number (gamma*n_th + gamma_opt*n_opt) / gamma_tot."""
    r = rates(p)
    if r.gamma_tot <= 0:
        raise UnstableError(f"total damping {r.gamma_tot!r} <= 0, no steady state")
    # gamma_opt * n_opt == gamma_up, which stays finite when n_opt does not
    return (p.gamma * p.n_th + r.gamma_up) / r.gamma_tot


def weak_coupling_report(p: SystemParams) -> WeakCouplingReport:
    r = rates(p)
    n_osc = (p.gamma * p.n_th + r.gamma_up) / r.gamma_tot if r.gamma_tot > 0 else math.nan
    return WeakCouplingReport(
        gamma_up=r.gamma_up,
        gamma_down=r.gamma_down,
        gamma_opt=r.gamma_opt,
        n_opt=r.n_opt,
        n_osc=n_osc,
        delta_omega_m=freq_shift(p),
        gamma_tot=r.gamma_tot,
    )


def special_detunings(p: SystemParams, omega) -> tuple:
    """Return ``(delta_zero(omega), delta_opt)``.

    ``delta_zero(omega) = -omega/2 + kappa*A/B`` zeroes the force spectrum at
    ``omega``; ``delta_opt = delta_zero(-omega_m)`` removes the amplification rate.
    """
    if np.any(np.asarray(p.b_diss) == 0):
        raise UndefinedDetuningError("special detunings require b_diss != 0")
    offset = p.kappa * p.a_disp / p.b_diss
    return -0.5 * np.asarray(omega) + offset, 0.5 * p.omega_m + offset


def sign_regions(values, tol: float = 0.0) -> int:
    """Number of maximal runs of constant sign, ignoring entries with ``|v| <= tol``."""
    v = np.asarray(values, dtype=float)
    s = np.sign(v[np.abs(v) > tol])
    if s.size == 0:
        return 0
    return int(np.count_nonzero(np.diff(s)) + 1)
