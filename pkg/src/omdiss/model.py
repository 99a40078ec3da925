"""Operating point and shared response kernels.

Conventions used throughout the package:

* Rates are in arbitrary units; ``kappa = 1`` is the natural choice.
* Time dependence ``exp(-i*omega*t)``; Fourier transforms obey
  ``Q^dagger(omega) = [Q(-omega)]^dagger``.
* The steady-state intracavity amplitude ``abar`` is real and nonnegative
  (global phase gauged away), the uncoupled steady state is used
  (``xbar = 0``), and the drive amplitude is derived from it,
  ``Omega = abar * (delta + i*kappa/2)``.
* The zero-point length never appears: force spectra are reported as
  ``x0**2 * S_FF``, a rate.

All kernels broadcast over ``omega`` and over array-valued parameters.
"""
from __future__ import annotations

from dataclasses import dataclass, fields, replace

import numpy as np


class PoleError(ZeroDivisionError):
    """A response function was evaluated exactly on an undamped pole."""


class UnstableError(RuntimeError):
    """A quantity that presumes a stable operating point was requested at an unstable one."""


class ConvergenceError(RuntimeError):
    """A numerical integration did not reach the requested accuracy."""


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters of one operating point.

    ``a_disp`` and ``b_diss`` are the dimensionless dispersive and dissipative
    couplings; the products ``a_disp*abar`` and ``b_diss*abar`` set the
    effective coupling strengths.
    """

    omega_m: float = 3.0
    kappa: float = 1.0
    gamma: float = 3e-5
    delta: float = -3.0
    a_disp: float = 0.0
    b_diss: float = 0.0
    abar: float = 1.0
    n_th: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not np.all(np.isfinite(value)) or np.iscomplexobj(value):
                raise ValueError(f"{f.name} must be real and finite, got {value!r}")
        if np.any(np.asarray(self.kappa) <= 0):
            raise ValueError("kappa must be > 0")
        if np.any(np.asarray(self.omega_m) <= 0):
            raise ValueError("omega_m must be > 0")
        for name in ("gamma", "n_th", "abar"):
            if np.any(np.asarray(getattr(self, name)) < 0):
                raise ValueError(f"{name} must be >= 0")

    @property
    def drive(self):
        """Drive amplitude ``Omega`` implied by ``abar`` and ``delta``."""
        return self.abar * (self.delta + 0.5j * self.kappa)

    def replace(self, **changes) -> "SystemParams":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def at_detuning(p: SystemParams, delta, mode: str = "fixed-abar") -> SystemParams:
    """Move the operating point to a new detuning.

    ``fixed-abar`` keeps the intracavity amplitude and lets the drive follow;
    ``fixed-drive`` keeps ``|Omega|`` of ``p`` and rescales ``abar``.
    """
    if mode == "fixed-abar":
        return p.replace(delta=delta)
    if mode == "fixed-drive":
        drive = np.abs(p.drive)
        return p.replace(delta=delta, abar=drive / np.abs(delta + 0.5j * p.kappa))
    raise ValueError(f"unknown sweep mode {mode!r}")


def cavity_response(p: SystemParams, omega):
    """chi_c(omega) = 1 / (kappa/2 - i(omega + delta))."""
    return 1.0 / (0.5 * p.kappa - 1j * (omega + p.delta))


def inverse_mech_response(p: SystemParams, omega):
    return 0.5 * p.gamma - 1j * (omega - p.omega_m)


def mech_response(p: SystemParams, omega):
    """chi_m(omega) = 1 / (gamma/2 - i(omega - omega_m))."""
    inv = inverse_mech_response(p, omega)
    if np.any(inv == 0):
        raise PoleError("mechanical response evaluated on its pole (gamma = 0, omega = omega_m)")
    return 1.0 / inv


def alpha(p: SystemParams, omega):
    """Coupling amplitude alpha(omega) of bath noise onto the mechanics.

    Sum of the cavity-filtered dispersive part and the dissipative part, whose
    constant term is the direct bath-mechanics channel.
    """
    chi = cavity_response(p, omega)
    disp = 1j * chi * p.a_disp * p.kappa
    diss = 0.5 * p.b_diss * (1.0 - chi * (1j * p.delta + 0.5 * p.kappa))
    return disp + diss


def self_energy_parts(p: SystemParams, omega):
    """The dispersive, dissipative and cross self-energy terms, in that order."""
    chi = cavity_response(p, omega)
    # conj(chi_c(-conj(w))) is the analytic continuation of chi_c*(-w) off the real axis
    chi_mirror = np.conj(cavity_response(p, -np.conj(omega)))
    n_phot = p.abar**2
    up = 1j * p.delta + 0.5 * p.kappa
    dn = 1j * p.delta - 0.5 * p.kappa
    sig_a = -1j * (p.a_disp * p.kappa * p.abar) ** 2 * (chi - chi_mirror)
    sig_b = 1j * (0.5 * p.b_diss) ** 2 * n_phot * (chi * up**2 - chi_mirror * dn**2)
    sig_ab = p.b_diss * p.a_disp * p.kappa * n_phot * (chi * up - chi_mirror * dn)
    return sig_a, sig_b, sig_ab


def self_energy(p: SystemParams, omega):
    """Optomechanical self-energy Sigma(omega)."""
    sig_a, sig_b, sig_ab = self_energy_parts(p, omega)
    return sig_a + sig_b + sig_ab


def n_denominator(p: SystemParams, omega):
    """N(omega) = chi_m^-1(omega) conj(chi_m^-1(-omega)) + 2 omega_m Sigma(omega).

    Its zeros in the upper half plane are the unstable modes.
    """
    inv = inverse_mech_response(p, omega)
    inv_mirror = np.conj(inverse_mech_response(p, -np.conj(omega)))
    return inv * inv_mirror + 2.0 * p.omega_m * self_energy(p, omega)
