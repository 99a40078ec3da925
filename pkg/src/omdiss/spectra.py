"""Exact linearized spectra of the mechanics, the cavity and the output field.

Spectra are defined as S_kq(omega) = int dt <k^dagger(t) q(0)> exp(i omega t)
in the frame rotating with the drive, so the mechanical peak sits near
``omega = -omega_m``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import integrate

from .model import (
    SystemParams,
    UnstableError,
    ConvergenceError,
    alpha,
    inverse_mech_response,
    n_denominator,
    self_energy,
)
from .noise import force_spectrum
from .quadrature import QuadratureSettings
from . import stability

KINDS = ("mechanical", "cavity", "output", "force")


@dataclass(frozen=True)
class SpectrumSeries:
    omegas: np.ndarray
    values: np.ndarray
    kind: str
    params: SystemParams
    stable: bool = True
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        om = np.asarray(self.omegas)
        if om.ndim != 1 or np.any(np.diff(om) <= 0):
            raise ValueError("omegas must be a strictly increasing 1-d grid")
        if np.any(np.asarray(self.values) < 0):
            raise ValueError("spectral densities must be nonnegative")


class QuadResult(NamedTuple):
    value: float
    error: float


def s_cc(p: SystemParams, omega):
    """Mechanical spectrum [gamma*sigma_th + kappa*sigma_opt] / |N|^2."""
    sig = self_energy(p, omega)
    inv = inverse_mech_response(p, omega)
    sigma_th = np.abs(sig) ** 2 * (p.n_th + 1) + np.abs(inv + 1j * sig) ** 2 * p.n_th
    sigma_opt = np.abs(inv) ** 2 * p.abar**2 * np.abs(alpha(p, omega)) ** 2
    return (p.gamma * sigma_th + p.kappa * sigma_opt) / np.abs(n_denominator(p, omega)) ** 2


def _bracket_over_n(p, omega):
    # shared factor of the cavity and output spectra
    bracket = (
        4.0 * p.kappa * p.abar**2 * p.omega_m**2 * np.abs(alpha(p, omega)) ** 2
        + p.gamma * np.abs(inverse_mech_response(p, -omega)) ** 2 * (p.n_th + 1)
        + p.gamma * np.abs(inverse_mech_response(p, omega)) ** 2 * p.n_th
    )
    return bracket / np.abs(n_denominator(p, omega)) ** 2


def s_dd(p: SystemParams, omega):
    """Intracavity field spectrum."""
    filtered = np.abs(alpha(p, -omega) - 0.5 * p.b_diss) ** 2
    return p.abar**2 * filtered * _bracket_over_n(p, omega)


def s_dd_out(p: SystemParams, omega):
    """Output field spectrum.

    Written in product form so the removable 0/0 where
    alpha(-omega) = B/2 never arises; vanishes exactly where the force
    spectrum at -omega does.
    """
    return p.kappa * p.abar**2 * np.abs(alpha(p, -omega)) ** 2 * _bracket_over_n(p, omega)


_EVALUATORS = {
    "mechanical": s_cc,
    "cavity": s_dd,
    "output": s_dd_out,
    "force": force_spectrum,
}


def spectrum(p: SystemParams, omegas, kind: str = "mechanical") -> SpectrumSeries:
    """Sample one spectrum on a grid, flagged with the stability of ``p``."""
    if kind not in _EVALUATORS:
        raise ValueError(f"kind must be one of {KINDS}")
    om = np.asarray(omegas, dtype=float)
    values = np.asarray(_EVALUATORS[kind](p, om), dtype=float)
    return SpectrumSeries(om, values, kind, p, stable=stability.is_stable(p).stable)


def _breakpoints(p: SystemParams, eig: np.ndarray) -> np.ndarray:
    pts = [p.omega_m, -p.omega_m, p.delta, -p.delta]
    if p.delta != 0:
        pts.append((p.kappa**2 - 4.0 * p.delta**2) / (4.0 * p.delta))
    # a drift eigenvalue lam gives a spectral pole at omega = i*lam: centre -Im(lam), half-width |Re(lam)|
    for lam in eig:
        centre, width = -lam.imag, max(abs(lam.real), 1e-300)
        pts.append(centre)
        for k in (1.0, 10.0, 100.0, 1000.0):
            pts.extend((centre - k * width, centre + k * width))
    return np.unique(np.asarray(pts, dtype=float))


def phonon_number(p: SystemParams, quad: QuadratureSettings | None = None) -> QuadResult:
    """Mean phonon number int S_cc(omega) d omega / 2 pi with an error estimate."""
    settings = quad or QuadratureSettings()
    eig = stability.eigenvalues(p)
    if np.max(eig.real) >= 0:
        raise UnstableError("phonon number is undefined at an unstable operating point")

    pts = _breakpoints(p, eig)
    lo, hi = pts[0], pts[-1]
    pieces = [(-np.inf, lo)] + list(zip(pts[:-1], pts[1:])) + [(hi, np.inf)]

    total = err = 0.0
    f = lambda w: s_cc(p, w)
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        for a, b in pieces:
            try:
                val, e = integrate.quad(f, a, b, limit=settings.limit,
                                        epsabs=settings.epsabs, epsrel=settings.epsrel)
            except integrate.IntegrationWarning as exc:
                raise ConvergenceError(f"S_cc integral on [{a}, {b}] did not converge: {exc}") from exc
            total += val
            err += e
    return QuadResult(total / (2.0 * np.pi), err / (2.0 * np.pi))
