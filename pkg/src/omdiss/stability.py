"""Linear stability of the fluctuation dynamics.

The fluctuation vector is ``v = (c, c^dagger, d, d^dagger)`` with mechanical
fluctuation ``c`` and cavity fluctuation ``d``; the noise vector is
``n = (eta, eta^dagger, xi_in, xi_in^dagger)``. The linearized Langevin
equations read ``dv/dt = a @ v + b @ n``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import ndimage

from .model import SystemParams, at_detuning, n_denominator
from .noise import force_spectrum

STABLE, MARGINAL, UNSTABLE, POISONED = 1, 0, -1, -2
MARGINAL_EPS = 1e-12


class EigenSolverError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class DriftMatrix:
    a: np.ndarray
    b: np.ndarray


class Verdict(NamedTuple):
    stable: bool
    max_re_eig: float


@dataclass(frozen=True)
class StabilityMap:
    delta_grid: np.ndarray
    coupling_grid: np.ndarray
    which_coupling: str
    stable: np.ndarray
    max_re_eig: np.ndarray
    gamma_tot: np.ndarray
    label: np.ndarray

    def unstable_regions(self):
        """Connected unstable components (4-connectivity) of the map.

        Each entry carries the cell indices and whether the weak-coupling
        criterion ``gamma_tot < 0`` holds anywhere inside it.
        """
        unstable = (self.label == UNSTABLE) | (self.label == MARGINAL)
        labels, count = ndimage.label(unstable)
        regions = []
        for k in range(1, count + 1):
            cells = np.argwhere(labels == k)
            inside = labels == k
            regions.append({
                "cells": cells,
                "delta_range": (float(self.delta_grid[cells[:, 0]].min()),
                                float(self.delta_grid[cells[:, 0]].max())),
                "predicted_by_gamma_tot": bool(np.any(self.gamma_tot[inside] < 0)),
            })
        return regions


def _drift_arrays(p: SystemParams):
    om, ka, ga = p.omega_m, p.kappa, p.gamma
    A, B, ab = p.a_disp, p.b_diss, p.abar
    drive = p.drive
    shape = np.broadcast(om, ka, ga, p.delta, A, B, ab).shape
    a = np.zeros(shape + (4, 4), dtype=complex)
    b = np.zeros(shape + (4, 4), dtype=complex)

    a[..., 0, 0] = -(1j * om + 0.5 * ga)
    a[..., 0, 2] = 1j * A * ka * ab - 0.5j * B * np.conj(drive)
    a[..., 0, 3] = 1j * A * ka * ab - 0.5j * B * drive
    to_c = 1j * A * ka * ab - 0.5 * ka * B * ab - 0.5j * drive * B
    a[..., 2, 0] = to_c
    a[..., 2, 1] = to_c
    a[..., 2, 2] = 1j * p.delta - 0.5 * ka

    b[..., 0, 0] = -np.sqrt(ga)
    b[..., 0, 2] = -0.5 * B * np.sqrt(ka) * ab
    b[..., 0, 3] = 0.5 * B * np.sqrt(ka) * ab
    b[..., 2, 2] = -np.sqrt(ka)

    # daggered rows: conjugate the plain row and swap (1<->2, 3<->4) columns
    swap = [1, 0, 3, 2]
    for src, dst in ((0, 1), (2, 3)):
        a[..., dst, :] = np.conj(a[..., src, swap])
        b[..., dst, :] = np.conj(b[..., src, swap])
    return a, b


def drift_matrix(p: SystemParams) -> DriftMatrix:
    a, b = _drift_arrays(p)
    return DriftMatrix(a, b)


def eigenvalues(p: SystemParams) -> np.ndarray:
    a, _ = _drift_arrays(p)
    try:
        return np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"eigenvalue computation failed: {exc}") from exc


def is_stable(p: SystemParams) -> Verdict:
    """Stable iff every drift eigenvalue has a strictly negative real part."""
    growth = float(np.max(eigenvalues(p).real))
    return Verdict(growth < 0.0, growth)


def characteristic_polynomial(p: SystemParams) -> np.ndarray:
    """Real coefficients of det(s - a), highest power first.

    The eigenvalue set is closed under conjugation, so the imaginary parts
    vanish up to rounding and are dropped.
    """
    a, _ = _drift_arrays(p)
    return np.real(np.poly(a))


def routh_hurwitz(p: SystemParams) -> bool:
    """Hurwitz test on the quartic characteristic polynomial."""
    a0, a1, a2, a3, a4 = characteristic_polynomial(p)
    if a0 < 0:
        a0, a1, a2, a3, a4 = -a0, -a1, -a2, -a3, -a4
    return bool(
        min(a0, a1, a2, a3, a4) > 0
        and a1 * a2 - a0 * a3 > 0
        and a1 * a2 * a3 - a0 * a3**2 - a1**2 * a4 > 0
    )


def upper_half_plane_zeros(p: SystemParams, height: float | None = None,
                           half_width: float | None = None, max_step_phase: float = 0.2) -> int:
    """Count zeros of N(omega) with Im(omega) > 0 via the argument principle.

    N has poles only in the lower half plane, so the winding number of N
    around a large rectangle resting on the real axis counts its unstable zeros.
    """
    scale = p.omega_m + abs(p.delta) + p.kappa + p.gamma \
        + p.abar * (p.kappa * abs(p.a_disp) + abs(p.b_diss) * (abs(p.delta) + p.kappa))
    height = height or 4.0 * scale
    half_width = half_width or 8.0 * scale
    corners = [complex(-half_width, 0.0), complex(half_width, 0.0),
               complex(half_width, height), complex(-half_width, height)]

    total = 0.0
    for z0, z1 in zip(corners, corners[1:] + corners[:1]):
        total += _phase_change(p, z0, z1, max_step_phase)
    return int(round(total / (2.0 * np.pi)))


def _phase_change(p, z0, z1, max_step):
    # adaptive subdivision until no single step rotates N by more than max_step
    t = np.linspace(0.0, 1.0, 257)
    for _ in range(40):
        vals = n_denominator(p, z0 + (z1 - z0) * t)
        steps = np.angle(vals[1:] / vals[:-1])
        big = np.abs(steps) > max_step
        if not np.any(big):
            return float(np.sum(steps))
        mids = 0.5 * (t[:-1][big] + t[1:][big])
        t = np.sort(np.concatenate([t, mids]))
    raise RuntimeError("argument-principle contour could not be resolved")


def stability_map(base: SystemParams, delta_grid, coupling_grid, which_coupling: str = "B",
                  mode: str = "fixed-abar") -> StabilityMap:
    """Evaluate the drift-matrix verdict and the weak-coupling total damping on a grid.

    Rows follow ``delta_grid``, columns ``coupling_grid``. Coupling values are
    effective strengths (``A*abar`` or ``B*abar``) at the amplitude of ``base``.
    """
    deltas = np.asarray(delta_grid, dtype=float)
    couplings = np.asarray(coupling_grid, dtype=float)
    if deltas.size == 0 or couplings.size == 0:
        raise ValueError("grids must be nonempty")
    if which_coupling not in ("A", "B"):
        raise ValueError("which_coupling must be 'A' or 'B'")
    if base.abar == 0:
        raise ValueError("base.abar must be nonzero to express effective couplings")

    dd, cc = np.meshgrid(deltas, couplings, indexing="ij")
    swept = at_detuning(base, dd, mode)
    # coupling axis is referenced to abar of ``base``; in fixed-drive mode the
    # products A*abar, B*abar then fall off with |delta| like abar does
    raw = cc / base.abar
    swept = swept.replace(**({"a_disp": raw} if which_coupling == "A" else {"b_diss": raw}))

    a, _ = _drift_arrays(swept)
    growth = np.full(dd.shape, np.nan)
    try:
        growth = np.max(np.linalg.eigvals(a).real, axis=-1)
    except np.linalg.LinAlgError:
        for idx in np.ndindex(dd.shape):
            try:
                growth[idx] = np.max(np.linalg.eigvals(a[idx]).real)
            except np.linalg.LinAlgError:
                growth[idx] = np.nan

    gamma_tot = swept.gamma + force_spectrum(swept, swept.omega_m) - force_spectrum(swept, -swept.omega_m)
    gamma_tot = np.broadcast_to(gamma_tot, dd.shape).astype(float)

    eps = MARGINAL_EPS * base.kappa
    label = np.where(growth < -eps, STABLE, np.where(growth > eps, UNSTABLE, MARGINAL))
    label = np.where(np.isnan(growth), POISONED, label)
    stable = np.where(np.isnan(growth), False, growth < 0)
    return StabilityMap(deltas, couplings, which_coupling, stable, growth, gamma_tot, label)
