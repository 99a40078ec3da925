"""Independent frequency-domain solution of the linearized Langevin equations.

Nothing here uses the closed-form self-energy, alpha or N; the only shared
input is the drift matrix. In Fourier space (time dependence exp(-i w t))

    v(w) = G(w) n(w),    G(w) = (-i w I - a)^-1 b,

with ``v = (c, c^dag, d, d^dag)`` and ``n = (eta, eta^dag, xi, xi^dag)``.
Noise moments obey <n_i(w) n_j(w')> = 2 pi delta(w + w') C_ij, so every
spectrum S_kq(w) = int dw'/2pi <k^dag(w) q(w')> is the finite contraction

    S_kq(w) = sum_ij G_{k^dag, i}(w) C_ij G_{q, j}(-w).

The output field is xi_out = xi + sqrt(kappa) d + sqrt(kappa) (B abar / 2)(c + c^dag).
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .model import SystemParams
from .stability import drift_matrix

# row/column index maps for v and n
C, C_DAG, D, D_DAG = 0, 1, 2, 3
ETA, ETA_DAG, XI, XI_DAG = 0, 1, 2, 3

COND_LIMIT = 1e13


class SingularSolveError(np.linalg.LinAlgError):
    """The linear response is (numerically) singular at this frequency."""


class OracleSpectra(NamedTuple):
    s_cc: np.ndarray
    s_dd: np.ndarray
    s_dd_out: np.ndarray
    s_xx: np.ndarray


def noise_correlators(n_th: float) -> np.ndarray:
    """C_ij with <n_i(w) n_j(w')> = 2 pi delta(w + w') C_ij."""
    corr = np.zeros((4, 4))
    corr[ETA, ETA_DAG] = n_th + 1.0
    corr[ETA_DAG, ETA] = n_th
    corr[XI, XI_DAG] = 1.0
    return corr


def transfer(p: SystemParams, omega) -> np.ndarray:
    """G(w) stacked over ``omega``: shape omega.shape + (4, 4)."""
    dm = drift_matrix(p)
    w = np.asarray(omega, dtype=float)
    lhs = -1j * w[..., None, None] * np.eye(4) - dm.a
    cond = np.linalg.cond(lhs)
    if np.any(~np.isfinite(cond) | (cond > COND_LIMIT)):
        bad = np.atleast_1d(w)[np.atleast_1d(~np.isfinite(cond) | (cond > COND_LIMIT))]
        raise SingularSolveError(f"response matrix singular at omega = {bad[:5]}; perturb omega")
    return np.linalg.solve(lhs, np.broadcast_to(dm.b, lhs.shape))


def _output_rows(p: SystemParams, g: np.ndarray):
    """Noise coefficients of xi_out and xi_out^dag."""
    sk = np.sqrt(p.kappa)
    mech = 0.5 * sk * p.b_diss * p.abar * (g[..., C, :] + g[..., C_DAG, :])
    out = sk * g[..., D, :] + mech
    out_dag = sk * g[..., D_DAG, :] + mech
    out = out + np.eye(4)[XI]
    out_dag = out_dag + np.eye(4)[XI_DAG]
    return out, out_dag


def _contract(left, corr, right):
    return np.real(np.einsum("...i,ij,...j->...", left, corr, right))


def oracle_spectra(p: SystemParams, omega) -> OracleSpectra:
    w = np.asarray(omega, dtype=float)
    g_pos = transfer(p, w)
    g_neg = transfer(p, -w)
    corr = noise_correlators(p.n_th)
    out_pos, out_dag_pos = _output_rows(p, g_pos)
    out_neg, _ = _output_rows(p, g_neg)
    x_pos = g_pos[..., C, :] + g_pos[..., C_DAG, :]
    x_neg = g_neg[..., C, :] + g_neg[..., C_DAG, :]
    return OracleSpectra(
        s_cc=_contract(g_pos[..., C_DAG, :], corr, g_neg[..., C, :]),
        s_dd=_contract(g_pos[..., D_DAG, :], corr, g_neg[..., D, :]),
        s_dd_out=_contract(out_dag_pos, corr, out_neg),
        s_xx=_contract(x_pos, corr, x_neg),
    )


def oracle_probe_response(p: SystemParams, delta_probe):
    """Coherent drive of xi at +delta (and of xi^dag at -delta) mapped to the output.

    Returns ``(a_minus, a_plus)`` normalised by the probe amplitude and its conjugate.
    """
    d = np.asarray(delta_probe, dtype=float)
    out_at_probe, _ = _output_rows(p, transfer(p, d))
    out_at_mirror, _ = _output_rows(p, transfer(p, -d))
    return out_at_probe[..., XI], out_at_mirror[..., XI_DAG]
