"""Cross-checks of the closed forms against the linear-solve oracle."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import noise, omit, oracle, spectra, stability
from .model import SystemParams, self_energy

SPECTRA_RTOL = 1e-8
PROBE_RTOL = 1e-10
DAMPING_RTOL = 1e-10
# differences at or below this fraction of the largest |reference| sample are
# rounding noise (about 45 ulp); they count as agreement even where the
# reference itself vanishes, e.g. on a Fano zero
ROUNDOFF_FLOOR = 1e-14


def relative_error(value, reference, floor: float = ROUNDOFF_FLOOR) -> np.ndarray:
    """Pointwise |value - reference| / |reference|.

    Where the difference is roundoff, it is measured against the peak instead.
    """
    value = np.asarray(value)
    reference = np.asarray(reference)
    diff = np.abs(value - reference)
    scale = np.max(np.abs(reference)) if reference.size else 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        err = diff / np.abs(reference)
    return np.where(diff <= floor * scale, diff / (scale or 1.0), err)


@dataclass
class CheckResult:
    params: SystemParams
    errors: dict = field(default_factory=dict)
    skipped: str = ""

    def passed(self, tolerances: dict) -> bool:
        return not self.skipped and all(self.errors[k] <= tolerances[k] for k in self.errors)


def compare_spectra(p: SystemParams, omegas) -> dict:
    w = np.asarray(omegas, dtype=float)
    ref = oracle.oracle_spectra(p, w)
    return {
        "s_cc": float(np.max(relative_error(spectra.s_cc(p, w), ref.s_cc))),
        "s_dd": float(np.max(relative_error(spectra.s_dd(p, w), ref.s_dd))),
        "s_dd_out": float(np.max(relative_error(spectra.s_dd_out(p, w), ref.s_dd_out))),
    }


def compare_probe(p: SystemParams, deltas) -> dict:
    d = np.asarray(deltas, dtype=float)
    a_minus, a_plus = oracle.oracle_probe_response(p, d)
    return {
        "a_minus": float(np.max(relative_error(omit.anti_stokes(p, d), a_minus))),
        "a_plus": float(np.max(relative_error(omit.stokes(p, d), a_plus))),
    }


def compare_damping(p: SystemParams) -> float:
    via_rates = noise.rates(p).gamma_opt
    via_sigma = float(-2.0 * np.imag(self_energy(p, p.omega_m)))
    return float(relative_error(via_rates, via_sigma))


def random_battery(n_cases: int = 40, seed: int = 20240917) -> list:
    """Deterministic mix of dispersive, dissipative and mixed operating points."""
    rng = np.random.default_rng(seed)
    cases = []
    for k in range(n_cases):
        omega_m = rng.uniform(0.5, 8.0)
        a_eff, b_eff = rng.uniform(0.02, 0.5, size=2)
        kind = k % 3
        if kind == 0:
            b_eff = 0.0
        elif kind == 1:
            a_eff = 0.0
        cases.append(SystemParams(
            omega_m=omega_m,
            kappa=1.0,
            gamma=10 ** rng.uniform(-4, -1),
            delta=rng.uniform(-2.0, 2.0) * omega_m,
            a_disp=a_eff,
            b_diss=b_eff,
            abar=1.0,
            n_th=rng.uniform(0.0, 100.0),
        ))
    return cases


def run_battery(cases, n_omega: int = 401, n_probe: int = 101) -> list:
    results = []
    for p in cases:
        verdict = stability.is_stable(p)
        if not verdict.stable:
            results.append(CheckResult(p, skipped=f"unstable (max Re eig {verdict.max_re_eig:.3g})"))
            continue
        omegas = np.linspace(-2 * p.omega_m, 2 * p.omega_m, n_omega)
        errors = compare_spectra(p, omegas)
        errors.update(compare_probe(p, np.linspace(-2 * p.omega_m, 2 * p.omega_m, n_probe)))
        errors["gamma_opt"] = compare_damping(p)
        results.append(CheckResult(p, errors))
    return results


def default_tolerances(scale: float = 1.0) -> dict:
    return {
        "s_cc": SPECTRA_RTOL * scale,
        "s_dd": SPECTRA_RTOL * scale,
        "s_dd_out": SPECTRA_RTOL * scale,
        "a_minus": PROBE_RTOL * scale,
        "a_plus": PROBE_RTOL * scale,
        "gamma_opt": DAMPING_RTOL * scale,
    }
