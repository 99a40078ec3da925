"""Linear-response toolkit for optomechanical systems with dispersive and dissipative coupling."""
from .model import (
    SystemParams,
    PoleError,
    UnstableError,
    ConvergenceError,
    at_detuning,
    cavity_response,
    mech_response,
    alpha,
    self_energy,
    n_denominator,
)
from .quadrature import QuadratureSettings
from .noise import (
    WeakCouplingReport,
    UndefinedDetuningError,
    force_spectrum,
    rates,
    freq_shift,
    freq_shift_integral,
    occupancy,
    special_detunings,
    weak_coupling_report,
)
from .spectra import SpectrumSeries, s_cc, s_dd, s_dd_out, spectrum, phonon_number
from .modes import EigenPair, critical_coupling, min_split_detuning
from .stability import DriftMatrix, StabilityMap, drift_matrix, is_stable, routh_hurwitz, stability_map
from .omit import OMITResponse, anti_stokes, stokes, anti_stokes_approx, homodyne_quadrature, omit_response
from .oracle import oracle_spectra, oracle_probe_response, SingularSolveError

__version__ = "0.1.0"
