import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from omdiss.model import (
    PoleError,
    SystemParams,
    alpha,
    at_detuning,
    cavity_response,
    mech_response,
    n_denominator,
    self_energy,
    self_energy_parts,
)


def test_cavity_response_on_resonance():
    p = SystemParams(delta=-3.0)
    assert cavity_response(p, 3.0) == pytest.approx(2.0)


def test_dispersive_self_energy_hand_value():
    # chi_c(3) = 2 and conj(chi_c(-3)) = 1/(0.5 - 6i) at delta = -3
    p = SystemParams(a_disp=0.1)
    expected = -0.01j * (2.0 - 1.0 / (0.5 - 6j))
    assert self_energy(p, 3.0) == pytest.approx(expected, rel=1e-14)


def test_dissipative_alpha_hand_value():
    # 0.2 * (1 - 2 * (0.5 - 3i)) = 1.2i
    p = SystemParams(b_diss=0.4)
    assert alpha(p, 3.0) == pytest.approx(1.2j, rel=1e-14)


def test_only_products_with_abar_matter():
    p = SystemParams(a_disp=0.2, b_diss=0.3, abar=1.0, delta=-1.7)
    q = p.replace(a_disp=0.1, b_diss=0.15, abar=2.0)
    w = np.linspace(-6, 6, 11)
    np.testing.assert_allclose(self_energy(p, w), self_energy(q, w), rtol=1e-13)


def test_parts_sum_to_total():
    p = SystemParams(a_disp=0.2, b_diss=0.3, delta=1.1)
    w = np.linspace(-4, 4, 9)
    np.testing.assert_allclose(sum(self_energy_parts(p, w)), self_energy(p, w))


def test_n_denominator_without_coupling():
    p = SystemParams(gamma=0.01)
    w = 3.0
    expected = (0.005) * (0.005 - 6j)
    assert n_denominator(p, w) == pytest.approx(expected, rel=1e-14)


def test_mechanical_pole_raises():
    with pytest.raises(PoleError):
        mech_response(SystemParams(gamma=0.0), 3.0)


@pytest.mark.parametrize("field,value", [
    ("kappa", 0.0), ("omega_m", -1.0), ("gamma", -1e-3), ("n_th", -1.0),
    ("abar", -0.1), ("delta", float("nan")), ("b_diss", float("inf")),
])
def test_invalid_parameters_rejected(field, value):
    with pytest.raises(ValueError):
        SystemParams(**{field: value})


def test_fixed_drive_keeps_drive_modulus():
    p = SystemParams(delta=-3.0, abar=2.0)
    q = at_detuning(p, 1.0, "fixed-drive")
    assert abs(q.drive) == pytest.approx(abs(p.drive))
    # closer to resonance, the same drive fills the cavity more
    assert q.abar > p.abar
    assert at_detuning(p, 1.0).abar == p.abar
    with pytest.raises(ValueError):
        at_detuning(p, 1.0, "sideways")


params = st.builds(
    SystemParams,
    omega_m=st.floats(0.5, 10),
    kappa=st.floats(0.1, 5),
    gamma=st.floats(0, 0.1),
    delta=st.floats(-20, 20),
    a_disp=st.floats(-0.5, 0.5),
    b_diss=st.floats(-0.5, 0.5),
)


@settings(max_examples=60, deadline=None)
@given(params, st.floats(-30, 30))
def test_real_axis_mirror_symmetry(p, w):
    # Sigma(-w) = conj Sigma(w) and the same for N on the real axis
    scale = 1.0 + abs(self_energy(p, w))
    assert abs(self_energy(p, -w) - np.conj(self_energy(p, w))) <= 1e-12 * scale
    nscale = 1.0 + abs(n_denominator(p, w))
    assert abs(n_denominator(p, -w) - np.conj(n_denominator(p, w))) <= 1e-12 * nscale


@settings(max_examples=40, deadline=None)
@given(params, st.floats(-10, 10), st.floats(0.01, 5))
def test_self_energy_analytic_off_axis(p, x, y):
    # Cauchy-Riemann: d/dz along real and imaginary directions agree
    z, h = complex(x, y), 1e-6
    dx = (self_energy(p, z + h) - self_energy(p, z - h)) / (2 * h)
    dy = (self_energy(p, z + 1j * h) - self_energy(p, z - 1j * h)) / (2j * h)
    assert abs(dx - dy) <= 1e-5 * (1.0 + abs(dx))
