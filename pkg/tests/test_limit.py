import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from bbmstuff.errors import DomainError, TailBoundError
from bbmstuff.functions import DEFAULT_RADIUS, get_function
from bbmstuff.limit import (
    H0Evaluator,
    Variant,
    grad_energy,
    h0_aniso,
    h0_closed_log,
    h0_closed_log_grouped,
    h0_closed_varexp,
    h0_density,
    h0_eval,
    partial_energy,
    sandwich_constants,
    sandwich_slack,
)
from bbmstuff.properties import closed_form_gap
from bbmstuff.quadrature import integrate
from bbmstuff.sphere import moment_K, moment_K_exact, sphere_rule
from bbmstuff.young import PRESETS, DoublePhase, Power, PowerLog, preset


PRESET_NAMES = sorted(PRESETS)


@pytest.mark.parametrize("name", PRESET_NAMES)
@pytest.mark.parametrize("n", [1, 2])
def test_closed_forms_agree_with_quadrature(name, n):
    assert closed_form_gap(preset(name), n, samples=30, seed=n) <= 1e-6


@pytest.mark.parametrize("name", PRESET_NAMES)
@pytest.mark.parametrize("n", [1, 2])
def test_sandwich(name, n):
    rng = np.random.default_rng(11)
    ev = H0Evaluator.for_spec(preset(name), sphere_rule(n, 64))
    x = rng.uniform(-2.0, 2.0, (200, n))
    t = 10.0 ** rng.uniform(-2.0, 2.0, 200)
    assert np.min(sandwich_slack(ev, x, t)) >= -1e-6


def test_variant_selection():
    assert H0Evaluator.for_spec(Power(2.0)).variant is Variant.POWER
    assert H0Evaluator.for_spec(PowerLog(2.0)).variant is Variant.LOG
    assert H0Evaluator.for_spec(preset("varexp")).variant is Variant.VAREXP
    assert H0Evaluator.for_spec(preset("plog1p")).variant is Variant.GENERIC
    ev = H0Evaluator.for_spec(Power(2.0), closed=False)
    assert ev.variant is Variant.GENERIC
    # the enum value is accepted too
    ev = H0Evaluator(Power(2.0), sphere_rule(1), variant="closed-power")
    assert ev.variant is Variant.POWER


def test_power_limit_in_one_dimension():
    ev = H0Evaluator.for_spec(Power(2.0))
    t = np.array([0.0, 0.5, 2.0])
    np.testing.assert_allclose(h0_eval(ev, np.zeros((3, 1)), t), t**2)
    assert sandwich_constants(Power(3.0), 1) == pytest.approx((2 / 3, 2 / 3))


def test_double_phase_limit_formula():
    spec = preset("doublephase")
    rule = sphere_rule(2, 512)
    ev = H0Evaluator.for_spec(spec, rule)
    x = np.array([[0.0, 0.0], [0.3, -0.8], [2.0, 2.0]])
    t = np.array([0.7, 1.3, 3.0])
    a = spec.coefficient(x, x)
    expected = moment_K(2, 2.0, rule) * t**2 + a * moment_K(2, 3.0, rule) * t**3
    np.testing.assert_allclose(ev(x, t), expected, rtol=1e-14)


def test_log_grouping_in_one_dimension():
    t = np.geomspace(0.01, 100.0, 41)
    grouped = h0_closed_log_grouped(1.5, 2.0, 1, t)
    nodewise = h0_closed_log(1.5, 2.0, 1, t, None)
    np.testing.assert_allclose(grouped, nodewise, rtol=1e-12)


@seed(20240605)
@settings(max_examples=30, deadline=None)
@given(
    t=st.floats(1e-2, 1e2),
    lam=st.floats(0.1, 10.0),
    name=st.sampled_from(PRESET_NAMES),
)
def test_limit_inherits_growth(t, lam, name):
    spec = preset(name)
    b = spec.bounds
    ev = H0Evaluator.for_spec(spec, sphere_rule(2, 64))
    x = np.array([[0.2, 0.1]])
    base = float(ev(x, t)[0])
    scaled = float(ev(x, lam * t)[0])
    low = min(lam**b.p_minus, lam**b.p_plus) * base
    high = max(lam**b.p_minus, lam**b.p_plus) * base
    assert low * (1 - 1e-9) <= scaled <= high * (1 + 1e-9)


def test_anisotropic_limit():
    assert float(h0_aniso(Power(3.0), np.zeros(1), 1.5)) == pytest.approx(2.25)
    spec = DoublePhase(2.0, 3.0)
    value = float(h0_aniso(spec, np.zeros((1, 2)), 2.0)[0])
    assert value == pytest.approx(4.0 + 2.0 * 8.0 / 3.0, rel=1e-12)


def test_density():
    ev = H0Evaluator.for_spec(Power(2.0))
    assert float(h0_density(ev, np.zeros(1), 1.5)) == pytest.approx(3.0)
    at_zero = float(h0_density(ev, np.zeros(1), 0.0))
    assert at_zero == pytest.approx(0.0, abs=1e-5)


def test_shallow_radial_mesh_is_reported():
    ev = H0Evaluator(Power(2.0), sphere_rule(1), radial_levels=2)
    with pytest.raises(TailBoundError) as info:
        ev(np.zeros(1), 1.0)
    assert info.value.bound > info.value.tolerance


def test_invalid_arguments():
    ev = H0Evaluator.for_spec(Power(2.0), dimension=2)
    with pytest.raises(DomainError):
        ev(np.zeros(2), -1.0)
    with pytest.raises(DomainError):
        ev(np.zeros(3), 1.0)
    with pytest.raises(DomainError):
        H0Evaluator(Power(2.0), sphere_rule(1), radial_levels=0)


def test_gradient_energy_of_cosbump():
    u = get_function("cosbump", 1)
    ev = H0Evaluator.for_spec(Power(2.0))
    expected = np.pi**2 / (4.0 * DEFAULT_RADIUS)
    assert grad_energy(ev, u) == pytest.approx(expected, rel=1e-10)
    assert grad_energy(ev.generic(), u) == pytest.approx(expected, rel=1e-8)
    assert grad_energy(ev, get_function("zero", 1)) == 0.0


def test_double_phase_energy_in_one_dimension():
    spec = preset("doublephase")
    u = get_function("polybump", 1)
    ev = H0Evaluator.for_spec(spec)
    rule = u.spatial_rule()

    def direct(x):
        slope = np.abs(u.grad(x)[:, 0])
        return slope**2 + spec.coefficient(x, x) * (2.0 / 3.0) * slope**3

    assert grad_energy(ev, u) == pytest.approx(
        integrate(rule, direct), rel=1e-12
    )


def test_partial_energy():
    u = get_function("polybump-aniso", 2)
    ev = H0Evaluator.anisotropic(Power(2.0), dimension=2)
    rule = u.spatial_rule()
    for k in (1, 2):
        expected = integrate(rule, lambda x: u.partial(x, k - 1) ** 2)
        assert partial_energy(ev, u, k) == pytest.approx(expected, rel=1e-8)
    with pytest.raises(DomainError):
        partial_energy(ev, u, 0)
    with pytest.raises(DomainError):
        partial_energy(ev, u, 3)


def test_variable_exponent_closed_form():
    p_diag = np.array([2.0, 2.25, 2.5])
    t = np.array([0.5, 1.0, 3.0])
    values = h0_closed_varexp(np.array([1.0, 2.0, 1.0]), p_diag, 2, t)
    expected = [
        a * moment_K_exact(2, p) * level**p
        for a, p, level in zip([1.0, 2.0, 1.0], p_diag, t)
    ]
    np.testing.assert_allclose(values, expected, rtol=1e-6)
