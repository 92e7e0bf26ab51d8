from dataclasses import replace

import numpy as np
import pytest

from bbmstuff.errors import DomainError, TailBoundError
from bbmstuff.functions import DEFAULT_RADIUS, get_function
from bbmstuff.limit import H0Evaluator, grad_energy, partial_energy
from bbmstuff.modular import (
    MONTE_CARLO,
    SamplingPlan,
    local_modular,
    modular_aniso,
    modular_Js,
    sample_differences,
    scaled_modular,
)
from bbmstuff.young import Power, preset


@pytest.fixture
def cosbump():
    return get_function("cosbump", 1)


@pytest.fixture
def plan():
    return SamplingPlan()


@pytest.fixture
def mc_plan():
    return SamplingPlan(method=MONTE_CARLO, samples=100_000, seed=3)


def test_zero_function_has_zero_modular(plan, mc_plan):
    u = get_function("zero", 1)
    for p in (plan, mc_plan):
        result = modular_Js(preset("doublephase"), u, 0.7, p)
        assert result.value == 0.0
        assert result.scaled_value == 0.0
        assert result.tail_bound == 0.0


def test_split_and_far_bound(cosbump, plan):
    result = modular_Js(preset("doublephase"), cosbump, 0.5, plan)
    assert result.value == result.near_field + result.far_field
    assert 0.0 < result.far_field <= result.far_bound
    assert result.mc_stderr is None
    assert result.scaled_value == pytest.approx(0.5 * result.value)


def test_homogeneity_of_the_power_modular(cosbump, plan):
    base = modular_Js(Power(2.0), cosbump, 0.5, plan).value
    doubled = modular_Js(Power(2.0), cosbump.scale(2.0), 0.5, plan).value
    assert doubled == pytest.approx(4.0 * base, rel=1e-9)
    sample = sample_differences(Power(3.0), cosbump, 0.5, plan)
    assert sample.evaluate(0.5).value == pytest.approx(
        8.0 * sample.evaluate(1.0).value, rel=1e-9
    )


def test_monotone_and_convex_in_lambda(cosbump, plan):
    sample = sample_differences(preset("doublephase"), cosbump, 0.6, plan)
    lams = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0]
    values = [sample.evaluate(lam).value for lam in lams]
    assert np.all(np.diff(values) < 0.0)
    # J(theta u) <= theta J(u) for theta in [0, 1]
    theta = 0.3
    assert sample.evaluate(1.0 / theta).value <= theta * values[2]


def test_limit_in_one_dimension(cosbump, plan):
    limit = np.pi**2 / (4.0 * DEFAULT_RADIUS)
    assert scaled_modular(Power(2.0), cosbump, 0.999, plan) == pytest.approx(
        limit, rel=0.02
    )


def test_error_shrinks_towards_the_limit(cosbump, plan):
    limit = np.pi**2 / (4.0 * DEFAULT_RADIUS)
    errors = [
        abs(scaled_modular(Power(2.0), cosbump, s, plan) - limit)
        for s in (0.9, 0.99, 0.999)
    ]
    assert errors[2] < errors[0]


def test_tensor_and_monte_carlo_agree(cosbump, plan, mc_plan):
    spec = preset("doublephase")
    tensor = modular_Js(spec, cosbump, 0.5, plan)
    mc = modular_Js(spec, cosbump, 0.5, mc_plan)
    assert mc.scaled_stderr > 0.0
    assert abs(mc.scaled_value - tensor.scaled_value) <= 3.0 * mc.scaled_stderr
    assert abs(mc.value - tensor.value) <= 3.0 * mc.mc_stderr


def test_worker_count_does_not_change_results(cosbump, plan, mc_plan):
    spec = preset("doublephase")
    for p in (plan, mc_plan):
        one = modular_Js(spec, cosbump, 0.8, replace(p, workers=1))
        many = modular_Js(spec, cosbump, 0.8, replace(p, workers=4))
        assert one == many


def test_monte_carlo_depends_on_seed_only(cosbump, mc_plan):
    spec = Power(2.0)
    first = modular_Js(spec, cosbump, 0.8, mc_plan)
    again = modular_Js(spec, cosbump, 0.8, mc_plan)
    other = modular_Js(spec, cosbump, 0.8, replace(mc_plan, seed=4))
    assert first == again
    assert first.value != other.value


def test_radial_substitution_matches_plain_radius(cosbump, plan):
    direct = replace(plan, use_rho_substitution=False, radial_levels=40)
    a = modular_Js(Power(2.0), cosbump, 0.5, plan)
    b = modular_Js(Power(2.0), cosbump, 0.5, direct)
    assert a.value == pytest.approx(b.value, rel=1e-3)


def test_shallow_plain_radius_mesh_is_reported(cosbump, plan):
    shallow = replace(plan, use_rho_substitution=False, radial_levels=8)
    with pytest.raises(TailBoundError):
        modular_Js(Power(2.0), cosbump, 0.999, shallow)


def test_kinked_young_function(cosbump, plan):
    # the density of powerlog jumps at t = 1; u / lam crosses it
    sample = sample_differences(preset("powerlog"), cosbump, 0.5, plan)
    assert sample.evaluate(0.1).value > 0.0
    limit = grad_energy(H0Evaluator.for_spec(preset("powerlog")), cosbump)
    scaled = sample_differences(preset("powerlog"), cosbump, 0.999, plan)
    assert scaled.evaluate().scaled_value == pytest.approx(limit, rel=0.02)


def test_directional_modular_in_one_dimension(cosbump, plan):
    # the only directions on the line are the two axis directions
    assert modular_aniso(Power(2.0), cosbump, 0.7, 1, plan) == modular_Js(
        Power(2.0), cosbump, 0.7, plan
    )


def test_local_modular(cosbump):
    rule = cosbump.spatial_rule()
    value = local_modular(Power(2.0), cosbump, rule)
    assert value == pytest.approx(0.75 * DEFAULT_RADIUS, rel=1e-10)
    ev = H0Evaluator.for_spec(Power(3.0))

    def slope(x):
        return np.linalg.norm(cosbump.grad(x), axis=-1)

    assert local_modular(ev, slope, rule) == grad_energy(ev, cosbump, rule)


def test_invalid_arguments(cosbump, plan):
    with pytest.raises(DomainError):
        modular_Js(Power(2.0), cosbump, 1.0, plan)
    with pytest.raises(DomainError):
        modular_Js(Power(2.0), cosbump, 0.0, plan)
    with pytest.raises(DomainError):
        modular_aniso(Power(2.0), cosbump, 0.5, 2, plan)
    with pytest.raises(DomainError):
        sample_differences(Power(2.0), cosbump, 0.5, plan).evaluate(0.0)


@pytest.mark.parametrize(
    "options",
    [
        {"method": "quasi"},
        {"radial_levels": 4},
        {"method": MONTE_CARLO, "samples": 10},
        {"workers": 0},
        {"far_cutoff": 0.0},
    ],
)
def test_plan_validation(options):
    with pytest.raises(DomainError):
        SamplingPlan(**options)


@pytest.mark.slow
def test_monte_carlo_limit_in_two_dimensions():
    u = get_function("cosbump", 2)
    plan = SamplingPlan(
        method=MONTE_CARLO, samples=1_000_000, chunk_size=4096, seed=0
    )
    result = modular_Js(Power(2.0), u, 0.999, plan)
    limit = grad_energy(H0Evaluator.for_spec(Power(2.0), dimension=2), u)
    assert result.scaled_value == pytest.approx(limit, rel=0.03)


@pytest.mark.slow
def test_directional_limit_in_two_dimensions():
    u = get_function("polybump-aniso", 2)
    plan = SamplingPlan()
    ev = H0Evaluator.anisotropic(Power(2.0), dimension=2)
    for k in (1, 2):
        result = modular_aniso(Power(2.0), u, 0.999, k, plan)
        limit = partial_energy(ev, u, k)
        assert result.scaled_value == pytest.approx(limit, rel=0.02)


@pytest.mark.slow
@pytest.mark.parametrize("p", [2.0, 3.0])
def test_directional_modular_of_a_symmetric_bump(p):
    u = get_function("polybump", 2)
    plan = SamplingPlan()
    first = modular_aniso(Power(p), u, 0.999, 1, plan)
    second = modular_aniso(Power(p), u, 0.999, 2, plan)
    assert first.value == pytest.approx(second.value, rel=1e-9)
    ev = H0Evaluator.anisotropic(Power(p), dimension=2)
    limit = partial_energy(ev, u, 1)
    assert first.scaled_value == pytest.approx(limit, rel=0.02)


@pytest.mark.slow
def test_directional_tensor_and_monte_carlo_agree():
    u = get_function("polybump", 2)
    tensor = modular_aniso(Power(2.0), u, 0.5, 1, SamplingPlan())
    mc_plan = SamplingPlan(method=MONTE_CARLO, samples=200_000, seed=5)
    mc = modular_aniso(Power(2.0), u, 0.5, 1, mc_plan)
    assert abs(mc.scaled_value - tensor.scaled_value) <= 3.0 * mc.scaled_stderr


@pytest.mark.parametrize("name", ["power2", "doublephase"])
def test_tensor_and_monte_carlo_agree_in_the_plane(name):
    spec = preset(name)
    u = get_function("cosbump", 2)
    tensor_plan = SamplingPlan(spatial_panels=2, sphere_order=16)
    tensor = modular_Js(spec, u, 0.5, tensor_plan)
    mc_plan = SamplingPlan(method=MONTE_CARLO, samples=200_000, seed=3)
    mc = modular_Js(spec, u, 0.5, mc_plan)
    assert abs(mc.value - tensor.value) <= 3.0 * mc.mc_stderr


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
def test_rescaled_sample_matches_a_fresh_one(cosbump, plan, lam):
    spec = preset("powerlog")
    sample = sample_differences(spec, cosbump, 0.9, plan)
    fresh = modular_Js(spec, cosbump.scale(1.0 / lam), 0.9, plan)
    reused = sample.evaluate(lam).value
    if lam == 1.0:
        assert reused == fresh.value
    assert reused == pytest.approx(fresh.value, rel=5e-3)
