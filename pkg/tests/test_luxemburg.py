import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from bbmstuff.errors import BisectionFailure, ContractViolation, DomainError
from bbmstuff.functions import bank, get_function
from bbmstuff.limit import H0Evaluator
from bbmstuff.luxemburg import (
    NORM_COLUMNS,
    NormQuery,
    Target,
    check_modular_norm_equivalence,
    gradient_norm,
    luxemburg,
    norm_inequality_study,
    orlicz_norm,
    scaled_seminorm,
    seminorm,
)
from bbmstuff.modular import SamplingPlan, sample_differences
from bbmstuff.quadrature import tensor_rule
from bbmstuff.sphere import sphere_rule
from bbmstuff.young import PRESETS, Power, preset, smooth_bump


@pytest.fixture
def plan():
    return SamplingPlan()


@pytest.fixture
def domain():
    return tensor_rule([-2.0], [2.0], 32, 8)


def test_zero_modular_has_zero_norm():
    result = luxemburg(NormQuery(), lambda lam: 0.0)
    assert result.value == 0.0
    assert result.iterations == 0


@seed(20240607)
@settings(max_examples=50, deadline=None)
@given(c=st.floats(0.01, 100.0), p=st.floats(1.5, 4.0))
def test_bisection_brackets_the_level_set(c, p):
    query = NormQuery(tol=1e-9)

    def modular(lam):
        return c / lam**p

    result = luxemburg(query, modular)
    lo, hi = result.bracket
    assert result.value == hi
    assert modular(hi) <= 1.0
    assert modular(lo) > 1.0
    assert hi - lo <= query.tol * hi
    assert result.value == pytest.approx(c ** (1.0 / p), rel=1e-8)


def test_increasing_modular_is_rejected():
    with pytest.raises(ContractViolation):
        luxemburg(NormQuery(), lambda lam: lam)


def test_iteration_cap():
    with pytest.raises(BisectionFailure) as info:
        luxemburg(NormQuery(max_iter=3), lambda lam: 4.0 / lam**2)
    lo, hi = info.value.bracket
    assert lo < hi


def test_query_validation():
    with pytest.raises(DomainError):
        NormQuery(tol=0.0)
    with pytest.raises(DomainError):
        NormQuery(max_iter=0)
    assert NormQuery(target="gradient").target is Target.GRADIENT


def test_orlicz_norm_of_a_constant():
    domain = tensor_rule([0.0], [1.0], 4, 4)
    result = orlicz_norm(Power(2.0), lambda x: np.full(len(x), 3.0), domain)
    assert result.value == pytest.approx(3.0, rel=1e-7)


def test_orlicz_norm_is_homogeneous(domain):
    spec = preset("doublephase")

    def f(x):
        return smooth_bump(x[..., 0] - 0.2, 1.0)

    base = orlicz_norm(spec, f, domain).value
    tripled = orlicz_norm(spec, lambda x: -3.0 * f(x), domain).value
    assert tripled == pytest.approx(3.0 * base, rel=1e-7)


@pytest.mark.parametrize("amp", [0.1, 1.0, 10.0])
@pytest.mark.parametrize("C", [1.0, 2.5, 5.0])
def test_modular_norm_equivalence(domain, amp, C):
    spec = preset("doublephase")

    def f(x):
        return amp * smooth_bump(x[..., 0], 1.0)

    report = check_modular_norm_equivalence(spec, f, C, domain)
    assert report.passed
    # inside the unit ball the modular is below 1, and conversely
    assert (report.norm <= 1.0) == (report.modular <= 1.0)


def test_equivalence_for_the_limit_function(domain):
    ev = H0Evaluator.for_spec(preset("doublephase"))
    report = check_modular_norm_equivalence(
        ev, lambda x: smooth_bump(x[..., 0]), 2.0, domain
    )
    assert report.passed
    with pytest.raises(DomainError):
        check_modular_norm_equivalence(ev, np.abs, 0.5, domain)


def test_gradient_norm_of_pure_power():
    u = get_function("cosbump", 1)
    ev = H0Evaluator.for_spec(Power(2.0))
    energy = np.pi**2 / (4.0 * 1.5)
    assert gradient_norm(ev, u).value == pytest.approx(
        np.sqrt(energy), rel=1e-7
    )
    assert gradient_norm(ev, get_function("zero", 1)).value == 0.0


def test_seminorms_of_pure_powers(plan):
    u = get_function("cosbump", 1)
    for p in (2.0, 3.0):
        spec = Power(p)
        result = sample_differences(spec, u, 0.9, plan).evaluate()
        scaled = scaled_seminorm(spec, u, 0.9, plan)
        plain = seminorm(spec, u, 0.9, plan)
        assert scaled.value == pytest.approx(
            result.scaled_value ** (1.0 / p), rel=1e-7
        )
        assert plain.value == pytest.approx(result.value ** (1.0 / p), rel=1e-7)
        assert scaled.error > 0.0


def test_seminorm_of_zero(plan):
    u = get_function("zero", 1)
    result = scaled_seminorm(preset("doublephase"), u, 0.5, plan)
    assert result.value == 0.0


def test_norm_study(plan):
    u = get_function("cosbump", 1)
    frame = norm_inequality_study(Power(2.0), u, [0.9, 0.999], plan, workers=2)
    assert list(frame.columns) == NORM_COLUMNS
    assert frame["s"].tolist() == [0.9, 0.999]
    assert frame["ratio"].iloc[-1] <= 1.05
    assert frame["ratio"].iloc[-1] == pytest.approx(1.0, abs=0.02)


def test_norm_study_of_zero(plan):
    frame = norm_inequality_study(
        Power(2.0), get_function("zero", 1), [0.5], plan
    )
    assert frame["ratio"].tolist() == [0.0]
    assert frame["scaled_seminorm"].tolist() == [0.0]


@pytest.mark.slow
@pytest.mark.parametrize("name", sorted(PRESETS))
@pytest.mark.parametrize("n", [1, 2])
def test_norm_inequality_near_one(name, n):
    spec = preset(name)
    ev = H0Evaluator.for_spec(spec)
    plan, panels = SamplingPlan(), 0
    if n == 2:
        ev = H0Evaluator.for_spec(spec, sphere_rule(2, 64))
        plan, panels = SamplingPlan(spatial_panels=2, sphere_order=16), 4
    for u in bank(n):
        if not u.smooth or u.is_zero:
            continue
        norm = scaled_seminorm(spec, u, 0.999, plan).value
        limit = gradient_norm(ev, u, u.spatial_rule(panels)).value
        assert norm <= 1.05 * limit, u.name
