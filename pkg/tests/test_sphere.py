import numpy as np
import pytest

from bbmstuff.errors import DomainError
from bbmstuff.sphere import (
    ball_volume,
    moment_K,
    moment_K_exact,
    moment_Klog,
    moment_Klog_exact,
    sample_sphere,
    sphere_rule,
    surface_measure,
)


@pytest.mark.parametrize("kappa", [1.0, 1.5, 2.0, 3.0])
def test_zero_sphere_moment(kappa):
    assert moment_K(1, kappa) == pytest.approx(2.0 / kappa, rel=1e-15)
    assert moment_Klog(1, kappa) == 0.0


def test_circle_second_moment():
    assert moment_K(2, 2.0) == pytest.approx(np.pi / 2.0, rel=1e-12)


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("kappa", [1.5, 2.0, 2.5, 4.0])
def test_moment_matches_gamma_form(n, kappa):
    exact = moment_K_exact(n, kappa)
    assert moment_K(n, kappa) == pytest.approx(exact, rel=1e-8)


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("p", [2.0, 3.0])
def test_log_moment_matches_digamma_form(n, p):
    exact = moment_Klog_exact(n, p)
    assert exact < 0.0
    assert moment_Klog(n, p) == pytest.approx(exact, rel=1e-7)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_weights_sum_to_area(n):
    rule = sphere_rule(n)
    assert rule.weights.sum() == pytest.approx(surface_measure(n), rel=1e-12)
    np.testing.assert_allclose(np.linalg.norm(rule.nodes, axis=1), 1.0)
    values, weights = rule.folded()
    assert weights.sum() == pytest.approx(surface_measure(n), rel=1e-12)
    assert np.all(np.diff(values) > 0.0)


def test_rules_are_cached_and_frozen():
    rule = sphere_rule(3, 8)
    assert sphere_rule(3, 8) is rule
    with pytest.raises(ValueError):
        rule.weights[0] = 0.0


@pytest.mark.parametrize("n", [2, 3, 4])
def test_surface_and_volume(n):
    assert surface_measure(n) == pytest.approx(n * ball_volume(n))


def test_sampling():
    rng = np.random.default_rng(0)
    points = sample_sphere(3, 1000, rng)
    np.testing.assert_allclose(np.linalg.norm(points, axis=1), 1.0)
    # roughly centred
    assert np.all(np.abs(points.mean(axis=0)) < 0.1)
    signs = sample_sphere(1, 100, rng)
    assert set(np.unique(signs)) <= {-1.0, 1.0}


def test_invalid_requests():
    with pytest.raises(DomainError):
        sphere_rule(4)
    with pytest.raises(DomainError):
        sphere_rule(2, 0)
    with pytest.raises(DomainError):
        moment_K(2, 0.0)
    with pytest.raises(DomainError, match="dimension 3"):
        moment_K(2, 2.0, sphere_rule(3))


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("k", [1, 3, 5])
def test_odd_moments_vanish(n, k):
    rule = sphere_rule(n)
    assert abs(float(np.sum(rule.weights * rule.axial**k))) <= 1e-12


@pytest.mark.parametrize("n", [1, 2, 3])
def test_weighted_moment_decreases(n):
    kappas = [1.0, 1.5, 2.0, 3.0, 4.0, 6.0]
    weighted = [kappa * moment_K(n, kappa) for kappa in kappas]
    if n == 1:
        # |w_1| = 1 on S^0
        assert weighted == pytest.approx([2.0] * len(kappas))
    else:
        assert all(b < a for a, b in zip(weighted, weighted[1:]))


def test_sphere_second_moment():
    rule = sphere_rule(3, 32)
    value = float(np.sum(rule.weights * rule.axial**2))
    assert value == pytest.approx(4.0 * np.pi / 3.0, rel=1e-12)
