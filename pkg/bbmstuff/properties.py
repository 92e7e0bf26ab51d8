"""The property suite: every sampled check of the package, with fixed seeds.

Each check reports a signed slack (positive means violated) against a
tolerance. `run_property_suite` with ``corrupt=True`` declares a wrong upper
growth exponent for one built-in Young function, which must make the suite
fail.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from bbmstuff.errors import PropertyViolation
from bbmstuff.functions import (
    bank,
    finite_difference_check,
    get_function,
    second_difference_check,
)
from bbmstuff.limit import (
    H0Evaluator,
    Variant,
    h0_closed_log,
    h0_closed_log_grouped,
    sandwich_slack,
)
from bbmstuff.luxemburg import (
    NormQuery,
    Target,
    check_modular_norm_equivalence,
    luxemburg,
    scaled_seminorm,
)
from bbmstuff.modular import SamplingPlan, sample_differences
from bbmstuff.quadrature import tensor_rule
from bbmstuff.sphere import (
    moment_K,
    moment_K_exact,
    moment_Klog,
    moment_Klog_exact,
    sphere_rule,
)
from bbmstuff.young import (
    PRESETS,
    GrowthBounds,
    Power,
    StructureReport,
    preset,
    smooth_bump,
    verify_structure,
)


logger = logging.getLogger(__name__)

#: Sphere orders for the dual-path comparison; both paths share the rule.
GAP_ORDER = {1: 1, 2: 256, 3: 16}
SANDWICH_TOL = 1e-6
DUAL_PATH_TOL = 1e-6


@dataclass(frozen=True)
class CheckOutcome:
    name: str
    slack: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.slack <= self.tolerance)


@dataclass
class PropertyReport:
    seed: int
    outcomes: List[CheckOutcome] = field(default_factory=list)
    structure: Dict[str, StructureReport] = field(default_factory=dict)

    def add(self, name: str, slack: float, tolerance: float = 0.0):
        outcome = CheckOutcome(name, float(slack), tolerance)
        self.outcomes.append(outcome)
        logger.debug(
            "%s: slack=%.3e tol=%.1e %s",
            name,
            outcome.slack,
            tolerance,
            "ok" if outcome.passed else "VIOLATED",
        )

    def failures(self) -> List[CheckOutcome]:
        return [o for o in self.outcomes if not o.passed]

    @property
    def passed(self) -> bool:
        return not self.failures()

    def raise_for_failures(self):
        failed = self.failures()
        if failed:
            names = ", ".join(o.name for o in failed)
            raise PropertyViolation(f"{len(failed)} checks failed: {names}")

    def to_dict(self) -> Dict[str, object]:
        return {
            "seed": self.seed,
            "passed": self.passed,
            "checks": [
                {
                    "name": o.name,
                    "slack": o.slack,
                    "tolerance": o.tolerance,
                    "passed": o.passed,
                }
                for o in self.outcomes
            ],
        }


def closed_form_gap(
    spec, n: int, samples: int = 50, seed: int = 0, order: Optional[int] = None
) -> float:
    """Largest relative gap between the closed form of H0 and the generic
    quadrature on the same sphere rule, over random ``(x, t)``.

    Zero when the family has no closed form.
    """
    rule = sphere_rule(n, order or GAP_ORDER[n])
    closed = H0Evaluator.for_spec(spec, rule, closed=True)
    if closed.variant is Variant.GENERIC:
        return 0.0
    rng = np.random.default_rng(seed)
    x = rng.uniform(-2.0, 2.0, (samples, n))
    t = 10.0 ** rng.uniform(-1.0, 1.0, samples)
    exact = closed(x, t)
    quadrature = closed.generic()(x, t)
    gap = np.abs(exact - quadrature) / np.maximum(np.abs(quadrature), 1e-300)
    return float(np.max(gap))


def _structure_checks(report, seed, samples, corrupt):
    for name in PRESETS:
        spec = preset(name)
        if corrupt and name == "power3":
            spec = Power(3.0, bounds=GrowthBounds(2.0, 2.5, 1.0, 1.0))
        result = verify_structure(spec, samples=samples, seed=seed)
        report.structure[name] = result
        for prop, slack in result.slacks.items():
            report.add(
                f"structure/{name}/{prop}", slack, result.tolerances[prop]
            )


def _sphere_checks(report):
    for n in (2, 3):
        for kappa in (1.5, 2.0, 3.0):
            exact = moment_K_exact(n, kappa)
            gap = abs(moment_K(n, kappa) - exact) / exact
            report.add(f"sphere/K/n={n}/kappa={kappa}", gap, 1e-8)
        exact = moment_Klog_exact(n, 2.0)
        gap = abs(moment_Klog(n, 2.0) - exact) / abs(exact)
        report.add(f"sphere/Klog/n={n}", gap, 1e-7)


def _limit_checks(report, rng, samples):
    for name in PRESETS:
        spec = preset(name)
        for n in (1, 2):
            report.add(
                f"h0/dual-path/{name}/n={n}",
                closed_form_gap(spec, n, seed=int(rng.integers(2**31))),
                DUAL_PATH_TOL,
            )
            ev = H0Evaluator.for_spec(spec, sphere_rule(n, GAP_ORDER[n]))
            x = rng.uniform(-2.0, 2.0, (samples, n))
            t = 10.0 ** rng.uniform(-2.0, 2.0, samples)
            slack = -float(np.min(sandwich_slack(ev, x, t)))
            report.add(f"h0/sandwich/{name}/n={n}", slack, SANDWICH_TOL)
    t = 10.0 ** rng.uniform(-2.0, 2.0, samples)
    grouped = h0_closed_log_grouped(1.0, 2.0, 1, t)
    nodewise = h0_closed_log(1.0, 2.0, 1, t, None)
    gap = np.max(np.abs(grouped - nodewise) / nodewise)
    report.add("h0/log-grouped/n=1", gap, 1e-12)


def _function_checks(report, rng):
    for n in (1, 2, 3):
        for u in bank(n):
            if not u.smooth or u.is_zero:
                continue
            lows, highs = u.support_box()
            points = rng.uniform(lows, highs, (50, n))
            scale = max(1.0, u.sup_grad)
            worst = finite_difference_check(u, points) / scale
            report.add(f"functions/fd/{u.name}/n={n}", worst, 1e-6)
            ratio = second_difference_check(u, points)
            report.add(f"functions/c2/{u.name}/n={n}", ratio - 1.0, 1e-6)


def _modular_checks(report):
    u = get_function("cosbump", 1)
    plan = SamplingPlan()
    power = sample_differences(Power(2.0), u, 0.5, plan)
    base = power.evaluate(1.0)
    doubled = power.evaluate(0.5)
    report.add(
        "modular/homogeneity",
        abs(doubled.value - 4.0 * base.value) / (4.0 * base.value),
        1e-9,
    )
    report.add("modular/far-bound", base.far_field - base.far_bound)
    report.add(
        "modular/split",
        abs(base.value - (base.near_field + base.far_field)),
        1e-12 * base.value,
    )

    sample = sample_differences(preset("doublephase"), u, 0.5, plan)
    values = [sample.evaluate(lam).value for lam in (0.5, 1.0, 2.0, 4.0, 8.0)]
    report.add("modular/monotone", float(np.max(np.diff(values))))
    theta = 0.3
    convex = sample.evaluate(1.0 / theta).value - theta * values[1]
    report.add("modular/convexity", convex / values[1], 1e-12)

    s = 0.9
    norm = scaled_seminorm(Power(2.0), u, s, plan).value
    explicit = np.sqrt(
        sample_differences(Power(2.0), u, s, plan).evaluate().scaled_value
    )
    report.add("norm/pure-power", abs(norm - explicit) / explicit, 1e-7)


def _norm_checks(report, rng, cases=20):
    spec = preset("doublephase")
    domain = tensor_rule([-2.0], [2.0], 32, 8)
    query = NormQuery(Target.ORLICZ)
    x, weights = domain.nodes, domain.weights
    for i in range(cases):
        amp = 10.0 ** rng.uniform(-1.0, 1.0)
        center = rng.uniform(-0.5, 0.5)
        C = rng.uniform(1.0, 5.0)

        def f(points, amp=amp, center=center):
            return amp * smooth_bump(points[..., 0] - center, 1.0)

        result = check_modular_norm_equivalence(spec, f, C, domain, query)
        report.add(
            f"norm/equivalence/{i}",
            max(result.norm_slack, result.modular_slack),
        )
        unit_norm = result.norm <= 1.0
        unit_modular = result.modular <= 1.0
        report.add(f"norm/unit-ball/{i}", float(unit_norm != unit_modular))

        magnitude = np.abs(f(x))
        bound = spec.bind(x, x)

        def modular(lam, scale=3.0):
            return float(np.sum(weights * bound.G(scale * magnitude / lam)))

        scaled = luxemburg(query, modular).value
        gap = abs(scaled - 3.0 * result.norm) / (3.0 * result.norm)
        report.add(f"norm/homogeneity/{i}", gap, 1e-7)


def run_property_suite(
    seed: int = 0, samples: int = 1000, corrupt: bool = False
) -> PropertyReport:
    """Run every sampled property check.

    :param seed: Seeds every random draw in the suite.
    :param samples: Random samples per structural and sandwich check.
    :param corrupt: Declare a wrong upper exponent for one preset.
    """
    rng = np.random.default_rng(seed)
    report = PropertyReport(seed)
    _structure_checks(report, seed, samples, corrupt)
    _sphere_checks(report)
    _limit_checks(report, rng, samples)
    _function_checks(report, rng)
    _modular_checks(report)
    _norm_checks(report, rng)
    failed = report.failures()
    logger.info(
        "property suite: %d checks, %d failed",
        len(report.outcomes),
        len(failed),
    )
    return report
