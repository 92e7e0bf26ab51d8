"""Convergence studies: the scaled modular against its limit along an s grid.

A study is fully described by a `StudyConfig`; its content hash keys the
result cache. Results are emitted as CSV, JSON or a gnuplot script.

>>> config = StudyConfig(s_grid=(0.5, 0.9))
>>> config.s_grid
(0.5, 0.9)
>>> StudyConfig(s_grid=(0.9, 0.5))
Traceback (most recent call last):
...
bbmstuff.errors.DomainError: s grid must increase strictly inside (0, 1)
"""

import configparser
import dataclasses
import json
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from bbmstuff.cache import StudyCache
from bbmstuff.errors import DomainError, RecordFormatError, TailBoundError
from bbmstuff.functions import DEFAULT_RADIUS, TestFunction, get_function
from bbmstuff.limit import H0Evaluator, grad_energy, partial_energy
from bbmstuff.luxemburg import norm_inequality_study
from bbmstuff.modular import (
    ModularResult,
    SamplingPlan,
    modular_aniso,
    modular_Js,
)
from bbmstuff.properties import closed_form_gap
from bbmstuff.store import VERSION
from bbmstuff.util import stable_hash
from bbmstuff.young import (
    YoungFunction,
    preset,
    spec_from_dict,
    spec_from_mapping,
)


logger = logging.getLogger(__name__)

DEFAULT_S_GRID = (0.9, 0.95, 0.99, 0.995, 0.999)
COLUMNS = [
    "s",
    "scaled_modular",
    "limit",
    "abs_err",
    "rel_err",
    "tail_bound",
    "stderr",
    "wall_ms",
]
FORMATS = ("csv", "json", "plot")


class StudyKind(str, Enum):
    BBM = "bbm-limit"
    ANISO = "aniso-limit"
    NORMS = "norm-inequality"
    DOUBLEPHASE = "example-doublephase"
    LOG = "example-log"
    VAREXP = "example-varexp"
    PROPS = "property-suite"


#: example id -> (study kind, preset)
EXAMPLES = {
    "doublephase": (StudyKind.DOUBLEPHASE, "doublephase"),
    "log": (StudyKind.LOG, "powerlog"),
    "varexp": (StudyKind.VAREXP, "varexp"),
}


@dataclass(frozen=True)
class StudyConfig:
    """Everything a study depends on.

    `seed` overrides the seed of `plan`; `axis` is the 1-based direction of
    the anisotropic study. `output` and ``plan.workers`` do not change the
    numbers and are left out of `cache_key`.
    """

    kind: StudyKind = StudyKind.BBM
    spec: YoungFunction = field(default_factory=lambda: preset("power2"))
    function: str = "cosbump"
    dimension: int = 1
    radius: float = DEFAULT_RADIUS
    s_grid: Tuple[float, ...] = DEFAULT_S_GRID
    plan: SamplingPlan = field(default_factory=SamplingPlan)
    axis: int = 1
    seed: int = 0
    output: Optional[str] = None
    timing: bool = False
    h0_closed: bool = True

    def __post_init__(self):
        object.__setattr__(self, "kind", StudyKind(self.kind))
        grid = tuple(float(s) for s in self.s_grid)
        if not grid or any(not 0.0 < s < 1.0 for s in grid):
            raise DomainError("s grid must increase strictly inside (0, 1)")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise DomainError("s grid must increase strictly inside (0, 1)")
        object.__setattr__(self, "s_grid", grid)
        if self.plan.seed != self.seed:
            object.__setattr__(self, "plan", replace(self.plan, seed=self.seed))
        if not 1 <= self.axis <= self.dimension:
            raise DomainError(
                f"axis {self.axis} out of range for n={self.dimension}"
            )
        get_function(self.function, self.dimension, self.radius)

    def test_function(self) -> TestFunction:
        return get_function(self.function, self.dimension, self.radius)

    def to_dict(self) -> Dict[str, object]:
        return {
            "kind": self.kind.value,
            "spec": self.spec.to_dict(),
            "function": self.function,
            "dimension": self.dimension,
            "radius": self.radius,
            "s_grid": list(self.s_grid),
            "plan": self.plan.to_dict(),
            "axis": self.axis,
            "seed": self.seed,
            "output": self.output,
            "timing": self.timing,
            "h0_closed": self.h0_closed,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, object]) -> "StudyConfig":
        data = dict(data)
        data["spec"] = spec_from_dict(data["spec"])
        data["plan"] = SamplingPlan(**data["plan"])
        data["s_grid"] = tuple(data["s_grid"])
        return cls(**data)

    def cache_key(self) -> str:
        """Content hash of the parts that determine the numbers."""
        data = self.to_dict()
        del data["output"]
        del data["plan"]["workers"]
        return stable_hash(data)

    @classmethod
    def from_ini(
        cls, source: Union[str, os.PathLike], **overrides
    ) -> "StudyConfig":
        """Read an INI file (see docs/config.md); keyword overrides win."""
        parser = configparser.ConfigParser()
        with open(source, encoding="utf-8") as file:
            parser.read_file(file)
        return cls.from_parser(parser, **overrides)

    @classmethod
    def from_parser(cls, parser: configparser.ConfigParser, **overrides):
        kwargs: Dict[str, object] = {}
        if parser.has_section("study"):
            study = parser["study"]
            if "kind" in study:
                kwargs["kind"] = study["kind"]
            for key in ("dimension", "axis", "seed"):
                if key in study:
                    kwargs[key] = study.getint(key)
            for key in ("timing", "h0_closed"):
                if key in study:
                    kwargs[key] = study.getboolean(key)
            if "s_grid" in study:
                kwargs["s_grid"] = parse_grid(study["s_grid"])
            if "output" in study:
                kwargs["output"] = study["output"]
        if parser.has_section("spec"):
            section = dict(parser["spec"])
            if "preset" in section:
                kwargs["spec"] = preset(section["preset"])
            else:
                kwargs["spec"] = spec_from_mapping(section)
        if parser.has_section("function"):
            function = parser["function"]
            if "name" in function:
                kwargs["function"] = function["name"]
            if "radius" in function:
                kwargs["radius"] = function.getfloat("radius")
        if parser.has_section("plan"):
            kwargs["plan"] = _plan_from_section(parser["plan"])
        kwargs.update(overrides)
        return cls(**kwargs)


def parse_grid(text: str) -> Tuple[float, ...]:
    """``"0.9, 0.99"`` -> ``(0.9, 0.99)``.

    >>> parse_grid("0.9, 0.99,0.999")
    (0.9, 0.99, 0.999)
    """
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise DomainError(f"cannot parse s grid {text!r}") from None


def _plan_from_section(section: configparser.SectionProxy) -> SamplingPlan:
    getters = {
        int: section.getint,
        float: section.getfloat,
        bool: section.getboolean,
        str: section.get,
    }
    kwargs = {}
    for spec_field in dataclasses.fields(SamplingPlan):
        if spec_field.name in section:
            kwargs[spec_field.name] = getters[spec_field.type](spec_field.name)
    unknown = set(section) - {f.name for f in dataclasses.fields(SamplingPlan)}
    if unknown:
        raise DomainError(f"unknown plan keys {sorted(unknown)}")
    return SamplingPlan(**kwargs)


@dataclass(frozen=True)
class StudyRow:
    s: float
    scaled_modular: float
    limit: float
    abs_err: float
    rel_err: float
    tail_bound: float
    stderr: float
    wall_ms: float


@dataclass
class StudyResult:
    """Rows along the grid, the limit and what was fitted to them.

    `informational` marks studies over test functions that are not C^2 with
    compact support. They run, but their convergence is not asserted.
    `checks` holds named side results (closed form against quadrature gaps,
    ratios).
    """

    kind: str
    rows: List[StudyRow]
    limit: float
    fitted_rate: Optional[float]
    extrapolated_limit: Optional[float]
    informational: bool
    config: Dict[str, object]
    checks: Dict[str, float] = field(default_factory=dict)
    version: int = VERSION

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [dataclasses.asdict(row) for row in self.rows], columns=COLUMNS
        )

    @property
    def error_increases(self) -> int:
        """How often rel_err grows from one grid point to the next."""
        errors = [row.rel_err for row in self.rows]
        return sum(b > a for a, b in zip(errors, errors[1:]))

    def to_dict(self) -> Dict[str, object]:
        data = dataclasses.asdict(self)
        data["artifact_version"] = data.pop("version")
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, object]) -> "StudyResult":
        data = dict(data)
        version = data.pop("artifact_version", None)
        if version != VERSION:
            raise RecordFormatError(
                f"result has version {version}, expected {VERSION}"
            )
        data["rows"] = [StudyRow(**row) for row in data["rows"]]
        return cls(version=version, **data)


# Fitting


def fitted_rate(s_grid, errors) -> Optional[float]:
    """Slope of log(error) against log(1 - s) over the nonzero errors.

    >>> round(fitted_rate([0.9, 0.99], [1e-1, 1e-2]), 12)
    1.0
    """
    pairs = [(1.0 - s, e) for s, e in zip(s_grid, errors) if e > 0.0]
    if len(pairs) < 2:
        return None
    x, y = np.log(np.array(pairs)).T
    return float(np.polyfit(x, y, 1)[0])


def extrapolate(s_grid, values, points: int = 3) -> Optional[float]:
    """Value at s = 1 of the line through the last `points` grid values
    against 1 - s.

    >>> round(extrapolate([0.8, 0.9, 0.95], [1.2, 1.1, 1.05]), 12)
    1.0
    """
    if len(s_grid) < 2:
        return None
    x = 1.0 - np.asarray(s_grid[-points:], dtype=float)
    y = np.asarray(values[-points:], dtype=float)
    return float(np.polyfit(x, y, 1)[1])


# Runners


def _row(s, value, limit, result: ModularResult, wall_ms) -> StudyRow:
    abs_err = abs(value - limit)
    rel_err = abs_err / limit if limit > 0.0 else abs_err
    return StudyRow(
        s=s,
        scaled_modular=value,
        limit=limit,
        abs_err=abs_err,
        rel_err=rel_err,
        tail_bound=(1.0 - s) * result.tail_bound,
        stderr=result.scaled_stderr or 0.0,
        wall_ms=wall_ms,
    )


def _sweep(
    config: StudyConfig,
    limit: float,
    modular: Callable[[float], ModularResult],
) -> List[StudyRow]:
    def run(s):
        start = time.perf_counter()
        try:
            result = modular(s)
        except TailBoundError as exc:
            raise TailBoundError(
                f"{config.kind.value} study on {config.function} at s={s}",
                exc.bound,
                exc.tolerance,
            ) from exc
        elapsed = 1000.0 * (time.perf_counter() - start)
        logger.debug("s=%g took %.1f ms", s, elapsed)
        wall_ms = elapsed if config.timing else 0.0
        return _row(s, result.scaled_value, limit, result, wall_ms)

    with ThreadPoolExecutor(max_workers=config.plan.workers) as pool:
        return list(pool.map(run, config.s_grid))


def _finish(config, rows, limit, checks=None) -> StudyResult:
    u = config.test_function()
    informational = not u.smooth
    if informational:
        logger.info(
            "%s is not C^2 with compact support: convergence is reported, "
            "not asserted",
            u.name,
        )
    grid = [row.s for row in rows]
    return StudyResult(
        kind=config.kind.value,
        rows=rows,
        limit=limit,
        fitted_rate=fitted_rate(grid, [row.rel_err for row in rows]),
        extrapolated_limit=extrapolate(
            grid, [row.scaled_modular for row in rows]
        ),
        informational=informational,
        config=config.to_dict(),
        checks=checks or {},
    )


def _cached(config: StudyConfig, cache: Optional[StudyCache], compute):
    key = config.cache_key()
    if cache is not None:
        hit = cache.get(key)
        if hit is not None:
            return hit
    logger.info(
        "running %s: %s on %s, n=%d, %d grid points",
        config.kind.value,
        config.spec.KIND,
        config.function,
        config.dimension,
        len(config.s_grid),
    )
    result = compute()
    if cache is not None:
        cache.set(key, result)
    logger.info("finished %s", config.kind.value)
    return result


def _limit_study(config: StudyConfig, checks=None) -> StudyResult:
    spec, u = config.spec, config.test_function()
    ev = H0Evaluator.for_spec(
        spec, dimension=config.dimension, closed=config.h0_closed
    )
    limit = grad_energy(ev, u)
    logger.debug("limit %s = %.10g", ev.variant.value, limit)

    def modular(s):
        return modular_Js(spec, u, s, config.plan)

    return _finish(config, _sweep(config, limit, modular), limit, checks)


def run_bbm_study(
    config: StudyConfig, cache: Optional[StudyCache] = None
) -> StudyResult:
    """``(1 - s) J(u)`` on the grid against ``integral of H0(x, |grad u|)``."""
    return _cached(config, cache, lambda: _limit_study(config))


def run_aniso_study(
    config: StudyConfig, cache: Optional[StudyCache] = None
) -> StudyResult:
    """The directional modular along ``config.axis`` against
    ``integral of H0_aniso(x, |du / dx_k|)``."""
    if config.kind is not StudyKind.ANISO:
        config = replace(config, kind=StudyKind.ANISO)

    def compute():
        spec, u, k = config.spec, config.test_function(), config.axis
        ev = H0Evaluator.anisotropic(spec, dimension=config.dimension)
        limit = partial_energy(ev, u, k)

        def modular(s):
            return modular_aniso(spec, u, s, k, config.plan)

        rows = _sweep(config, limit, modular)
        return _finish(config, rows, limit)

    return _cached(config, cache, compute)


def run_norm_study(
    config: StudyConfig, cache: Optional[StudyCache] = None
) -> StudyResult:
    """``[[u]]`` against ``|| grad u ||`` on the grid.

    The rows reuse the study columns: `scaled_modular` holds ``[[u]]``,
    `limit` the gradient norm and `stderr` the reported norm error.
    """
    if config.kind is not StudyKind.NORMS:
        config = replace(config, kind=StudyKind.NORMS)

    def compute():
        u = config.test_function()
        ev = H0Evaluator.for_spec(
            config.spec, dimension=config.dimension, closed=config.h0_closed
        )
        table = norm_inequality_study(
            config.spec,
            u,
            config.s_grid,
            config.plan,
            ev=ev,
            workers=config.plan.workers,
        )
        rows = []
        for record in table.to_dict("records"):
            limit = float(record["gradient_norm"])
            value = float(record["scaled_seminorm"])
            abs_err = abs(value - limit)
            rows.append(
                StudyRow(
                    s=float(record["s"]),
                    scaled_modular=value,
                    limit=limit,
                    abs_err=abs_err,
                    rel_err=abs_err / limit if limit > 0.0 else abs_err,
                    tail_bound=0.0,
                    stderr=float(record["error"]),
                    wall_ms=0.0,
                )
            )
        ratio = float(table["ratio"].iloc[-1]) if len(table) else 0.0
        limit = rows[0].limit if rows else 0.0
        return _finish(config, rows, limit, {"final_ratio": ratio})

    return _cached(config, cache, compute)


def run_example_suite(
    which: str,
    base: Optional[StudyConfig] = None,
    cache: Optional[StudyCache] = None,
) -> StudyResult:
    """A BBM study for one of the example families with a closed-form limit.

    The preset replaces the spec of `base`. The gap between the closed form
    and the generic quadrature of H0 on 50 random points is recorded under
    ``checks["closed_vs_generic"]``.
    """
    try:
        kind, name = EXAMPLES[which]
    except KeyError:
        raise DomainError(f"unknown example {which!r}") from None
    base = StudyConfig() if base is None else base
    config = replace(base, kind=kind, spec=preset(name), h0_closed=True)

    def compute():
        gap = closed_form_gap(
            config.spec, config.dimension, seed=config.seed
        )
        return _limit_study(config, {"closed_vs_generic": gap})

    return _cached(config, cache, compute)


RUNNERS: Dict[StudyKind, Callable[..., StudyResult]] = {
    StudyKind.BBM: run_bbm_study,
    StudyKind.ANISO: run_aniso_study,
    StudyKind.NORMS: run_norm_study,
}


def run_study(
    config: StudyConfig, cache: Optional[StudyCache] = None
) -> StudyResult:
    """Dispatch on ``config.kind``; the property suite is not a study."""
    for which, (kind, _) in EXAMPLES.items():
        if config.kind is kind:
            return run_example_suite(which, config, cache)
    try:
        runner = RUNNERS[config.kind]
    except KeyError:
        raise DomainError(f"{config.kind.value} is not a study") from None
    return runner(config, cache)


# Emission


def default_stem(result: StudyResult) -> str:
    config = StudyConfig.from_dict(result.config)
    return f"{result.kind}-{config.cache_key()[:12]}"


def _plot_script(csv_name: str, result: StudyResult) -> str:
    return "\n".join(
        [
            f"# {result.kind}: relative error against 1 - s",
            'set datafile separator ","',
            "set logscale xy",
            'set xlabel "1 - s"',
            'set ylabel "relative error"',
            "set key top left",
            f'plot "{csv_name}" skip 1 using (1 - $1):5 '
            'with linespoints title "rel\\_err"',
            "",
        ]
    )


def emit(
    result: StudyResult,
    fmt: str,
    directory: Union[str, os.PathLike],
    stem: Optional[str] = None,
) -> Path:
    """Write `result` as ``csv``, ``json`` or ``plot`` into `directory`.

    The plot script reads the CSV beside it, which is written as well.
    Returns the path of the requested artifact.
    """
    if fmt not in FORMATS:
        raise DomainError(f"unknown format {fmt!r}, expected one of {FORMATS}")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    stem = stem or default_stem(result)
    csv_path = directory / f"{stem}.csv"
    if fmt in ("csv", "plot"):
        result.frame().to_csv(csv_path, index=False)
    if fmt == "csv":
        path = csv_path
    elif fmt == "json":
        path = directory / f"{stem}.json"
        text = json.dumps(result.to_dict(), indent=2, sort_keys=True)
        path.write_text(text + "\n", encoding="utf-8")
    else:
        path = directory / f"{stem}.gp"
        path.write_text(_plot_script(csv_path.name, result), encoding="utf-8")
    logger.info("wrote %s", path)
    return path


def load_result(path: Union[str, os.PathLike]) -> StudyResult:
    """Read a result emitted as JSON."""
    with open(path, encoding="utf-8") as file:
        return StudyResult.from_dict(json.load(file))
