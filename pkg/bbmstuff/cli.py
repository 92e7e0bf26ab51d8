"""Command line entry point.

Subcommands: ``bbm``, ``aniso``, ``norms``, ``examples``, ``props`` and
``emit``. Exit codes are the `EXIT_*` constants of `bbmstuff.errors`; other
package errors exit with 1.
"""

import argparse
import json
import logging
from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Optional

from bbmstuff import __version__
from bbmstuff.cache import StudyCache
from bbmstuff.errors import (
    EXIT_HYPOTHESIS_GATE,
    EXIT_OK,
    EXIT_PROPERTY_VIOLATION,
    EXIT_TAIL_FAILURE,
    BBMError,
    DomainError,
    TailBoundError,
)
from bbmstuff.modular import MONTE_CARLO, TENSOR
from bbmstuff.properties import run_property_suite
from bbmstuff.store import ResultStore
from bbmstuff.studies import (
    EXAMPLES,
    FORMATS,
    StudyConfig,
    StudyKind,
    StudyResult,
    emit,
    load_result,
    parse_grid,
    run_aniso_study,
    run_bbm_study,
    run_example_suite,
    run_norm_study,
)
from bbmstuff.young import PRESETS, preset


logger = logging.getLogger(__name__)

PLAN_METHODS = {"tensor": TENSOR, "mc": MONTE_CARLO}


def _config(args: argparse.Namespace, kind: StudyKind) -> StudyConfig:
    """The config file, if any, with command line flags on top."""
    overrides: Dict[str, object] = {}
    if args.spec is not None:
        overrides["spec"] = preset(args.spec)
    if args.fn is not None:
        overrides["function"] = args.fn
    if args.dim is not None:
        overrides["dimension"] = args.dim
    if args.s_grid is not None:
        overrides["s_grid"] = parse_grid(args.s_grid)
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.timing:
        overrides["timing"] = True
    if getattr(args, "axis", None) is not None:
        overrides["axis"] = args.axis
    if args.config is not None:
        config = StudyConfig.from_ini(args.config)
    else:
        config = StudyConfig()
    plan: Dict[str, object] = {}
    if args.plan is not None:
        plan["method"] = PLAN_METHODS[args.plan]
    if args.samples is not None:
        plan["samples"] = args.samples
    if args.workers is not None:
        plan["workers"] = args.workers
    if plan:
        overrides["plan"] = replace(config.plan, **plan)
    return replace(config, kind=kind, **overrides)


def _out(args: argparse.Namespace, config: StudyConfig) -> Path:
    return Path(args.out or config.output or "results")


def _cache(args, config: StudyConfig) -> Optional[StudyCache]:
    if args.no_cache:
        return None
    store = ResultStore(_out(args, config) / "cache")
    return StudyCache(store=store, decode=StudyResult.from_dict)


def _report(result: StudyResult, args, config: StudyConfig) -> int:
    path = emit(result, args.format, _out(args, config))
    print(result.frame().to_string(index=False))
    print(f"limit={result.limit:.10g} rate={result.fitted_rate}")
    for name, value in result.checks.items():
        print(f"{name}={value:.3e}")
    print(f"wrote {path}")
    if result.informational:
        print(
            "hypothesis gate: the test function is not C^2 with compact "
            "support, convergence is informational only"
        )
        return EXIT_HYPOTHESIS_GATE
    return EXIT_OK


def cmd_bbm(args: argparse.Namespace) -> int:
    config = _config(args, StudyKind.BBM)
    return _report(run_bbm_study(config, _cache(args, config)), args, config)


def cmd_aniso(args: argparse.Namespace) -> int:
    config = _config(args, StudyKind.ANISO)
    return _report(run_aniso_study(config, _cache(args, config)), args, config)


def cmd_norms(args: argparse.Namespace) -> int:
    config = _config(args, StudyKind.NORMS)
    return _report(run_norm_study(config, _cache(args, config)), args, config)


def cmd_examples(args: argparse.Namespace) -> int:
    if args.spec is not None:
        raise DomainError(
            f"examples fix their own spec; drop --spec {args.spec}"
        )
    kind = EXAMPLES[args.which][0]
    config = _config(args, kind)
    result = run_example_suite(args.which, config, _cache(args, config))
    return _report(result, args, config)


def cmd_props(args: argparse.Namespace) -> int:
    report = run_property_suite(
        seed=args.seed, samples=args.samples, corrupt=args.corrupt
    )
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"properties-{report.seed}.json"
        path.write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True))
        print(f"wrote {path}")
    failed = report.failures()
    print(f"{len(report.outcomes)} checks, {len(failed)} failed")
    for outcome in failed:
        print(
            f"  {outcome.name}: slack={outcome.slack:.3e} "
            f"tol={outcome.tolerance:.1e}"
        )
    return EXIT_PROPERTY_VIOLATION if failed else EXIT_OK


def cmd_emit(args: argparse.Namespace) -> int:
    result = load_result(args.result)
    path = emit(result, args.format, args.out, Path(args.result).stem)
    print(f"wrote {path}")
    return EXIT_OK


def _study_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="INI study config")
    parser.add_argument("--spec", choices=sorted(PRESETS))
    parser.add_argument("--fn", help="test function id")
    parser.add_argument("--dim", type=int)
    parser.add_argument("--s-grid", help="comma separated s values")
    parser.add_argument("--plan", choices=sorted(PLAN_METHODS))
    parser.add_argument("--samples", type=int)
    parser.add_argument("--workers", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out", help="output directory (default: results)")
    parser.add_argument("--no-cache", action="store_true")
    parser.add_argument("--format", choices=FORMATS, default="csv")
    parser.add_argument(
        "--timing", action="store_true", help="record wall_ms (not bitwise)"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bbmstuff",
        description="Fractional modulars and their limits as s -> 1",
    )
    parser.add_argument("--version", action="version", version=__version__)
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true")
    verbosity.add_argument("-q", "--quiet", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    bbm = sub.add_parser("bbm", help="scaled modular against its limit")
    _study_flags(bbm)
    bbm.set_defaults(func=cmd_bbm)

    aniso = sub.add_parser("aniso", help="directional modular along an axis")
    _study_flags(aniso)
    aniso.add_argument("--axis", type=int, help="1-based axis")
    aniso.set_defaults(func=cmd_aniso)

    norms = sub.add_parser("norms", help="scaled seminorm against the norm")
    _study_flags(norms)
    norms.set_defaults(func=cmd_norms)

    examples = sub.add_parser("examples", help="closed-form example families")
    _study_flags(examples)
    examples.add_argument("--which", choices=sorted(EXAMPLES), required=True)
    examples.set_defaults(func=cmd_examples)

    props = sub.add_parser("props", help="run the property suite")
    props.add_argument("--seed", type=int, default=0)
    props.add_argument("--samples", type=int, default=1000)
    props.add_argument("--out")
    props.add_argument(
        "--corrupt", action="store_true", help="negative control"
    )
    props.set_defaults(func=cmd_props)

    emitter = sub.add_parser("emit", help="re-emit a JSON result")
    emitter.add_argument("result", help="path of a JSON result")
    emitter.add_argument("--format", choices=FORMATS, default="csv")
    emitter.add_argument("--out", default="results")
    emitter.set_defaults(func=cmd_emit)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    logging.basicConfig(
        level=level, format="%(asctime)s %(name)s %(levelname)s %(message)s"
    )
    try:
        return args.func(args)
    except TailBoundError as exc:
        logger.error("%s", exc)
        return EXIT_TAIL_FAILURE
    except BBMError as exc:
        logger.error("%s", exc)
        return 1
