import json

import pytest

from bbmstuff.cli import main
from bbmstuff.errors import (
    EXIT_HYPOTHESIS_GATE,
    EXIT_OK,
    EXIT_PROPERTY_VIOLATION,
    EXIT_TAIL_FAILURE,
)


def run(*argv):
    return main(list(argv))


def test_bbm_writes_csv(tmp_path, capsys):
    out = str(tmp_path)
    code = run("-q", "bbm", "--s-grid", "0.9,0.99", "--out", out, "--no-cache")
    assert code == EXIT_OK
    written = list(tmp_path.glob("bbm-limit-*.csv"))
    assert len(written) == 1
    assert len(written[0].read_text().splitlines()) == 3
    assert "limit=" in capsys.readouterr().out


def test_cache_directory_is_used(tmp_path):
    args = ["-q", "bbm", "--s-grid", "0.9", "--out", str(tmp_path)]
    assert run(*args) == EXIT_OK
    cached = list((tmp_path / "cache").glob("*.json"))
    assert len(cached) == 1
    assert run(*args) == EXIT_OK
    assert list((tmp_path / "cache").glob("*.json")) == cached


def test_rough_function_hits_the_gate(tmp_path):
    code = run(
        "-q",
        "bbm",
        "--fn",
        "tent",
        "--s-grid",
        "0.9",
        "--out",
        str(tmp_path),
        "--no-cache",
    )
    assert code == EXIT_HYPOTHESIS_GATE


def test_tail_failure_exit_code(tmp_path):
    config = tmp_path / "shallow.ini"
    config.write_text(
        "[plan]\nuse_rho_substitution = false\nradial_levels = 8\n"
    )
    code = run(
        "-q",
        "bbm",
        "--config",
        str(config),
        "--s-grid",
        "0.999",
        "--out",
        str(tmp_path),
        "--no-cache",
    )
    assert code == EXIT_TAIL_FAILURE


def test_bad_argument_exits_with_one(tmp_path):
    code = run("-q", "bbm", "--fn", "gaussian", "--out", str(tmp_path))
    assert code == 1


def test_examples_and_emit(tmp_path):
    code = run(
        "-q",
        "examples",
        "--which",
        "doublephase",
        "--s-grid",
        "0.99,0.999",
        "--format",
        "json",
        "--out",
        str(tmp_path),
        "--no-cache",
    )
    assert code == EXIT_OK
    (result,) = tmp_path.glob("example-doublephase-*.json")
    data = json.loads(result.read_text())
    assert "closed_vs_generic" in data["checks"]

    plots = tmp_path / "plots"
    code = run("emit", str(result), "--format", "plot", "--out", str(plots))
    assert code == EXIT_OK
    assert (plots / f"{result.stem}.gp").exists()
    assert (plots / f"{result.stem}.csv").exists()


def test_monte_carlo_flags(tmp_path):
    code = run(
        "-q",
        "norms",
        "--plan",
        "mc",
        "--samples",
        "5000",
        "--seed",
        "1",
        "--s-grid",
        "0.9",
        "--out",
        str(tmp_path),
        "--no-cache",
    )
    assert code == EXIT_OK


def test_usage_errors():
    with pytest.raises(SystemExit):
        run("bbm", "--plan", "quasi")
    with pytest.raises(SystemExit):
        run()


@pytest.mark.slow
def test_negative_control(tmp_path):
    code = run(
        "-q", "props", "--samples", "100", "--corrupt", "--out", str(tmp_path)
    )
    assert code == EXIT_PROPERTY_VIOLATION
    report = json.loads((tmp_path / "properties-0.json").read_text())
    assert report["passed"] is False


def test_examples_reject_a_spec(tmp_path):
    code = run(
        "-q",
        "examples",
        "--which",
        "log",
        "--spec",
        "power2",
        "--out",
        str(tmp_path),
    )
    assert code == 1
    assert not list(tmp_path.glob("*.csv"))
