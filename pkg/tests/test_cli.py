# SPDX-FileCopyrightText: 2026 floquet-perturbation contributors
#
# SPDX-License-Identifier: MIT

import csv
import io
import json
from pathlib import Path
from typing import Any, Dict, List

import pytest
from pytest import approx

from floquet_perturbation.cli import (
    EXIT_INPUT,
    EXIT_NUMERICAL,
    EXIT_OK,
    build_problem,
    cmd_stability_chart,
    decay_exponent,
    main,
)
from floquet_perturbation.perturb import direct_exponents
from floquet_perturbation.problem import ProblemSpec, parse_problem, with_parameters


def read_csv(text: str) -> List[Dict[str, str]]:
    return list(csv.DictReader(io.StringIO(text)))


def run(capsys: pytest.CaptureFixture[str], *argv: str) -> Any:
    code = main(list(argv))
    return code, capsys.readouterr().out


@pytest.mark.problem("scalar_cosine")
def test_exponents_csv(problem_file: Path, capsys: pytest.CaptureFixture[str]) -> None:
    """It reports the exact exponent -0.7 from every method."""
    code, out = run(capsys, "exponents", "--spec", str(problem_file))
    assert code == EXIT_OK
    rows = read_csv(out)
    assert [row["method"] for row in rows] == ["rs", "wb", "direct"]
    for row in rows:
        assert float(row["re_mu"]) == approx(-0.7, abs=1e-10)
        assert float(row["im_mu"]) == approx(0.0, abs=1e-10)
        assert row["converged"] == "true"
        assert row["error"] == ""


@pytest.mark.problem("scalar_cosine")
def test_exponents_json(problem_file: Path, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    """It writes the full report to --out."""
    out = tmp_path / "report.json"
    code, stdout = run(
        capsys, "exponents", "--spec", str(problem_file), "--format", "json", "--out", str(out)
    )
    assert code == EXIT_OK
    assert stdout == ""
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["command"] == "exponents"
    assert report["failures"] == []
    (target,) = report["targets"]
    assert target["aleph"] == approx([-0.7, 0.0])
    assert {r["method"] for r in target["results"]} == {"rs", "wb", "direct"}


@pytest.mark.problem("scalar_cosine")
def test_method_override(problem_file: Path, capsys: pytest.CaptureFixture[str]) -> None:
    """It lets flags override the problem file."""
    code, out = run(capsys, "exponents", "--spec", str(problem_file), "--method", "rs", "--order", "1")
    assert code == EXIT_OK
    rows = read_csv(out)
    assert len(rows) == 1
    assert rows[0]["order"] == "1"


@pytest.mark.problem("mathieu_resonant")
def test_exponents_partial_failure(problem_file: Path, capsys: pytest.CaptureFixture[str]) -> None:
    """It keeps the WB result when RS hits the resonance, and exits 3."""
    code, out = run(capsys, "exponents", "--spec", str(problem_file), "--method", "all")
    assert code == EXIT_NUMERICAL
    rows = read_csv(out)
    rs = [row for row in rows if row["method"] == "rs"]
    wb = [row for row in rows if row["method"] == "wb"]
    assert all(row["error"] == "SmallDenominator" for row in rs)
    assert all(row["re_mu"] != "" for row in wb)
    assert all(abs(float(row["re_mu"])) > 0.01 for row in wb)


def test_missing_file(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    code, _ = run(capsys, "exponents", "--spec", str(tmp_path / "absent.json"))
    assert code == EXIT_INPUT


def test_invalid_problem(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    """It exits 2 and names the field."""
    path = tmp_path / "bad.json"
    path.write_text('{\n  "n": 1,\n  "omega": 0,\n  "a0": [[0, 1.0]]\n}\n', encoding="utf-8")
    code = main(["exponents", "--spec", str(path)])
    captured = capsys.readouterr()
    assert code == EXIT_INPUT
    assert captured.out == ""


@pytest.mark.problem("scalar_cosine")
@pytest.mark.parametrize(
    "flags", [["--grid", "4"], ["--tol", "-1"], ["--cutoff", "0"]]
)
def test_invalid_flags(problem_file: Path, flags: List[str], capsys: pytest.CaptureFixture[str]) -> None:
    code, _ = run(capsys, "exponents", "--spec", str(problem_file), *flags)
    assert code == EXIT_INPUT


def test_version(capsys: pytest.CaptureFixture[str]) -> None:
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
    assert "floquet-perturbation" in capsys.readouterr().out


@pytest.mark.problem("mathieu_driven")
def test_solve(problem_file: Path, capsys: pytest.CaptureFixture[str]) -> None:
    """It writes the trajectory and a small residual."""
    code, out = run(capsys, "solve", "--spec", str(problem_file))
    assert code == EXIT_OK
    rows = read_csv(out)
    assert len(rows) == 3 * 512 + 1
    assert list(rows[0]) == ["t", "re_y1", "im_y1", "re_y2", "im_y2"]
    assert float(rows[0]["re_y1"]) == 0.0

    code, out = run(capsys, "solve", "--spec", str(problem_file), "--format", "json")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["trajectory"]["residual_max"] <= 1e-5
    assert report["trajectory"]["method"] == "direct"
    assert report["checks"]["floquet"] <= 1e-6
    assert report["checks"]["coefficient"] <= 1e-6


@pytest.mark.problem("undriven")
def test_solve_needs_forcing_or_y0(problem_file: Path, capsys: pytest.CaptureFixture[str]) -> None:
    code, out = run(capsys, "solve", "--spec", str(problem_file))
    assert code == EXIT_INPUT
    assert out == ""


@pytest.mark.problem("one_axis_sweep")
def test_chart_needs_two_axes(problem_file: Path, capsys: pytest.CaptureFixture[str]) -> None:
    code, _ = run(capsys, "stability-chart", "--spec", str(problem_file))
    assert code == EXIT_INPUT


@pytest.mark.problem("mathieu_chart")
def test_chart_tongue(problem_file: Path, capsys: pytest.CaptureFixture[str]) -> None:
    """It finds the first instability tongue reaching down to delta = 1/4."""
    code, out = run(capsys, "stability-chart", "--spec", str(problem_file), "--jobs", "2")
    assert code == EXIT_OK
    rows = read_csv(out)
    assert len(rows) == 41 * 31
    chart = {(int(r["row"]), int(r["col"])): r for r in rows}

    # delta = 0 has a defective coefficient matrix
    assert all(chart[0, col]["error"].startswith("DefectiveMonodromy") for col in range(31))
    # epsilon = 0 is neutrally stable everywhere else
    for row in range(1, 41):
        assert chart[row, 0]["unstable"] == "false"
        assert float(chart[row, 0]["re_mu_min"]) == approx(0.0, abs=1e-8)
    # delta = 0.25 is unstable for every epsilon > 0
    assert float(chart[10, 0]["x"]) == approx(0.25)
    assert all(chart[10, col]["unstable"] == "true" for col in range(1, 31))
    # and delta = 0.5 is not, for small epsilon
    assert chart[20, 1]["unstable"] == "false"


@pytest.mark.problem("mathieu_small_chart")
def test_chart_deterministic(problem_file: Path, capsys: pytest.CaptureFixture[str]) -> None:
    """It writes identical CSV serially and in parallel."""
    _, serial = run(capsys, "stability-chart", "--spec", str(problem_file), "--jobs", "1")
    _, parallel = run(capsys, "stability-chart", "--spec", str(problem_file), "--jobs", "2")
    assert serial == parallel
    assert serial.splitlines()[0] == (
        "row,col,x,y,re_mu_min,unstable,method,converged,cutoff_drift,error"
    )


@pytest.mark.problem("mathieu_small_chart")
def test_chart_points(problem: ProblemSpec) -> None:
    """It marks only the resonant point as unstable."""
    points = cmd_stability_chart(problem, jobs=1)
    unstable = [(p["x"], p["y"]) for p in points if p.get("unstable")]
    assert unstable == [(0.25, 0.05)]
    assert all(p["method"] == "direct" and p["converged"] for p in points)
    assert all(p["cutoff_drift"] <= 10 * problem.tolerances.tol for p in points)


@pytest.mark.problem("mathieu_small_chart")
def test_chart_cutoff_drift(problem_json: Dict[str, Any]) -> None:
    """It flags a point whose smallest real exponent moves with the cutoff."""
    document = dict(problem_json, cutoff=1)
    document["sweep"] = [
        {"path": "template/delta", "values": [0.25]},
        {"path": "template/epsilon", "values": [0.8]},
    ]
    spec = parse_problem(json.dumps(document))
    (point,) = cmd_stability_chart(spec, jobs=1)
    assert point["converged"] is False
    assert point["cutoff_drift"] > 1e-6

    local = with_parameters(spec, {"template/delta": 0.25, "template/epsilon": 0.8})
    problem = build_problem(local)
    narrow = min(z.real for z in direct_exponents(problem))
    wide = min(z.real for z in direct_exponents(problem.with_cutoff(3)))
    assert point["cutoff_drift"] == approx(abs(wide - narrow))
    assert point["re_mu_min"] == approx(narrow)


@pytest.mark.problem("mathieu_small_chart")
def test_chart_all_failed(
    problem_json: Dict[str, Any], tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    """It exits 3 only when no point could be computed."""
    document = dict(problem_json)
    document["sweep"] = [
        {"path": "template/delta", "values": [0.0]},
        {"path": "template/epsilon", "values": [0.0, 0.1]},
    ]
    path = tmp_path / "chart.json"
    path.write_text(json.dumps(document), encoding="utf-8")
    code, out = run(capsys, "stability-chart", "--spec", str(path), "--jobs", "1")
    assert code == EXIT_NUMERICAL
    assert len(read_csv(out)) == 2


@pytest.mark.problem("constant_skew")
def test_compare(problem_file: Path, capsys: pytest.CaptureFixture[str]) -> None:
    """It measures a third-order decay of the second-order series error."""
    code, out = run(capsys, "compare", "--spec", str(problem_file), "--format", "json")
    assert code == EXIT_OK
    rows = json.loads(out)["rows"]
    assert [row["scale"] for row in rows] == [0.01, 0.02, 0.04]
    assert all(row["method"] == "rs" and row["order"] == 2 for row in rows)
    assert 2.7 <= rows[0]["decay_exponent"] <= 3.3
    assert rows[2]["error"] / rows[1]["error"] == approx(8.0, rel=0.15)


@pytest.mark.problem("constant_pair")
def test_compare_all(problem_file: Path, capsys: pytest.CaptureFixture[str]) -> None:
    """It compares RS1, RS2 and WB2 for every mode."""
    code, out = run(capsys, "compare", "--spec", str(problem_file))
    assert code == EXIT_OK
    rows = read_csv(out)
    assert len(rows) == 3 * 2 * 3
    rs2 = [r for r in rows if r["method"] == "rs" and r["order"] == "2"]
    assert all(float(r["decay_exponent"]) == approx(4.0, abs=0.1) for r in rs2)
    assert all(r["converged"] == "true" for r in rows)


@pytest.mark.problem("mathieu_resonant")
def test_compare_in_tongue(problem_file: Path, capsys: pytest.CaptureFixture[str]) -> None:
    """It scores WB against the nearest dense exponent when RS hits the resonance."""
    code, out = run(capsys, "compare", "--spec", str(problem_file), "--format", "json")
    assert code == EXIT_OK
    rows = json.loads(out)["rows"]
    assert len(rows) == 3 * 2 * 3
    rs = [row for row in rows if row["method"] == "rs"]
    wb = [row for row in rows if row["method"] == "wb"]
    assert all(row["failure"].startswith("SmallDenominator") for row in rs)
    assert all(row["converged"] is False and row["error"] is None for row in rs)
    assert all(row["failure"] is None and row["converged"] for row in wb)
    assert all(row["error"] <= 1e-2 for row in wb)


@pytest.mark.problem("constant_pair")
def test_compare_rejects_direct(problem_file: Path, capsys: pytest.CaptureFixture[str]) -> None:
    code, _ = run(capsys, "compare", "--spec", str(problem_file), "--method", "direct")
    assert code == EXIT_INPUT


@pytest.mark.problem("mathieu_template")
def test_check(problem_file: Path, capsys: pytest.CaptureFixture[str]) -> None:
    """It passes every invariant on a well-posed Mathieu problem."""
    code, out = run(capsys, "check", "--spec", str(problem_file))
    rows = read_csv(out)
    assert {row["name"] for row in rows} == {
        "biorthogonality",
        "mode_residual",
        "eigen_residual",
        "cutoff_drift",
        "identity",
        "floquet",
        "coefficient",
        "monodromy",
        "k_shift",
    }
    assert [row["name"] for row in rows if row["passed"] != "true"] == []
    assert code == EXIT_OK


def test_decay_exponent() -> None:
    """It fits the slope on a log-log scale and needs two nonzero errors."""
    assert decay_exponent([0.1, 0.2, 0.4], [1e-3, 8e-3, 6.4e-2]) == approx(3.0)
    assert decay_exponent([0.1, 0.2], [0.0, 1e-3]) is None
