# SPDX-FileCopyrightText: 2022 Calvin Walton
# SPDX-FileCopyrightText: 2026 floquet-perturbation contributors
#
# SPDX-License-Identifier: MIT

import json
from pathlib import Path
from typing import Any, Dict

import pytest

# Using yaml to load "json" documents so I can have things like trailing commas
import yaml

from floquet_perturbation.problem import ProblemSpec, parse_problem


@pytest.fixture(scope="module")
def shared_datadir(request: pytest.Item) -> Path:
    return Path(request.fspath).parent / "data"


@pytest.fixture
def datadir(request: pytest.Item) -> Path:
    return Path(request.fspath).with_suffix("")


@pytest.fixture(scope="module")
def problem_json_all(shared_datadir: Path) -> Dict[str, Any]:
    with open(shared_datadir / "problems.json", "rb") as f:
        data: Dict[str, Any] = yaml.safe_load(f)
    return data


def _problem_name(request: Any) -> str:
    try:
        name: str = request.param
    except AttributeError:
        marker = request.node.get_closest_marker("problem")
        if marker is None:
            name = request.node.name
        else:
            name = marker.args[0]
    return name


@pytest.fixture
def problem_json(problem_json_all: Dict[str, Any], request: Any) -> Dict[str, Any]:
    """The raw problem document, for tests that edit it before parsing."""
    document: Dict[str, Any] = problem_json_all[_problem_name(request)]
    return document


@pytest.fixture
def problem(problem_json: Dict[str, Any]) -> ProblemSpec:
    return parse_problem(json.dumps(problem_json))


@pytest.fixture
def problem_file(problem_json: Dict[str, Any], tmp_path: Path) -> Path:
    path = tmp_path / "problem.json"
    path.write_text(json.dumps(problem_json, indent=2), encoding="utf-8")
    return path


@pytest.fixture
def output_json(datadir: Path, request: Any) -> Any:
    try:
        filename = request.param
    except AttributeError:
        filename = request.node.name

    with open(datadir / f"output_{filename}.json", "rb") as f:
        return yaml.safe_load(f)
