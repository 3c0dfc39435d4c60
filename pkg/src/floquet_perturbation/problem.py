# SPDX-FileCopyrightText: 2026 floquet-perturbation contributors
#
# SPDX-License-Identifier: MIT

"""Problem files: parsing, validation, templates and parameter sweeps.

A problem file is a JSON document (loaded through YAML so trailing commas and
comments are tolerated, and so every node keeps its line number). The
coefficient is given split as ``a(t) = a0(t) - V(t)``, each part as a list of
``[m, matrix]`` harmonics; complex entries are numbers or ``[re, im]`` pairs.
Instead of ``a0`` and ``V`` a named template may be used::

    {"template": "mathieu", "params": {"delta": 0.3, "epsilon": 0.1},
     "cutoff": 8, "method": "all"}
"""

import logging
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import (
    Any,
    Callable,
    Dict,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Union,
)

import numpy as np
import yaml

from .base import DEFAULT_HARMONICS
from .errors import ParseError, ValidationError
from .perturb import (
    DEFAULT_DAMPING,
    DEFAULT_DEGENERACY,
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    DEFAULT_WB_TOL,
)
from .series import (
    DEFAULT_ALIASING_TOLERANCE,
    ComplexArray,
    PeriodicMatrixSeries,
    PeriodicVectorSeries,
)

logger = logging.getLogger(__name__)

Harmonics = Tuple[Tuple[int, ComplexArray], ...]
FieldPath = Tuple[Union[str, int], ...]
Template = Callable[[Mapping[str, Any], float], Tuple[int, Harmonics, Harmonics]]

METHODS = ("rs", "wb", "direct", "all")

DEFAULT_CUTOFF = 8
DEFAULT_PERIODS = 3.0
DEFAULT_GRID = 512
DEFAULT_SCALES = (0.01, 0.02, 0.04)
MAX_SWEEP_AXES = 2


@dataclass(frozen=True)
class Tolerances:
    """Tolerances and iteration controls of one run."""

    tol: float = DEFAULT_TOL
    wb_tol: float = DEFAULT_WB_TOL
    max_iter: int = DEFAULT_MAX_ITER
    damping: float = DEFAULT_DAMPING
    degeneracy: float = DEFAULT_DEGENERACY
    """Degeneracy threshold in units of omega."""
    aliasing: float = DEFAULT_ALIASING_TOLERANCE


@dataclass(frozen=True)
class SweepAxis:
    """One swept scalar: a parameter path and the values it takes."""

    path: str
    values: Tuple[float, ...]


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """A validated problem file."""

    n: int
    omega: float
    a0: Harmonics
    V: Harmonics
    cutoff: int = DEFAULT_CUTOFF
    harmonics: int = DEFAULT_HARMONICS
    forcing: Optional[Harmonics] = None
    y0: Optional[ComplexArray] = None
    method: str = "all"
    order: int = 2
    targets: Tuple[int, ...] = ()
    tolerances: Tolerances = field(default_factory=Tolerances)
    sweep: Tuple[SweepAxis, ...] = ()
    scales: Tuple[float, ...] = DEFAULT_SCALES
    periods: float = DEFAULT_PERIODS
    grid: int = DEFAULT_GRID
    template: Optional[str] = None
    params: Mapping[str, Any] = field(default_factory=dict)

    @property
    def target_modes(self) -> Tuple[int, ...]:
        """The requested modes, all of them by default."""
        return self.targets or tuple(range(1, self.n + 1))


def _matrix_series(omega: float, n: int, harmonics: Harmonics) -> PeriodicMatrixSeries:
    return PeriodicMatrixSeries.from_harmonics(omega, dict(harmonics), n=n)


def unperturbed_system(spec: ProblemSpec) -> PeriodicMatrixSeries:
    """``a0(t)``."""
    return _matrix_series(spec.omega, spec.n, spec.a0)


def perturbation(spec: ProblemSpec) -> PeriodicMatrixSeries:
    """``V(t)``."""
    return _matrix_series(spec.omega, spec.n, spec.V)


def full_system(spec: ProblemSpec) -> PeriodicMatrixSeries:
    """``a(t) = a0(t) - V(t)``."""
    return unperturbed_system(spec) - perturbation(spec)


def forcing_series(spec: ProblemSpec) -> Optional[PeriodicVectorSeries]:
    if spec.forcing is None:
        return None
    return PeriodicVectorSeries.from_harmonics(spec.omega, dict(spec.forcing), n=spec.n)


# Templates


def _companion(delta: float) -> ComplexArray:
    return np.array([[0.0, 1.0], [-delta, 0.0]], dtype=np.complex128)


_LOWER = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=np.complex128)


def mathieu(params: Mapping[str, Any], omega: float) -> Tuple[int, Harmonics, Harmonics]:
    """``y'' + (delta + epsilon cos(omega t)) y = 0`` in first-order form."""
    delta = _scalar(params, "delta")
    epsilon = _scalar(params, "epsilon")
    half = 0.5 * epsilon * _LOWER
    return 2, ((0, _companion(delta)),), ((-1, half), (1, half))


def meissner_smoothed(
    params: Mapping[str, Any], omega: float
) -> Tuple[int, Harmonics, Harmonics]:
    """``y'' + (delta + epsilon sgn(cos(omega t))) y = 0`` with a smoothed square wave.

    The square wave keeps its first ``terms`` odd harmonics, each damped by
    its Lanczos sigma factor to suppress the Gibbs overshoot.
    """
    delta = _scalar(params, "delta")
    epsilon = _scalar(params, "epsilon")
    terms = int(params.get("terms", 7))
    if terms < 1:
        raise ValidationError("need at least one term", "params/terms")
    highest = 2 * terms
    V: List[Tuple[int, ComplexArray]] = []
    for k in range(1, highest, 2):
        amplitude = 4.0 / math.pi * (-1) ** ((k - 1) // 2) / k
        sigma = float(np.sinc(k / highest))
        coeff = 0.5 * epsilon * amplitude * sigma * _LOWER
        V.extend([(-k, coeff), (k, coeff)])
    return 2, ((0, _companion(delta)),), tuple(sorted(V, key=lambda item: item[0]))


def constant(params: Mapping[str, Any], omega: float) -> Tuple[int, Harmonics, Harmonics]:
    """Constant ``a0`` and ``V`` matrices."""
    if "a0" not in params:
        raise ValidationError("missing", "params/a0")
    a0 = np.asarray(params["a0"], dtype=np.complex128)
    n = a0.shape[0] if a0.ndim == 2 else 0
    if a0.shape != (n, n) or n < 1:
        raise ValidationError(f"must be a square matrix, got shape {a0.shape}", "params/a0")
    V = np.asarray(params.get("V", np.zeros((n, n))), dtype=np.complex128)
    if V.shape != (n, n):
        raise ValidationError(f"must be {n} x {n}, got shape {V.shape}", "params/V")
    return n, ((0, a0),), ((0, V),)


TEMPLATES: Dict[str, Template] = {
    "mathieu": mathieu,
    "meissner-smoothed": meissner_smoothed,
    "constant": constant,
}

TEMPLATE_PARAMS = {
    "mathieu": ("delta", "epsilon"),
    "meissner-smoothed": ("delta", "epsilon", "terms"),
    "constant": ("a0", "V"),
}


def _scalar(params: Mapping[str, Any], name: str) -> float:
    if name not in params:
        raise ValidationError("missing", f"params/{name}")
    return _real(params[name], f"params/{name}")


def expand_template(
    name: str, params: Mapping[str, Any], omega: float
) -> Tuple[int, Harmonics, Harmonics]:
    """``(n, a0, V)`` harmonics of a named template."""
    if name not in TEMPLATES:
        raise ValidationError(
            f"unknown template {name!r}, expected one of {', '.join(TEMPLATES)}",
            "template",
        )
    unknown = sorted(set(params) - set(TEMPLATE_PARAMS[name]))
    if unknown:
        raise ValidationError(f"unknown parameters {', '.join(unknown)}", "params")
    return TEMPLATES[name](params, omega)


# Parsing


def _real(value: Any, field_name: str, line: Optional[int] = None) -> float:
    # YAML reads exponent-only floats such as 1e-10 as strings.
    if isinstance(value, bool):
        raise ValidationError(f"expected a number, got {value!r}", field_name, line)
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            pass
    raise ValidationError(f"expected a number, got {value!r}", field_name, line)


def _line_index(
    node: yaml.Node, path: FieldPath = (), index: Optional[Dict[FieldPath, int]] = None
) -> Dict[FieldPath, int]:
    """Line numbers of every key and sequence item, by path."""
    if index is None:
        index = {}
    index.setdefault(path, node.start_mark.line + 1)
    if isinstance(node, yaml.MappingNode):
        for key, value in node.value:
            child = path + (key.value,)
            index[child] = key.start_mark.line + 1
            _line_index(value, child, index)
    elif isinstance(node, yaml.SequenceNode):
        for i, item in enumerate(node.value):
            child = path + (i,)
            index[child] = item.start_mark.line + 1
            _line_index(item, child, index)
    return index


class _Reader:
    """Turns loaded data into a :class:`ProblemSpec`, naming fields and lines."""

    KEYS = {
        "n",
        "omega",
        "cutoff",
        "harmonics",
        "a0",
        "V",
        "forcing",
        "y0",
        "method",
        "order",
        "targets",
        "tolerances",
        "sweep",
        "scales",
        "periods",
        "grid",
        "template",
        "params",
    }

    def __init__(self, data: Mapping[str, Any], lines: Mapping[FieldPath, int]) -> None:
        self.data = data
        self.lines = lines

    def line(self, path: FieldPath) -> Optional[int]:
        while path:
            if path in self.lines:
                return self.lines[path]
            path = path[:-1]
        return None

    def fail(self, message: str, path: FieldPath) -> ValidationError:
        return ValidationError(message, "/".join(str(p) for p in path), self.line(path))

    def real(self, value: Any, path: FieldPath) -> float:
        try:
            return _real(value, "")
        except ValidationError:
            raise self.fail(f"expected a number, got {value!r}", path) from None

    def integer(self, value: Any, path: FieldPath) -> int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise self.fail(f"expected an integer, got {value!r}", path)
        return value

    def entry(self, value: Any, path: FieldPath) -> complex:
        if isinstance(value, list):
            if len(value) != 2:
                raise self.fail("complex entries are [re, im] pairs", path)
            return complex(self.real(value[0], path + (0,)), self.real(value[1], path + (1,)))
        return complex(self.real(value, path))

    def vector(self, value: Any, n: int, path: FieldPath) -> ComplexArray:
        if not isinstance(value, list) or len(value) != n:
            raise self.fail(f"expected a vector of {n} entries", path)
        return np.array([self.entry(v, path + (i,)) for i, v in enumerate(value)])

    def matrix(self, value: Any, n: int, path: FieldPath) -> ComplexArray:
        if n == 1 and not (
            isinstance(value, list) and len(value) == 1 and isinstance(value[0], list)
        ):
            return np.array([[self.entry(value, path)]])
        if not isinstance(value, list) or len(value) != n:
            raise self.fail(f"expected an {n} x {n} matrix", path)
        rows = []
        for i, row in enumerate(value):
            if not isinstance(row, list) or len(row) != n:
                raise self.fail(f"matrix must be {n} x {n}; row {i} is not", path + (i,))
            rows.append([self.entry(v, path + (i, j)) for j, v in enumerate(row)])
        return np.array(rows, dtype=np.complex128)

    def harmonics(
        self, key: str, n: int, K: int, kind: Callable[[Any, int, FieldPath], ComplexArray]
    ) -> Harmonics:
        value = self.data[key]
        if not isinstance(value, list):
            raise self.fail("expected a list of [m, value] harmonics", (key,))
        seen: Dict[int, ComplexArray] = {}
        for i, item in enumerate(value):
            path: FieldPath = (key, i)
            if not isinstance(item, list) or len(item) != 2:
                raise self.fail("each harmonic is an [m, value] pair", path)
            m = self.integer(item[0], path + (0,))
            if abs(m) > K:
                raise self.fail(f"harmonic {m} exceeds cutoff {K}", path)
            if m in seen:
                raise self.fail(f"harmonic {m} given twice", path)
            seen[m] = kind(item[1], n, path + (1,))
        return tuple(sorted(seen.items(), key=lambda item: item[0]))

    def tolerances(self) -> Tolerances:
        value = self.data.get("tolerances", {})
        if not isinstance(value, dict):
            raise self.fail("expected a mapping", ("tolerances",))
        known = {f.name for f in fields(Tolerances)}
        values: Dict[str, Any] = {}
        for key, raw in value.items():
            path: FieldPath = ("tolerances", key)
            if key not in known:
                raise self.fail("unknown tolerance", path)
            if key == "max_iter":
                values[key] = self.integer(raw, path)
                if values[key] < 1:
                    raise self.fail("must be at least 1", path)
            else:
                values[key] = self.real(raw, path)
                if values[key] <= 0.0:
                    raise self.fail("must be positive", path)
        if values.get("damping", DEFAULT_DAMPING) > 1.0:
            raise self.fail("must be in (0, 1]", ("tolerances", "damping"))
        return Tolerances(**values)

    def sweep(self, spec: ProblemSpec) -> Tuple[SweepAxis, ...]:
        value = self.data.get("sweep", [])
        if not isinstance(value, list):
            raise self.fail("expected a list of sweep axes", ("sweep",))
        if len(value) > MAX_SWEEP_AXES:
            raise self.fail(f"at most {MAX_SWEEP_AXES} swept parameters", ("sweep",))
        axes = []
        for i, item in enumerate(value):
            path: FieldPath = ("sweep", i)
            if not isinstance(item, dict) or "path" not in item:
                raise self.fail("each sweep axis needs a path", path)
            if "values" in item:
                raw = item["values"]
                if not isinstance(raw, list) or not raw:
                    raise self.fail("values must be a non-empty list", path + ("values",))
                values = tuple(self.real(v, path + ("values", j)) for j, v in enumerate(raw))
            elif {"start", "stop", "num"} <= set(item):
                num = self.integer(item["num"], path + ("num",))
                if num < 1:
                    raise self.fail("num must be at least 1", path + ("num",))
                values = tuple(
                    float(v)
                    for v in np.linspace(
                        self.real(item["start"], path + ("start",)),
                        self.real(item["stop"], path + ("stop",)),
                        num,
                    )
                )
            else:
                raise self.fail("give values, or start, stop and num", path)
            axis = SweepAxis(str(item["path"]), values)
            try:
                with_parameters(spec, {axis.path: values[0]})
            except ValidationError as exc:
                raise self.fail(exc.reason, path + ("path",)) from None
            axes.append(axis)
        return tuple(axes)

    def spec(self) -> ProblemSpec:
        unknown = sorted(set(self.data) - self.KEYS)
        if unknown:
            raise self.fail("unknown field", (unknown[0],))
        omega = self.real(self.data.get("omega", 1.0), ("omega",))
        if not math.isfinite(omega) or omega <= 0.0:
            raise self.fail(f"must be positive, got {omega}", ("omega",))
        cutoff = self.integer(self.data.get("cutoff", DEFAULT_CUTOFF), ("cutoff",))
        if cutoff < 0:
            raise self.fail("must be non-negative", ("cutoff",))
        harmonics = self.integer(
            self.data.get("harmonics", DEFAULT_HARMONICS), ("harmonics",)
        )
        if harmonics < 0:
            raise self.fail("must be non-negative", ("harmonics",))

        template = self.data.get("template")
        params: Dict[str, Any] = {}
        if template is not None:
            if "a0" in self.data or "V" in self.data:
                raise self.fail("give either a template or a0 and V", ("template",))
            raw_params = self.data.get("params", {})
            if not isinstance(raw_params, dict):
                raise self.fail("expected a mapping", ("params",))
            params = dict(raw_params)
            try:
                n, a0, V = expand_template(str(template), params, omega)
            except ValidationError as exc:
                raise self.fail(exc.reason, tuple((exc.field or "template").split("/"))) from None
            if "n" in self.data and self.data["n"] != n:
                raise self.fail(f"template {template} has n = {n}", ("n",))
            for m, _ in V:
                if abs(m) > cutoff:
                    raise self.fail(
                        f"template harmonic {m} exceeds cutoff {cutoff}", ("cutoff",)
                    )
        else:
            if "n" not in self.data:
                raise self.fail("missing", ("n",))
            n = self.integer(self.data["n"], ("n",))
            if n < 1:
                raise self.fail("must be at least 1", ("n",))
            if "a0" not in self.data:
                raise self.fail("missing", ("a0",))
            a0 = self.harmonics("a0", n, cutoff, self.matrix)
            V = self.harmonics("V", n, cutoff, self.matrix) if "V" in self.data else ()

        forcing = None
        if self.data.get("forcing", "none") != "none":
            forcing = self.harmonics("forcing", n, cutoff, self.vector)
        y0 = None
        if "y0" in self.data:
            y0 = self.vector(self.data["y0"], n, ("y0",))

        method = self.data.get("method", "all")
        if method not in METHODS:
            raise self.fail(f"expected one of {', '.join(METHODS)}", ("method",))
        order = self.integer(self.data.get("order", 2), ("order",))
        if order not in (1, 2):
            raise self.fail("must be 1 or 2", ("order",))
        raw_targets = self.data.get("targets", [])
        if not isinstance(raw_targets, list):
            raise self.fail("expected a list of mode numbers", ("targets",))
        targets = tuple(self.integer(j, ("targets", i)) for i, j in enumerate(raw_targets))
        for i, j in enumerate(targets):
            if not 1 <= j <= n:
                raise self.fail(f"mode {j} outside 1..{n}", ("targets", i))
        raw_scales = self.data.get("scales", list(DEFAULT_SCALES))
        if not isinstance(raw_scales, list) or not raw_scales:
            raise self.fail("expected a non-empty list", ("scales",))
        scales = tuple(self.real(s, ("scales", i)) for i, s in enumerate(raw_scales))
        periods = self.real(self.data.get("periods", DEFAULT_PERIODS), ("periods",))
        if periods <= 0.0:
            raise self.fail("must be positive", ("periods",))
        grid = self.integer(self.data.get("grid", DEFAULT_GRID), ("grid",))
        if grid < 8:
            raise self.fail("need at least 8 points per period", ("grid",))

        spec = ProblemSpec(
            n=n,
            omega=omega,
            a0=a0,
            V=V,
            cutoff=cutoff,
            harmonics=harmonics,
            forcing=forcing,
            y0=y0,
            method=method,
            order=order,
            targets=targets,
            tolerances=self.tolerances(),
            scales=scales,
            periods=periods,
            grid=grid,
            template=None if template is None else str(template),
            params=params,
        )
        return replace(spec, sweep=self.sweep(spec))


def parse_problem(text: str) -> ProblemSpec:
    """Parse and validate a problem file.

    :raises ParseError: If the text is not well-formed.
    :raises ValidationError: If a field is missing, malformed or inconsistent.
        The message names the field and its line.
    """
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        raise ParseError(
            str(exc.problem or exc), None if mark is None else mark.line + 1
        ) from exc
    except yaml.YAMLError as exc:
        raise ParseError(str(exc)) from exc
    if node is None or not isinstance(data, dict):
        raise ParseError("a problem file must be a mapping", 1)
    spec = _Reader(data, _line_index(node)).spec()
    logger.debug(
        "parsed problem: n=%d omega=%g cutoff=%d method=%s",
        spec.n,
        spec.omega,
        spec.cutoff,
        spec.method,
    )
    return spec


def load_problem(path: Union[str, Path]) -> ProblemSpec:
    with open(path, encoding="utf-8") as f:
        return parse_problem(f.read())


def with_parameters(spec: ProblemSpec, assignments: Mapping[str, float]) -> ProblemSpec:
    """The problem with swept scalars set.

    Paths are ``template/<param>`` or ``a0/<m>/<row>/<col>`` and
    ``V/<m>/<row>/<col>`` with zero-based ``row`` and ``col``.
    """
    for path, value in assignments.items():
        parts = path.split("/")
        if parts[0] == "template":
            if spec.template is None or len(parts) != 2:
                raise ValidationError(f"{path!r} needs a template problem", "sweep")
            if parts[1] not in TEMPLATE_PARAMS[spec.template]:
                raise ValidationError(f"template has no parameter {parts[1]!r}", "sweep")
            params = dict(spec.params)
            params[parts[1]] = value
            _, a0, V = expand_template(spec.template, params, spec.omega)
            spec = replace(spec, params=params, a0=a0, V=V)
        elif parts[0] in ("a0", "V") and len(parts) == 4:
            try:
                m, row, col = (int(p) for p in parts[1:])
            except ValueError:
                raise ValidationError(f"bad entry path {path!r}", "sweep") from None
            if abs(m) > spec.cutoff or not (0 <= row < spec.n and 0 <= col < spec.n):
                raise ValidationError(f"{path!r} is outside the problem", "sweep")
            current = dict(getattr(spec, parts[0]))
            matrix = np.array(
                current.get(m, np.zeros((spec.n, spec.n))), dtype=np.complex128
            )
            matrix[row, col] = value
            current[m] = matrix
            entries = tuple(sorted(current.items(), key=lambda item: item[0]))
            spec = replace(spec, **{parts[0]: entries})
        else:
            raise ValidationError(
                f"bad sweep path {path!r}; use template/<param>, a0/<m>/<row>/<col>"
                " or V/<m>/<row>/<col>",
                "sweep",
            )
    return spec


def sweep_points(spec: ProblemSpec) -> List[Tuple[int, int, float, float]]:
    """``(row, col, x, y)`` for a two-axis sweep in row-major order.

    The first axis runs along rows.
    """
    if len(spec.sweep) != MAX_SWEEP_AXES:
        raise ValidationError("a chart needs exactly two swept parameters", "sweep")
    first, second = spec.sweep
    return [
        (i, j, x, y)
        for i, x in enumerate(first.values)
        for j, y in enumerate(second.values)
    ]


def sequence_to_pairs(values: Sequence[complex]) -> List[List[float]]:
    """Complex numbers as ``[re, im]`` pairs."""
    return [[float(z.real), float(z.imag)] for z in values]
