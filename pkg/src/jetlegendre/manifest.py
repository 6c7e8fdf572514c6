"""JSON manifests describing a Lagrangian problem, and the bundled examples."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .errors import ParseError, ValidationError
from .schmidt import SchmidtLayout, parse_auxiliary
from .variational import LagrangianSpec

FIXTURES = ("example1", "pais_uhlenbeck", "example3", "sarioglu_tekin", "clement")
MODES = ("auto", "even", "odd")
KNOWN_FIELDS = {
    "name", "description", "coordinates", "order", "lagrangian", "parameters", "auxiliary_F",
    "mode", "simulation", "accelerations", "auxiliaries", "expected",
}


class ManifestError(ValidationError):
    """Manifest problem located at a one-based ``line`` and ``column`` of the file."""

    def __init__(self, message, line=None, column=None):
        self.line, self.column = line, column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)


def _position(text, offset):
    line = text.count("\n", 0, offset) + 1
    return line, offset - (text.rfind("\n", 0, offset) + 1) + 1


def _locate(text, key, value=None):
    """Best-effort position of ``"key"`` (or of ``value`` after it) in the raw JSON."""
    start = text.find(json.dumps(key))
    if start < 0:
        return None, None
    if value is not None:
        at = text.find(json.dumps(value)[:-1], start)
        if at >= 0:
            return _position(text, at + 1)
    return _position(text, start)


def to_number(v):
    """Rational for ints and ``"p/q"`` strings, float for floats."""
    if isinstance(v, bool):
        raise ValidationError(f"not a number: {v!r}")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return v
    if isinstance(v, str):
        try:
            return Fraction(v)
        except ValueError:
            pass
    raise ValidationError(f"not a number: {v!r}")


@dataclass(frozen=True)
class Simulation:
    initial_state: dict
    dt: float = 1e-3
    T: float = 10.0


@dataclass(frozen=True)
class Manifest:
    coordinates: tuple
    order: int
    lagrangian: str
    parameters: dict = field(default_factory=dict)
    auxiliary_F: str | None = None
    mode: str = "auto"
    simulation: Simulation | None = None
    accelerations: tuple | None = None
    auxiliaries: tuple | None = None
    expected: dict = field(default_factory=dict)
    name: str = ""
    description: str = ""
    source_text: str = field(default="", repr=False, compare=False)

    def spec(self) -> LagrangianSpec:
        try:
            return LagrangianSpec.from_text(self.coordinates, self.order, self.lagrangian,
                                            tuple(self.parameters))
        except ParseError as exc:
            raise self._field_error("lagrangian", self.lagrangian, exc) from exc

    def layout(self, odd=None) -> SchmidtLayout:
        odd = self.mode == "odd" if odd is None else odd
        return SchmidtLayout.for_spec(self.spec(), self.accelerations, self.auxiliaries, odd=odd)

    def auxiliary(self, layout=None):
        if self.auxiliary_F is None:
            raise ManifestError("auxiliary_F is required for the odd-order route")
        layout = layout or self.layout(odd=True)
        try:
            return parse_auxiliary(self.auxiliary_F, layout)
        except ParseError as exc:
            raise self._field_error("auxiliary_F", self.auxiliary_F, exc) from exc

    def numeric_parameters(self):
        return {k: float(v) for k, v in self.parameters.items()}

    def _field_error(self, key, value, exc):
        line, col = _locate(self.source_text, key, value)
        if line is not None and exc.line == 1:
            col = col + exc.column - 1
        return ManifestError(f"{key}: {exc.args[0]}", line, col)


def parse_manifest(text: str) -> Manifest:
    """Validate and build a :class:`Manifest` from JSON text."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from exc
    if not isinstance(raw, dict):
        raise ManifestError("manifest must be a JSON object", 1, 1)

    def fail(key, message):
        line, col = _locate(text, key)
        return ManifestError(f"{key}: {message}", line, col)

    unknown = set(raw) - KNOWN_FIELDS
    if unknown:
        raise fail(sorted(unknown)[0], "unknown field")
    for key in ("coordinates", "order", "lagrangian"):
        if key not in raw:
            raise ManifestError(f"missing required field {key!r}", 1, 1)
    coords = raw["coordinates"]
    if not isinstance(coords, list) or not coords or not all(isinstance(c, str) for c in coords):
        raise fail("coordinates", "expected a nonempty list of names")
    order = raw["order"]
    if not isinstance(order, int) or isinstance(order, bool) or order < 1:
        raise fail("order", "expected a positive integer")
    if not isinstance(raw["lagrangian"], str):
        raise fail("lagrangian", "expected an expression string")
    mode = raw.get("mode", "auto")
    if mode not in MODES:
        raise fail("mode", f"expected one of {MODES}")
    if mode == "odd" and not raw.get("auxiliary_F"):
        raise fail("mode", "mode 'odd' requires auxiliary_F")
    params = raw.get("parameters") or {}
    if not isinstance(params, dict):
        raise fail("parameters", "expected an object of name: number")
    try:
        params = {k: to_number(v) for k, v in params.items()}
    except ValidationError as exc:
        raise fail("parameters", str(exc)) from exc
    sim = raw.get("simulation")
    if sim is not None:
        try:
            init = {k: to_number(v) for k, v in sim["initial_state"].items()}
            sim = Simulation(init, float(sim.get("dt", 1e-3)), float(sim.get("T", 10.0)))
        except (KeyError, TypeError, AttributeError, ValidationError) as exc:
            raise fail("simulation", f"expected {{initial_state, dt, T}} ({exc})") from exc
    m = Manifest(
        tuple(coords), order, raw["lagrangian"], params, raw.get("auxiliary_F"), mode, sim,
        tuple(raw["accelerations"]) if raw.get("accelerations") else None,
        tuple(raw["auxiliaries"]) if raw.get("auxiliaries") else None,
        raw.get("expected") or {}, raw.get("name", ""), raw.get("description", ""), text,
    )
    m.spec()
    if m.auxiliary_F is not None:
        m.auxiliary()
    return m


def load_manifest(path) -> Manifest:
    return parse_manifest(Path(path).read_text())


def fixture_path(name: str):
    return resources.files("jetlegendre") / "fixtures" / f"{name}.json"


def load_fixture(name: str) -> Manifest:
    if name not in FIXTURES:
        raise ValidationError(f"unknown fixture {name!r}; choose from {FIXTURES}")
    return parse_manifest(fixture_path(name).read_text())
