"""Scenario definitions: the built-in presets and the plain-text scenario file format.

A scenario file holds one ``key = value`` pair per line; ``#`` starts a
comment. Matrices are written row-major inside brackets, rows separated by
``;`` and entries by spaces or commas, complex entries as ``re+imi``::

    name = tilted-qubit
    state = [0.75 0.25-0.25i; 0.25+0.25i 0.25]
    A = X
    B = Z
    model = projective
    measured = X_phi
    phi = 0.3

Recognised keys:

``name``
    free text.
``state``
    matrix literal or one of ``z+ z- x+ x- y+ y- mixed``.
``A``, ``B``
    target observables: matrix literals or ``I X Y Z X_phi``.
``model``
    ``projective`` (Lueders measurement of ``measured``), ``indirect``
    (``apparatus_state``, ``unitary``, ``meter``) or ``vienna``
    (shorthand for a projective measurement of ``X_phi``).
``b_side``
    ``ideal-after`` (default; ideal measurement of B after the A
    measurement) or ``joint`` (``b_observable`` on system (x) apparatus).
``sweep``
    ``<param> <start>:<stop>:<count>``; the only sweep parameter is ``phi``.
``phi``
    fixed value of ``phi`` when there is no sweep.

Numbers accept ``pi`` multiples such as ``2pi`` or ``pi/2``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import operators as ops
from .analysis import Scenario
from .exceptions import InvalidArgumentError, ScenarioError
from .models import IndirectModel, JointObservables, joint_from_indirect, luders_model

STATE_PRESETS = {
    "z+": [1, 0],
    "z-": [0, 1],
    "x+": [1, 1],
    "x-": [1, -1],
    "y+": [1, 1j],
    "y-": [1, -1j],
}
NAMED_OPERATORS = ("I", "X", "Y", "Z", "X_phi")
MODELS = ("projective", "indirect", "vienna")
B_SIDES = ("ideal-after", "joint")
KEYS = {
    "name", "state", "A", "B", "model", "measured", "apparatus_state", "unitary", "meter",
    "b_side", "b_observable", "sweep", "phi",
}


@dataclass(frozen=True)
class Grid:
    """Closed interval with inclusive endpoints and an explicit point count."""

    start: float
    stop: float
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise InvalidArgumentError("grid point count must be at least 1")

    def points(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class ScenarioSpec:
    """Validated scenario description; operator entries may refer to ``X_phi``."""

    name: str
    state: np.ndarray
    a: object
    b: object
    model: str = "projective"
    measured: object = None
    apparatus_state: np.ndarray | None = None
    unitary: np.ndarray | None = None
    meter: object = None
    b_side: str = "ideal-after"
    b_observable: np.ndarray | None = None
    sweep_param: str | None = None
    grid: Grid | None = None
    phi: float | None = None
    source: str = "<inline>"

    def parameter_points(self) -> list[dict]:
        """One parameter dict per sweep point (a single empty dict without a sweep)."""
        if self.grid is None:
            return [{"phi": self.phi}] if self.phi is not None else [{}]
        return [{self.sweep_param: float(v)} for v in self.grid.points()]

    def with_grid(self, grid: Grid) -> "ScenarioSpec":
        return replace(self, grid=grid, sweep_param=self.sweep_param or "phi")

    def uses_phi(self) -> bool:
        return any(isinstance(v, str) and v == "X_phi" for v in (self.a, self.b, self.measured, self.meter))

    def build(self, params: dict | None = None) -> Scenario:
        params = params or {}
        phi = params.get("phi", self.phi)

        def op(v, what):
            if isinstance(v, str):
                if v == "X_phi":
                    if phi is None:
                        raise ScenarioError("X_phi needs a value of phi (set 'phi' or a sweep)", field=what)
                    return ops.x_phi(phi)
                return ops.PAULIS[v].copy()
            return v

        a, b = op(self.a, "A"), op(self.b, "B")
        if self.model == "indirect":
            model = IndirectModel(a.shape[0], self.apparatus_state, self.unitary, op(self.meter, "meter"))
        else:
            model = luders_model(op(self.measured, "measured"))
        if self.b_side == "joint":
            joint = JointObservables(
                model.system_dim, model.meter_observable(), self.b_observable, model.apparatus_state,
                commutator_tol=1e-8,
            )
        else:
            joint = joint_from_indirect(model, b)
        return Scenario(joint, a, b, self.state)


_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_COMPLEX_CHARS = re.compile(r"^[0-9eE.+\-i]+$")


def parse_complex(tok: str) -> complex:
    """Parse ``1``, ``-2.5``, ``3i``, ``-i``, ``1+2i``, ``0.5-1e-3i``."""
    t = tok.strip()
    if not t or not _COMPLEX_CHARS.match(t) or t.count("i") > 1 or ("i" in t and not t.endswith("i")):
        raise ValueError(f"bad complex number {tok!r}")
    if t.endswith("i"):
        body = t[:-1]
        if body == "" or body[-1] in "+-":
            body += "1"
        t = body + "j"
    return complex(t)


def parse_matrix(text: str) -> np.ndarray:
    t = text.strip()
    if not (t.startswith("[") and t.endswith("]")):
        raise ValueError("matrix literals are written as [a b; c d]")
    rows = [r for r in t[1:-1].split(";")]
    out = []
    for r in rows:
        toks = [x for x in re.split(r"[\s,]+", r.strip()) if x]
        if not toks:
            raise ValueError("empty matrix row")
        out.append([parse_complex(x) for x in toks])
    if len({len(r) for r in out}) != 1:
        raise ValueError("matrix rows have different lengths")
    return np.array(out, dtype=complex)


def format_complex(z: complex) -> str:
    """``re+imi`` with shortest round-trip floats."""
    z = complex(z)
    sign = "-" if z.imag < 0 or (z.imag == 0 and math.copysign(1.0, z.imag) < 0) else "+"
    return f"{z.real!r}{sign}{abs(z.imag)!r}i"


def format_matrix(m) -> str:
    m = np.asarray(m, dtype=complex)
    return "[" + "; ".join(" ".join(format_complex(z) for z in row) for row in m) + "]"


def parse_number(text: str) -> float:
    """A float, optionally a multiple or fraction of pi: ``2pi``, ``pi/2``, ``-0.5*pi``."""
    t = text.strip().replace(" ", "")
    m = re.fullmatch(rf"({_NUM})?\*?pi(?:/({_NUM}))?", t)
    if m:
        coef = float(m.group(1)) if m.group(1) not in (None, "+", "-") else (-1.0 if m.group(1) == "-" else 1.0)
        den = float(m.group(2)) if m.group(2) else 1.0
        return coef * math.pi / den
    m = re.fullmatch(r"([-+])pi(?:/(.+))?", t)
    if m:
        return (-1 if m.group(1) == "-" else 1) * math.pi / (float(m.group(2)) if m.group(2) else 1.0)
    return float(t)


def parse_grid(text: str) -> Grid:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must be start:stop:count, got {text!r}")
    count = int(parts[2])
    return Grid(parse_number(parts[0]), parse_number(parts[1]), count)


def _operator_value(value: str):
    v = value.strip()
    if v in NAMED_OPERATORS:
        return v
    return parse_matrix(v)


def _state_value(value: str) -> np.ndarray:
    v = value.strip()
    if v == "mixed":
        return np.eye(2, dtype=complex) / 2
    if v in STATE_PRESETS:
        return ops.projector(STATE_PRESETS[v])
    return parse_matrix(v)


def parse_scenario(text: str, source: str = "<inline>") -> ScenarioSpec:
    raw: dict[str, tuple[int, str]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ScenarioError("expected 'key = value'", line=lineno)
        key, value = (s.strip() for s in body.split("=", 1))
        if key not in KEYS:
            raise ScenarioError(f"unknown key {key!r}", line=lineno, field=key)
        if key in raw:
            raise ScenarioError("duplicate key", line=lineno, field=key)
        if not value:
            raise ScenarioError("empty value", line=lineno, field=key)
        raw[key] = (lineno, value)

    def get(key, conv, default=None, required=False):
        if key not in raw:
            if required:
                raise ScenarioError("missing required key", field=key)
            return default
        lineno, value = raw[key]
        try:
            return conv(value)
        except ScenarioError:
            raise
        except (ValueError, KeyError) as exc:
            raise ScenarioError(str(exc), line=lineno, field=key) from None

    def choice(options):
        def conv(v):
            if v not in options:
                raise ValueError(f"expected one of {', '.join(options)}, got {v!r}")
            return v
        return conv

    sweep = get("sweep", lambda v: v.split(None, 1))
    sweep_param = grid = None
    if sweep is not None:
        lineno = raw["sweep"][0]
        if len(sweep) != 2 or sweep[0] != "phi":
            raise ScenarioError("sweep must read 'phi <start>:<stop>:<count>'", line=lineno, field="sweep")
        sweep_param = sweep[0]
        try:
            grid = parse_grid(sweep[1])
        except (ValueError, InvalidArgumentError) as exc:
            raise ScenarioError(str(exc), line=lineno, field="sweep") from None

    model = get("model", choice(MODELS), "projective")
    measured = get("measured", _operator_value)
    if model == "vienna":
        measured = "X_phi"
    spec = ScenarioSpec(
        name=get("name", str, Path(source).stem),
        state=get("state", _state_value, required=True),
        a=get("A", _operator_value, required=True),
        b=get("B", _operator_value, required=True),
        model=model,
        measured=measured,
        apparatus_state=get("apparatus_state", _state_value),
        unitary=get("unitary", parse_matrix),
        meter=get("meter", _operator_value),
        b_side=get("b_side", choice(B_SIDES), "ideal-after"),
        b_observable=get("b_observable", parse_matrix),
        sweep_param=sweep_param,
        grid=grid,
        phi=get("phi", parse_number),
        source=source,
    )
    validate(spec, {k: v[0] for k, v in raw.items()})
    return spec


def validate(spec: ScenarioSpec, lines: dict | None = None) -> None:
    """Check every matrix invariant and build the scenario once (at each sweep endpoint)."""
    lines = lines or {}

    def fail(msg, key):
        raise ScenarioError(msg, line=lines.get(key), field=key)

    def check(key, fn):
        try:
            return fn()
        except ScenarioError:
            raise
        except InvalidArgumentError as exc:
            fail(str(exc), key)

    check("state", lambda: ops.require_density(spec.state))
    for key, v in (("A", spec.a), ("B", spec.b), ("measured", spec.measured), ("meter", spec.meter)):
        if v is not None and not isinstance(v, str):
            check(key, lambda v=v, key=key: ops.require_hermitian(v, key, tol=1e-10))
    d = spec.state.shape[0]
    for key, v in (("A", spec.a), ("B", spec.b), ("measured", spec.measured)):
        if v is None:
            continue
        dim = 2 if isinstance(v, str) else v.shape[0]
        if dim != d:
            fail(f"{key} has dimension {dim} but the state has dimension {d}", key)
    if spec.model == "indirect":
        for key in ("apparatus_state", "unitary", "meter"):
            if getattr(spec, key) is None:
                fail("required for model = indirect", key)
        check("apparatus_state", lambda: ops.require_density(spec.apparatus_state, "apparatus state"))
        check("unitary", lambda: ops.require_unitary(spec.unitary))
    elif spec.measured is None:
        fail("required for model = projective", "measured")
    if spec.b_side == "joint" and spec.b_observable is None:
        fail("required for b_side = joint", "b_observable")
    if spec.uses_phi() and spec.grid is None and spec.phi is None:
        fail("X_phi is used but neither 'phi' nor a sweep is given", "phi")
    for params in spec.parameter_points()[:: max(1, len(spec.parameter_points()) - 1)]:
        check("model", lambda: spec.build(params))


def vienna_preset() -> ScenarioSpec:
    """A = X, B = Y, spin in the +1 eigenstate of Z, projective X_phi, phi over [0, 2 pi] in 181 points."""
    return ScenarioSpec(
        name="vienna",
        state=ops.projector([1, 0]),
        a="X",
        b="Y",
        model="vienna",
        measured="X_phi",
        sweep_param="phi",
        grid=Grid(0.0, 2 * math.pi, 181),
        source="preset:vienna",
    )


PRESETS = {"vienna": vienna_preset}


def load_scenario(name_or_path: str) -> ScenarioSpec:
    if name_or_path in PRESETS:
        return PRESETS[name_or_path]()
    path = Path(name_or_path)
    if not path.is_file():
        raise ScenarioError(f"no preset or file named {name_or_path!r} (presets: {', '.join(PRESETS)})")
    return parse_scenario(path.read_text(), source=str(path))
