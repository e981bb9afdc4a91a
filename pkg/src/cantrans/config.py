"""Job configuration: TOML ingestion, validation, and emission.

A job names the chart dimension, a parameter table, the objects under
test (hamiltonian / map / generator / family / generating function) and
the checks to run, plus sampling and tolerance tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

try:
    import tomllib as _toml
except ImportError:  # Python < 3.11
    import tomli as _toml

from .errors import ConfigError
from .phase import ScalarField
from .sampling import Exclusion, SamplePlan

CHECKS = (
    "brackets",
    "symplectic",
    "time-canonical",
    "recover-k",
    "flow-match",
    "group-law",
    "generator-extract",
    "invariance",
    "noether-forward",
    "noether-reverse",
    "infinitesimal-scaling",
)

DEFAULT_TOLERANCES = {
    "brackets": 1e-9,
    "symplectic": 1e-9,
    "time-canonical": 1e-7,
    "recover-k": 1e-7,
    "flow-match": 1e-7,
    "group-law": 1e-7,
    "generator-extract": 1e-7,
    "invariance": 1e-7,
    "noether-forward": 1e-10,
    "noether-reverse": 1e-10,
    "infinitesimal-scaling": 0.1,
}

# which inputs each check needs, beyond sampling
_REQUIRES = {
    "brackets": ("mapsource",),
    "symplectic": ("mapsource",),
    "time-canonical": ("mapsource",),
    "recover-k": ("mapsource", "hamiltonian"),
    "flow-match": ("generator", "family"),
    "group-law": ("generator",),
    "generator-extract": ("family", "generator"),
    "invariance": ("mapsource", "hamiltonian"),
    "noether-forward": ("generator", "hamiltonian"),
    "noether-reverse": ("generator", "hamiltonian"),
    "infinitesimal-scaling": ("generator",),
}


@dataclass
class JobConfig:
    n: int
    params: dict = field(default_factory=dict)
    hamiltonian: str | None = None
    map: list | None = None         # 2n component sources, Q then P
    generator: str | None = None
    family: list | None = None      # 2n component sources using s
    f2: str | None = None           # type-2 generating function source
    f1: str | None = None           # type-1 generating function source
    f1_guess: list | None = None
    expected_k: str | None = None   # expected new Hamiltonian (may use s)
    checks: list = field(default_factory=list)
    sampling: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)

    def tolerance(self, check: str) -> float:
        return float(self.tolerances.get(check, DEFAULT_TOLERANCES[check]))

    def has_map_source(self) -> bool:
        return any(v is not None for v in (self.map, self.family, self.f2,
                                           self.f1, self.generator))

    def validate(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ConfigError("n", "must be a positive integer")
        for name, value in self.params.items():
            if not isinstance(value, (int, float)):
                raise ConfigError(f"params.{name}", "must be a number")
        for fieldname in ("map", "family"):
            comps = getattr(self, fieldname)
            if comps is not None and len(comps) != 2 * self.n:
                raise ConfigError(fieldname,
                                  f"needs 2n = {2 * self.n} component expressions")
        if self.f1 is not None and self.f1_guess is None:
            raise ConfigError("f1_guess",
                              "type-1 generating functions need an initial guess")
        if not self.has_map_source():
            raise ConfigError(
                "map", "at least one of map/generator/family/f2/f1 is required")
        if not self.checks:
            raise ConfigError("checks", "at least one check is required")
        for check in self.checks:
            if check not in CHECKS:
                raise ConfigError("checks", f"unknown check {check!r}")
            for need in _REQUIRES[check]:
                if need == "mapsource":
                    if not self.has_map_source():
                        raise ConfigError("checks", f"{check} needs a map source")
                elif getattr(self, need) is None:
                    raise ConfigError("checks", f"{check} needs {need!r}")
        for check in self.tolerances:
            if check not in CHECKS:
                raise ConfigError(f"tolerances.{check}", "unknown check name")
        self.plan()  # validates sampling fields

    def plan(self) -> SamplePlan:
        s = dict(self.sampling)
        n = self.n
        box = s.pop("box", None)
        if box is None:
            box = [[-2.0, 2.0]] * (2 * n)
        if len(box) != 2 * n:
            raise ConfigError("sampling.box", f"needs 2n = {2 * n} [lo, hi] pairs")
        box = tuple(_pair("sampling.box", pair) for pair in box)
        t_range = _pair("sampling.t_range", s.pop("t_range", [0.0, 2.0]))
        s_values = tuple(float(v) for v in s.pop("s_values", [-1.0, -0.5, 0.5, 1.0]))
        count = int(s.pop("count", 100))
        flow_count = int(s.pop("flow_count", 12))
        seed = int(s.pop("seed", 0))
        if count < 1 or flow_count < 1:
            raise ConfigError("sampling.count", "must be >= 1")
        exclusions = []
        for i, exc in enumerate(s.pop("exclude", [])):
            try:
                expr = ScalarField.from_source(exc["expr"], n, self.params)
                exclusions.append(Exclusion(expr, float(exc["low"]),
                                            float(exc["high"])))
            except KeyError as e:
                raise ConfigError(f"sampling.exclude[{i}]",
                                  f"missing field {e.args[0]!r}") from e
        if s:
            raise ConfigError(f"sampling.{next(iter(s))}", "unknown field")
        return SamplePlan(n=n, box=box, t_range=t_range, s_values=s_values,
                          count=count, flow_count=flow_count, seed=seed,
                          exclusions=tuple(exclusions))

    # ---- serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        out = {"n": self.n}
        for key in ("hamiltonian", "generator", "f2", "f1", "expected_k"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        for key in ("map", "family", "f1_guess"):
            value = getattr(self, key)
            if value is not None:
                out[key] = list(value)
        out["checks"] = list(self.checks)
        if self.params:
            out["params"] = dict(self.params)
        if self.sampling:
            out["sampling"] = dict(self.sampling)
        if self.tolerances:
            out["tolerances"] = dict(self.tolerances)
        return out

    def to_toml(self) -> str:
        return emit_toml(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "JobConfig":
        data = dict(data)
        known = {
            "n", "params", "hamiltonian", "map", "generator", "family",
            "f2", "f1", "f1_guess", "expected_k", "checks", "sampling",
            "tolerances",
        }
        for key in data:
            if key not in known:
                raise ConfigError(key, "unknown field")
        if "n" not in data:
            raise ConfigError("n", "required field")
        job = cls(
            n=data["n"],
            params=dict(data.get("params", {})),
            hamiltonian=data.get("hamiltonian"),
            map=data.get("map"),
            generator=data.get("generator"),
            family=data.get("family"),
            f2=data.get("f2"),
            f1=data.get("f1"),
            f1_guess=data.get("f1_guess"),
            expected_k=data.get("expected_k"),
            checks=list(data.get("checks", [])),
            sampling=dict(data.get("sampling", {})),
            tolerances=dict(data.get("tolerances", {})),
        )
        job.validate()
        return job

    @classmethod
    def from_toml(cls, text: str) -> "JobConfig":
        try:
            data = _toml.loads(text)
        except _toml.TOMLDecodeError as e:
            raise ConfigError("<toml>", str(e)) from e
        return cls.from_dict(data)

    @classmethod
    def from_file(cls, path) -> "JobConfig":
        with open(path, "rb") as fh:
            text = fh.read().decode("utf-8")
        return cls.from_toml(text)


def _pair(fieldname, value):
    try:
        lo, hi = float(value[0]), float(value[1])
    except (TypeError, ValueError, IndexError) as e:
        raise ConfigError(fieldname, "must be a [lo, hi] pair") from e
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
        raise ConfigError(fieldname, "needs finite lo < hi")
    return (lo, hi)


# ---------------------------------------------------------------------------
# Minimal TOML emission (strings, numbers, bools, flat lists, nested tables,
# lists of tables); enough for job configs to round-trip.


def _toml_scalar(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        if isinstance(value, float):
            text = repr(value)
            return text
        return str(value)
    if isinstance(value, str):
        escaped = value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_toml_scalar(v) for v in value) + "]"
    raise TypeError(f"cannot emit {type(value)!r} as TOML")


def emit_toml(data: dict, prefix: str = "") -> str:
    lines = []
    tables = []
    table_lists = []
    for key, value in data.items():
        if isinstance(value, dict):
            tables.append((key, value))
        elif (isinstance(value, list) and value
              and all(isinstance(v, dict) for v in value)):
            table_lists.append((key, value))
        else:
            lines.append(f"{key} = {_toml_scalar(value)}")
    out = "\n".join(lines)
    for key, value in tables:
        name = f"{prefix}{key}"
        out += f"\n\n[{name}]\n" + emit_toml(value, prefix=name + ".")
    for key, entries in table_lists:
        name = f"{prefix}{key}"
        for entry in entries:
            out += f"\n\n[[{name}]]\n" + emit_toml(entry, prefix=name + ".")
    return out.strip() + "\n"
