"""Check reports and their deterministic JSON rendering.

Report schema (version 1)::

    {"version": 1, "fixture": str|null,
     "checks": [{"name": str, "max_residual": number, "tolerance": number,
                 "pass": bool, "samples": int, "notes": [str]}],
     "pass": bool}

Numbers are serialized with 17 significant digits so identical runs
produce byte-identical files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass
class CheckReport:
    """Outcome of one named check over a sample."""

    name: str
    max_residual: float
    tolerance: float
    passed: bool
    samples: int
    notes: list = field(default_factory=list)

    def to_dict(self):
        # coerce at the boundary: producers may hand over numpy scalars
        return {
            "name": self.name,
            "max_residual": float(self.max_residual),
            "tolerance": float(self.tolerance),
            "pass": bool(self.passed),
            "samples": int(self.samples),
            "notes": [str(n) for n in self.notes],
        }


@dataclass
class ReportDocument:
    fixture: str | None
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self):
        return {
            "version": 1,
            "fixture": self.fixture,
            "checks": [c.to_dict() for c in self.checks],
            "pass": self.passed,
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())


def _format_number(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    text = format(float(x), ".17g")
    # make sure it reads back as a float, not an int
    if "e" not in text and "E" not in text and "." not in text:
        text += ".0"
    return text


def _escape(s: str) -> str:
    out = []
    for ch in s:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    return "".join(out)


def dumps(obj, indent: int = 0) -> str:
    """Minimal JSON writer with fixed number formatting and key order as
    given (insertion order), for byte-stable reports."""
    pad = " " * indent
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, float)):
        return _format_number(obj)
    if isinstance(obj, str):
        return f'"{_escape(obj)}"'
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        inner = ",\n".join(pad + "  " + dumps(v, indent + 2) for v in obj)
        return "[\n" + inner + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        inner = ",\n".join(
            pad + f'  "{_escape(str(k))}": ' + dumps(v, indent + 2)
            for k, v in obj.items()
        )
        return "{\n" + inner + "\n" + pad + "}"
    raise TypeError(f"cannot serialize {type(obj)!r}")
