"""Residual reports: the common output record of every verifier."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any

SCHEMA_VERSION = 1


@dataclass
class Check:
    """One asserted quantity.

    ``relation`` is ``"le"`` (pass when ``value <= tolerance``) or ``"ge"``
    (pass when ``value >= tolerance``).
    """

    name: str
    value: float
    tolerance: float
    anchor: str = ""
    relation: str = "le"

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.value):
            return False
        if self.relation == "le":
            return self.value <= self.tolerance
        if self.relation == "ge":
            return self.value >= self.tolerance
        raise ValueError(f"unknown relation {self.relation!r}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "value": self.value,
            "tolerance": self.tolerance,
            "relation": self.relation,
            "passed": self.passed,
            "anchor": self.anchor,
        }


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "tolist"):
        return _jsonable(obj.tolist())
    if hasattr(obj, "item"):
        return _jsonable(obj.item())
    return obj


@dataclass
class ResidualReport:
    """Named residuals with tolerances plus free-form recorded notes.

    ``notes`` holds values that are recorded but not asserted (offsets,
    convention outcomes). ``metadata`` holds run information such as the
    lattice, the seed and the wall time.
    """

    scenario: str
    checks: list[Check] = field(default_factory=list)
    notes: dict[str, Any] = field(default_factory=dict)
    metadata: dict[str, Any] = field(default_factory=dict)

    def add(
        self,
        name: str,
        value: float,
        tolerance: float,
        anchor: str = "",
        relation: str = "le",
    ) -> Check:
        if not name or not name.isprintable():
            raise ValueError(f"check name must be non-empty printable text, got {name!r}")
        check = Check(name, float(value), float(tolerance), anchor, relation)
        self.checks.append(check)
        return check

    def note(self, key: str, value: Any) -> None:
        self.notes[key] = _jsonable(value)

    def extend(self, other: "ResidualReport", prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.value, c.tolerance, c.anchor, c.relation))
        for k, v in other.notes.items():
            self.notes[prefix + k] = v

    @property
    def passed(self) -> bool | None:
        """Conjunction of all checks; ``None`` when nothing was asserted."""
        if not self.checks:
            return None
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def scale_tolerances(self, factor: float) -> None:
        for c in self.checks:
            c.tolerance = c.tolerance * factor if c.relation == "le" else c.tolerance / factor

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "scenario": self.scenario,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "notes": _jsonable(self.notes),
            "metadata": _jsonable(self.metadata),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ResidualReport":
        version = data.get("schema_version")
        if version != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema version {version!r}")
        checks = [
            Check(c["name"], c["value"], c["tolerance"], c.get("anchor", ""), c.get("relation", "le"))
            for c in data["checks"]
        ]
        return cls(data["scenario"], checks, dict(data.get("notes", {})), dict(data.get("metadata", {})))

    @classmethod
    def from_json(cls, text: str) -> "ResidualReport":
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["check", "value", "tolerance", "pass"])
        for c in self.checks:
            writer.writerow([c.name, repr(c.value), repr(c.tolerance), str(c.passed).lower()])
        return buf.getvalue()

    def summary_lines(self) -> list[str]:
        lines = []
        for c in self.checks:
            op = "<=" if c.relation == "le" else ">="
            mark = "PASS" if c.passed else "FAIL"
            lines.append(f"[{mark}] {c.name}: {c.value:.3e} {op} {c.tolerance:.3e}")
        return lines
