"""Check reports, resource budgets and JSON canonicalization.

Every verification routine in this package returns a CheckReport.  Reports
serialize to a stable JSON shape (schema 1) so that two runs over the same
configuration are byte-identical once the timing field is ignored.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

SCHEMA_VERSION = 1

PASS = "PASS"
FAIL = "FAIL"
VACUOUS = "VACUOUS"
ERROR = "ERROR"

_STATUSES = (PASS, FAIL, VACUOUS, ERROR)


class ResourceBudgetError(RuntimeError):
    """A requested computation exceeds the configured resource budget."""


@dataclass(frozen=True)
class Budget:
    """Hard caps shared by all checks.

    max_field_size:   largest permitted p**(e*m) for a tower.
    max_enum_points:  cap on any single exhaustive point enumeration.
    max_degree:       cap on Moore-determinant and map-composition degrees.
    """

    max_field_size: int = 2 ** 20
    max_enum_points: int = 10 ** 7
    max_degree: int = 200

    def check_field_size(self, size: int) -> None:
        if size > self.max_field_size:
            raise ResourceBudgetError(
                f"field size {size} exceeds budget {self.max_field_size}")

    def check_enum(self, count: int, what: str = "enumeration") -> None:
        if count > self.max_enum_points:
            raise ResourceBudgetError(
                f"{what} of {count} points exceeds budget {self.max_enum_points}")

    def check_degree(self, degree: int, what: str = "degree") -> None:
        if degree > self.max_degree:
            raise ResourceBudgetError(
                f"{what} {degree} exceeds budget {self.max_degree}")


DEFAULT_BUDGET = Budget()


@dataclass
class CheckReport:
    check_id: str
    params: dict
    status: str
    witness: Any = None
    runtime_ms: int = 0

    def __post_init__(self) -> None:
        if self.status not in _STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        if self.status == FAIL and self.witness is None:
            raise ValueError("FAIL reports must carry a witness")
        if self.status == VACUOUS and self.witness is None:
            raise ValueError("VACUOUS reports must carry a reason")

    @property
    def ok(self) -> bool:
        return self.status in (PASS, VACUOUS)

    def to_dict(self) -> dict:
        return {
            "check_id": self.check_id,
            "params": to_jsonable(self.params),
            "status": self.status,
            "witness": to_jsonable(self.witness),
            "runtime_ms": self.runtime_ms,
        }


def to_jsonable(obj: Any) -> Any:
    """Convert report payloads to deterministic JSON-ready values."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, Fraction):
        if obj.denominator == 1:
            return int(obj)
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "to_jsonable"):
        return to_jsonable(obj.to_jsonable())
    if isinstance(obj, float):
        raise TypeError("floats are banned from reports; use Fraction")
    return str(obj)


def dumps(obj: Any) -> str:
    """Canonical JSON text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2) + "\n"


def passfail(condition: bool, check_id: str, params: dict,
             witness_pass: Any = None, witness_fail: Any = None) -> CheckReport:
    if condition:
        return CheckReport(check_id, params, PASS, witness=witness_pass)
    return CheckReport(check_id, params, FAIL,
                       witness=witness_fail if witness_fail is not None else "check failed")
