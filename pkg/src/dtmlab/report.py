"""Check/report records with deterministic JSON output."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .extreal import Infinity, format_value
from .topology import SpaceModel, bits

MAX_WITNESSES = 5


def region_json(space: SpaceModel, mask: int) -> dict:
    return {"cells": list(bits(mask)), "labels": space.labels(mask)}


def to_jsonable(obj: Any) -> Any:
    from fractions import Fraction

    if isinstance(obj, (Infinity, Fraction)):
        return format_value(obj)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "to_json"):
        return obj.to_json()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


@dataclass
class Check:
    """One verified claim.  ``passed`` is None when the claim does not apply.

    ``kind="verdict"`` marks a classification outcome: it is reported but a
    False does not make the enclosing report fail.
    """

    name: str
    claim: str
    passed: bool | None = True
    checked: int = 0
    witnesses: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    data: dict = field(default_factory=dict)
    kind: str = "assert"

    def fail(self, witness: Any) -> None:
        self.passed = False
        if len(self.witnesses) < MAX_WITNESSES:
            self.witnesses.append(witness)

    def to_json(self) -> dict:
        return {"name": self.name, "claim": self.claim, "passed": self.passed,
                "checked": self.checked, "witnesses": to_jsonable(self.witnesses),
                "notes": list(self.notes), "data": to_jsonable(self.data),
                "kind": self.kind}


@dataclass
class Report:
    title: str
    checks: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    @property
    def passed(self) -> bool:
        return all(c.passed is not False for c in self.checks if c.kind == "assert")

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if c.passed is False and c.kind == "assert"]

    def to_json(self) -> dict:
        return {"title": self.title, "passed": self.passed,
                "checks": [c.to_json() for c in self.checks], "data": to_jsonable(self.data)}
