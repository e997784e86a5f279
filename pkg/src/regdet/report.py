"""Suite reports and their JSON form."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

SCHEMA_VERSION = 1


@dataclass
class SuiteReport:
    suite: str
    cases: list[dict[str, Any]] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.cases)

    def add(self, name: str, parameters: dict[str, Any], passed: bool, **extra: Any) -> None:
        case = {"name": name, "parameters": parameters, "pass": bool(passed)}
        case.update({k: v for k, v in extra.items() if v is not None})
        self.cases.append(case)

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema": SCHEMA_VERSION,
            "suite": self.suite,
            "cases": self.cases,
            "pass": self.passed,
            "elapsed": round(self.elapsed, 6),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def report_json(report: SuiteReport, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(report.to_json())
        fh.write("\n")
