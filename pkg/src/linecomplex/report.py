"""Bookkeeping for identity checks: counts, first failure, worst residual."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, Optional


@dataclass
class Tally:
    name: str
    checked: int = 0
    failed: int = 0
    first_failure: Any = None
    max_residual: Optional[float] = None

    def record(self, ok: bool, where: Any = None, residual: float | None = None) -> bool:
        self.checked += 1
        if residual is not None:
            r = float(residual)
            if self.max_residual is None or r > self.max_residual:
                self.max_residual = r
        if not ok:
            self.failed += 1
            if self.first_failure is None:
                self.first_failure = where
        return ok

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def to_json(self) -> Dict[str, Any]:
        where = self.first_failure
        if isinstance(where, tuple):
            where = _jsonable(where)
        return {
            "checked": self.checked,
            "failed": self.failed,
            "first_failure": where,
            "max_residual": self.max_residual,
        }


def _jsonable(obj):
    if isinstance(obj, tuple):
        return [_jsonable(x) for x in obj]
    return obj


@dataclass
class Report:
    tallies: Dict[str, Tally] = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def tally(self, name: str) -> Tally:
        if name not in self.tallies:
            self.tallies[name] = Tally(name)
        return self.tallies[name]

    @property
    def ok(self) -> bool:
        return all(t.ok for t in self.tallies.values())

    def merge(self, other: "Report") -> "Report":
        for name, t in other.tallies.items():
            mine = self.tally(name)
            mine.checked += t.checked
            mine.failed += t.failed
            if mine.first_failure is None:
                mine.first_failure = t.first_failure
            if t.max_residual is not None:
                if mine.max_residual is None or t.max_residual > mine.max_residual:
                    mine.max_residual = t.max_residual
        self.notes.extend(other.notes)
        return self

    def to_json(self) -> Dict[str, Any]:
        return {
            "ok": self.ok,
            "suites": {name: t.to_json() for name, t in self.tallies.items()},
            "notes": list(self.notes),
        }

    def summary(self) -> str:
        lines = []
        for name, t in self.tallies.items():
            status = "PASS" if t.ok else "FAIL"
            line = f"{status} {name}: {t.checked - t.failed}/{t.checked}"
            if t.max_residual is not None:
                line += f" max_residual={t.max_residual:.3e}"
            if not t.ok:
                line += f" first_failure={_jsonable(t.first_failure)}"
            lines.append(line)
        lines.append("OK" if self.ok else "FAILED")
        return "\n".join(lines)
