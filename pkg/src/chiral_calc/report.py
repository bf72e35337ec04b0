from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Check:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class Report:
    """Ordered pass/fail items plus free-form values (ranks, tables)."""

    title: str
    checks: list = field(default_factory=list)
    values: dict = field(default_factory=dict)

    def add(self, name: str, passed: bool, **detail) -> bool:
        self.checks.append(Check(name, bool(passed), detail))
        return bool(passed)

    def extend(self, other: Report, prefix: str = "") -> None:
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.passed, c.detail))

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "ok": self.ok,
            "checks": [c.to_dict() for c in self.checks],
            "values": self.values,
        }

    def lines(self) -> list[str]:
        out = [f"== {self.title}"]
        for c in self.checks:
            mark = "PASS" if c.passed else "FAIL"
            line = f"  [{mark}] {c.name}"
            if not c.passed and c.detail:
                line += "  " + "; ".join(f"{k}={v}" for k, v in c.detail.items())
            out.append(line)
        for k, v in self.values.items():
            out.append(f"  {k}: {v}")
        return out
