"""Structured check records and report containers.

Reports are plain data: every check carries its residual(s), the
tolerance it was judged against and an optional defect rank or
hypothesis-failure note, so a false verdict is always traceable to a
reason.
"""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class CheckRecord:
    name: str
    residual: float | None
    tolerance: float
    passed: bool
    frobenius: float | None = None
    level: int | None = None
    defect_rank: int | None = None
    off_defect_residual: float | None = None
    hypothesis_failure: str | None = None

    def to_dict(self) -> dict:
        out = {"name": self.name, "tolerance": self.tolerance, "passed": self.passed}
        for key in ("residual", "frobenius", "level", "defect_rank",
                    "off_defect_residual", "hypothesis_failure"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        return out

    def render(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        where = f" m={self.level}" if self.level is not None else ""
        if self.hypothesis_failure is not None:
            return f"  [{tag}] {self.name}{where}: hypothesis failure: {self.hypothesis_failure}"
        extra = ""
        if self.defect_rank is not None:
            extra = f" defect_rank={self.defect_rank}"
            if self.off_defect_residual is not None:
                extra += f" off_defect={self.off_defect_residual:.3e}"
        return (f"  [{tag}] {self.name}{where}: residual={self.residual:.3e}"
                f" (tol {self.tolerance:.1e}){extra}")


@dataclass
class AnalysisReport:
    verdict: bool
    reason: str | None
    residual_tol: float
    rank_tol: float
    max_level: int
    checks: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def failed_checks(self):
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "reason": self.reason,
            "residual_tol": self.residual_tol,
            "rank_tol": self.rank_tol,
            "max_level": self.max_level,
            "checks": [c.to_dict() for c in self.checks],
            "info": self.info,
        }

    def render(self) -> str:
        lines = [
            f"detailed balance verdict: {'true' if self.verdict else 'false'}"
            + (f" (reason: {self.reason})" if self.reason else ""),
            f"tolerances: residual {self.residual_tol:.1e}, rank {self.rank_tol:.1e},"
            f" max level {self.max_level}",
        ]
        for key, val in self.info.items():
            lines.append(f"  {key}: {val}")
        lines.extend(c.render() for c in self.checks)
        return "\n".join(lines)


@dataclass
class RelationsReport:
    relation: str
    verdict: bool
    tolerance: float
    checks: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def check(self, name: str) -> CheckRecord:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "relation": self.relation,
            "verdict": self.verdict,
            "tolerance": self.tolerance,
            "checks": [c.to_dict() for c in self.checks],
            "info": self.info,
        }

    def render(self) -> str:
        lines = [f"{self.relation} relations: {'true' if self.verdict else 'false'}"
                 f" (tol {self.tolerance:.1e})"]
        for key, val in self.info.items():
            lines.append(f"  {key}: {val}")
        lines.extend(c.render() for c in self.checks)
        return "\n".join(lines)
