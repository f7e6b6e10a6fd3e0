"""Report records emitted by the CLI."""

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

STATUS_PASS = "pass"
STATUS_FAIL = "fail"
STATUS_SKIPPED = "skipped"

CSV_COLUMNS = ("n", "alpha", "abs_a", "abs_b")


@dataclass
class Check:
    """Outcome of one invariant check; ``slack`` is bound minus measured value."""

    name: str
    status: str
    slack: Optional[float] = None
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"name": self.name, "status": self.status}
        if self.slack is not None and math.isfinite(self.slack):
            data["slack"] = float(self.slack)
        if self.detail:
            data["detail"] = self.detail
        return data


@dataclass
class Report:
    """Command echo, input digest, results, certificate and check outcomes."""

    command: str
    flags: Dict[str, Any]
    digest: str
    problem: Optional[Dict[str, Any]] = None
    results: Dict[str, Any] = field(default_factory=dict)
    certificate: Optional[Dict[str, Any]] = None
    checks: List[Check] = field(default_factory=list)
    error: Optional[Dict[str, Any]] = None
    timing: Optional[float] = None
    table: List[List[Any]] = field(default_factory=list)  # CSV rows, not serialized

    def check(self, name: str, value: float, bound: float, detail: str = "") -> Check:
        """Record ``value <= bound``."""
        passed = bool(value <= bound)
        outcome = Check(name, STATUS_PASS if passed else STATUS_FAIL, float(bound - value), detail)
        self.checks.append(outcome)
        return outcome

    def flag(self, name: str, passed: bool, slack: Optional[float] = None, detail: str = "") -> Check:
        outcome = Check(name, STATUS_PASS if passed else STATUS_FAIL, slack, detail)
        self.checks.append(outcome)
        return outcome

    def skip(self, name: str, reason: str) -> Check:
        outcome = Check(name, STATUS_SKIPPED, None, reason)
        self.checks.append(outcome)
        return outcome

    @property
    def failed(self) -> List[Check]:
        return [c for c in self.checks if c.status == STATUS_FAIL]

    @property
    def status(self) -> str:
        if self.error is not None:
            return "error"
        return "failed" if self.failed else "ok"

    def to_dict(self, include_timing: bool = False) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "command": self.command,
            "flags": self.flags,
            "input_digest": self.digest,
            "problem": self.problem,
            "results": self.results,
            "checks": [c.to_dict() for c in self.checks],
            "status": self.status,
        }
        if self.certificate is not None:
            data["certificate"] = self.certificate
        if self.error is not None:
            data["error"] = self.error
        if include_timing and self.timing is not None:
            data["timing_seconds"] = self.timing
        return data

    def summary(self) -> str:
        """Human-readable lines for standard error."""
        lines = [f"ucfactor {self.command}: {self.status}"]
        for key in sorted(self.results):
            value = self.results[key]
            if isinstance(value, (int, float)) and not isinstance(value, bool):
                lines.append(f"  {key:<24} {value:.10g}")
        for c in self.checks:
            slack = "" if c.slack is None else f" (slack {c.slack:.3e})"
            detail = f" - {c.detail}" if c.detail else ""
            lines.append(f"  [{c.status:>7}] {c.name}{slack}{detail}")
        if self.error is not None:
            lines.append(f"  error: {self.error.get('type')}: {self.error.get('message')}")
        if self.timing is not None:
            lines.append(f"  time: {self.timing:.3f}s")
        return "\n".join(lines)


def csv_rows(
    alpha: Optional[Sequence[float]] = None,
    a: Optional[Sequence[complex]] = None,
    b: Optional[Sequence[complex]] = None,
) -> List[List[Any]]:
    """Rows (n, alpha_n, |a_n|, |b_n|); absent columns are left empty."""
    columns = [c for c in (alpha, a, b) if c is not None]
    length = len(columns[0]) if columns else 0
    rows = []
    for n in range(length):
        rows.append(
            [
                n,
                "" if alpha is None else float(alpha[n]),
                "" if a is None else abs(complex(a[n])),
                "" if b is None else abs(complex(b[n])),
            ]
        )
    return rows


def write_csv(path: Union[str, Path], rows: Iterable[Sequence[Any]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(CSV_COLUMNS)
        writer.writerows(rows)
