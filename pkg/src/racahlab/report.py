"""Check results shared by the verification routines and the CLI."""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from typing import Any


@dataclass
class CheckResult:
    """Outcome of one numerical identity check.

    ``anchor`` is a short quotation identifying the identity being checked.
    ``residual`` is compared against ``tolerance``; ``details`` carries
    per-case numbers for the report.
    """

    name: str
    anchor: str
    tolerance: float
    residual: float
    passed: bool
    wall_time: float = 0.0
    details: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_residual(cls, name, anchor, tolerance, residual, **details) -> "CheckResult":
        residual = float(residual)
        return cls(name, anchor, float(tolerance), residual, bool(residual < tolerance), details=details)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def line(self) -> str:
        out = f"{self.status} {self.name}: residual={self.residual:.3e} tol={self.tolerance:.1e}"
        failing = self.details.get("failing")
        return f"{out} (failing: {', '.join(failing)})" if failing else out


@contextmanager
def timed():
    """Yield a dict whose ``seconds`` entry is filled on exit."""
    box = {"seconds": 0.0}
    t0 = time.perf_counter()
    try:
        yield box
    finally:
        box["seconds"] = time.perf_counter() - t0


def combine(name: str, anchor: str, parts: list[CheckResult]) -> CheckResult:
    """Merge sub-checks into one result: passes iff all parts pass."""
    worst = max(parts, key=lambda r: r.residual / r.tolerance if r.tolerance else r.residual)
    return CheckResult(
        name,
        anchor,
        worst.tolerance,
        worst.residual,
        all(p.passed for p in parts),
        sum(p.wall_time for p in parts),
        {"parts": [p.to_dict() for p in parts]},
    )
