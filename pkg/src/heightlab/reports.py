"""Check reports: bound rows, audit rows, and CSV emission."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, fields
from typing import Iterable

BOUND_COLUMNS = ("check_name", "graph_id", "instance", "bound", "actual", "slack", "pass")
AUDIT_COLUMNS = ("graph_id", "labeling_id", "check", "detail", "pass")

TOL = 1e-9


@dataclass(frozen=True)
class BoundRow:
    check_name: str
    graph_id: str
    instance: str
    bound: float
    actual: float
    slack: float
    passed: bool

    @classmethod
    def lower(cls, check_name: str, graph_id: str, instance: str, bound: float, actual: float, tol: float = TOL):
        """Row for a claim ``actual >= bound``."""
        slack = actual - bound
        return cls(check_name, graph_id, instance, bound, actual, slack, slack >= -tol)

    @classmethod
    def upper(cls, check_name: str, graph_id: str, instance: str, bound: float, actual: float, tol: float = TOL):
        """Row for a claim ``actual <= bound``."""
        slack = bound - actual
        return cls(check_name, graph_id, instance, bound, actual, slack, slack >= -tol)

    def as_tuple(self) -> tuple:
        return (self.check_name, self.graph_id, self.instance, self.bound, self.actual, self.slack, int(self.passed))


@dataclass(frozen=True)
class AuditRow:
    graph_id: str
    labeling_id: str
    check: str
    detail: str
    passed: bool

    def as_tuple(self) -> tuple:
        return (self.graph_id, self.labeling_id, self.check, self.detail, int(self.passed))


@dataclass
class Report:
    """Ordered collection of rows from one or more checks."""

    name: str
    rows: list = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def add(self, row) -> None:
        self.rows.append(row)

    def extend(self, rows: Iterable) -> None:
        self.rows.extend(rows)

    def merge(self, other: "Report") -> "Report":
        self.rows.extend(other.rows)
        self.notes.extend(other.notes)
        return self

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def violations(self) -> list:
        return sorted((r for r in self.rows if not r.passed), key=lambda r: r.as_tuple())

    @property
    def min_slack(self) -> float | None:
        s = [r.slack for r in self.rows if isinstance(r, BoundRow)]
        return min(s) if s else None

    def to_csv(self) -> str:
        bound = [r for r in self.rows if isinstance(r, BoundRow)]
        audit = [r for r in self.rows if isinstance(r, AuditRow)]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if bound or not audit:
            w.writerow(BOUND_COLUMNS)
            w.writerows(r.as_tuple() for r in bound)
        if audit:
            w.writerow(AUDIT_COLUMNS)
            w.writerows(r.as_tuple() for r in audit)
        return buf.getvalue()

    def summary(self) -> str:
        bad = len(self.violations)
        ms = self.min_slack
        tail = f", min slack {ms:.6g}" if ms is not None else ""
        return f"{self.name}: {len(self.rows)} rows, {bad} violations{tail}"


def parse_bound_csv(text: str) -> list[BoundRow]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != BOUND_COLUMNS:
        raise ValueError("not a bound-row CSV")
    out = []
    for r in rows[1:]:
        out.append(BoundRow(r[0], r[1], r[2], float(r[3]), float(r[4]), float(r[5]), r[6] == "1"))
    return out


def row_fields(cls) -> list[str]:
    return [f.name for f in fields(cls)]
