"""Report records and atomic serialization.

Reports are a pure function of (scenario, seed, version): records carry
no wall-clock data unless timings are explicitly requested, so rerunning
the same scenario yields byte-identical files.  Writes go to a temporary
file in the target directory followed by an atomic rename, so a crash
never leaves a partial report behind.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
from dataclasses import dataclass, field
from typing import Any, Sequence

from .. import __version__

REPORT_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Record:
    """One executed check.

    ``defect`` follows the report convention of the check ops: the margin
    by which the inequality holds, nonnegative meaning pass.  ``status``
    is precomputed so readers need not know each check's sign convention.
    ``runtime`` stays None unless timings were requested.
    """

    name: str
    status: str
    defect: float
    tolerance: float
    runtime: float | None = None
    detail: str = ""

    @classmethod
    def bound(cls, name: str, defect: float, tolerance: float,
              detail: str = "") -> "Record":
        """Record for a defect that must stay above -tolerance."""
        status = "pass" if defect >= -tolerance else "fail"
        return cls(name=name, status=status, defect=float(defect),
                   tolerance=float(tolerance), detail=detail)

    @classmethod
    def residual(cls, name: str, value: float, tolerance: float,
                 detail: str = "") -> "Record":
        """Record for a nonnegative residual that must stay below tolerance."""
        status = "pass" if value <= tolerance else "fail"
        return cls(name=name, status=status, defect=float(value),
                   tolerance=float(tolerance), detail=detail)

    @classmethod
    def flag(cls, name: str, ok: bool, detail: str = "") -> "Record":
        """Record for a yes/no check with no numeric margin."""
        return cls(name=name, status="pass" if ok else "fail",
                   defect=0.0 if ok else -1.0, tolerance=0.0, detail=detail)


@dataclass
class Report:
    task: str
    seed: int
    records: list = field(default_factory=list)
    scenario_name: str = ""
    scenario_echo: dict = field(default_factory=dict)

    @property
    def failed(self) -> list:
        return [r for r in self.records if r.status != "pass"]

    def to_jsonable(self) -> dict:
        return {
            "schema_version": REPORT_SCHEMA_VERSION,
            "version": __version__,
            "task": self.task,
            "seed": self.seed,
            "scenario_name": self.scenario_name,
            "scenario": self.scenario_echo,
            "records": [
                {
                    "name": r.name,
                    "status": r.status,
                    "defect": r.defect,
                    "tolerance": r.tolerance,
                    "runtime": r.runtime,
                    "detail": r.detail,
                }
                for r in self.records
            ],
            "summary": {
                "total": len(self.records),
                "pass": sum(r.status == "pass" for r in self.records),
                "fail": len(self.failed),
            },
        }


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-report-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_report(report: Report, path: str) -> None:
    _atomic_write(path, json.dumps(report.to_jsonable(), indent=2,
                                   sort_keys=True) + "\n")


def write_csv(records: Sequence[Record], path: str) -> None:
    """Defect table: one row per record."""
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["name", "status", "defect", "tolerance", "detail"])
    for r in records:
        writer.writerow([r.name, r.status, repr(r.defect), repr(r.tolerance),
                         r.detail])
    _atomic_write(path, buf.getvalue())


def render_text(report: Report) -> str:
    lines = []
    for r in report.records:
        lines.append(f"{r.status.upper():4s} {r.name}: defect {r.defect:.6g} "
                     f"(tolerance {r.tolerance:.6g})"
                     + (f" [{r.detail}]" if r.detail else ""))
    s = report.to_jsonable()["summary"]
    lines.append(f"{s['pass']}/{s['total']} checks passed")
    return "\n".join(lines)
