"""
Verification Reports
Outcome records of individual checks and their JSON/CSV serialization
"""

import csv
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

import numpy as np
import structlog

logger = structlog.get_logger(__name__)

STATUS_PASSED = "passed"
STATUS_FAILED = "failed"
STATUS_SKIPPED = "skipped"
STATUS_ERROR = "error"
STATUS_INFO = "info"

CSV_SUMMARY_HEADER = ["check_name", "margin", "error_budget", "passed"]


def json_safe(value: Any) -> Any:
    """Convert numpy scalars, arrays and non-finite floats into JSON values"""
    if isinstance(value, dict):
        return {str(k): json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(v) for v in value]
    if isinstance(value, np.ndarray):
        return json_safe(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, complex):
        return {"re": json_safe(value.real), "im": json_safe(value.imag)}
    return value


@dataclass
class VerificationReport:
    """Result of one check

    ``passed`` holds exactly when ``margin + error_budget >= 0``; skipped
    checks carry a NaN margin and are never counted as failures.
    """

    check_name: str
    inputs: Dict[str, Any]
    measured: Dict[str, float]
    bound: Dict[str, float]
    margin: float
    error_budget: float
    passed: bool
    status: str
    notes: List[str] = field(default_factory=list)

    @classmethod
    def build(
        cls,
        check_name: str,
        inputs: Dict[str, Any],
        measured: Dict[str, float],
        bound: Dict[str, float],
        margin: float,
        error_budget: float = 0.0,
        notes: Optional[List[str]] = None,
    ) -> "VerificationReport":
        passed = bool(margin + error_budget >= 0.0)
        return cls(
            check_name=check_name,
            inputs=inputs,
            measured={k: float(v) for k, v in measured.items()},
            bound={k: float(v) for k, v in bound.items()},
            margin=float(margin),
            error_budget=float(error_budget),
            passed=passed,
            status=STATUS_PASSED if passed else STATUS_FAILED,
            notes=list(notes or []),
        )

    @classmethod
    def skipped(cls, check_name: str, inputs: Dict[str, Any], reason: str) -> "VerificationReport":
        return cls(check_name, inputs, {}, {}, float("nan"), 0.0, False, STATUS_SKIPPED, [reason])

    @classmethod
    def errored(cls, check_name: str, inputs: Dict[str, Any], reason: str) -> "VerificationReport":
        return cls(check_name, inputs, {}, {}, float("nan"), 0.0, False, STATUS_ERROR, [reason])

    @classmethod
    def informational(cls, check_name: str, inputs: Dict[str, Any], measured: Dict[str, float],
                      notes: Optional[List[str]] = None) -> "VerificationReport":
        """A measurement reported without a verdict"""
        return cls(check_name, inputs, {k: float(v) for k, v in measured.items()}, {}, 0.0, 0.0,
                   True, STATUS_INFO, list(notes or []))

    @property
    def digest(self) -> str:
        canonical = json.dumps(json_safe(self.inputs), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]

    @property
    def counts_as_failure(self) -> bool:
        return self.status in (STATUS_FAILED, STATUS_ERROR)

    def to_dict(self) -> Dict[str, Any]:
        return json_safe({
            "check_name": self.check_name,
            "inputs": self.inputs,
            "digest": self.digest,
            "measured": self.measured,
            "bound": self.bound,
            "margin": self.margin,
            "error_budget": self.error_budget,
            "passed": self.passed,
            "status": self.status,
            "notes": self.notes,
        })


def reports_to_json(reports: Iterable[VerificationReport]) -> str:
    """Serialize reports deterministically (sorted keys, fixed separators)"""
    return json.dumps([r.to_dict() for r in reports], sort_keys=True, indent=2) + "\n"


def write_json_reports(reports: List[VerificationReport], path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(reports_to_json(reports), encoding="utf-8")
    logger.info("JSON reports written", path=str(path), count=len(reports))
    return path


def write_csv_summary(reports: List[VerificationReport], path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_SUMMARY_HEADER)
        for report in reports:
            writer.writerow([
                report.check_name,
                repr(report.margin),
                repr(report.error_budget),
                "true" if report.passed else "false",
            ])
    logger.info("CSV summary written", path=str(path), rows=len(reports))
    return path
