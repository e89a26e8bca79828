"""
Plot data
Plain CSV series for external plotting; nothing is rendered here
"""

import csv
from pathlib import Path
from typing import Iterable, List, Sequence

import structlog

from ..verification.reports import STATUS_FAILED, STATUS_PASSED, VerificationReport

logger = structlog.get_logger(__name__)

CONSTANTS_HEADER = ["rho", "c2", "c3"]
THEOREM3_HEADER = ["rho", "inv_cos_rho", "measured_ratio"]
EXTREMAL_HEADER = ["a", "ratio_lower_bound"]


def _write_rows(path: Path, header: Sequence[str], rows: Iterable[Sequence[float]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) for v in row])
    return path


def emit_plot_data(reports: List[VerificationReport], out_dir: Path) -> List[Path]:
    """Write constants.csv, theorem3_ratios.csv and extremal_sweep.csv

    Every file is written, header-only when no report feeds it.
    """
    out_dir = Path(out_dir)
    evaluated = (STATUS_PASSED, STATUS_FAILED)
    constants = [(r.inputs["rho"], r.bound["c2"], r.measured["c3"])
                 for r in reports if r.check_name == "constants" and r.status in evaluated]
    ratios = [(r.measured["rho_cert"], r.bound["constant"], r.measured["ratio"])
              for r in reports if r.check_name == "theorem3" and r.status in evaluated]
    extremal = [(r.inputs["spacing"], r.measured["ratio_lower_bound"])
                for r in reports if r.check_name == "extremal" and "ratio_lower_bound" in r.measured]

    files = [
        _write_rows(out_dir / "constants.csv", CONSTANTS_HEADER, constants),
        _write_rows(out_dir / "theorem3_ratios.csv", THEOREM3_HEADER, ratios),
        _write_rows(out_dir / "extremal_sweep.csv", EXTREMAL_HEADER, extremal),
    ]
    logger.info("Plot data written", out_dir=str(out_dir), constants=len(constants),
                theorem3=len(ratios), extremal=len(extremal))
    return files
