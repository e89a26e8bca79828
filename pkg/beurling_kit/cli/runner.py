"""
Scenario Runner
Executes validated scenarios on a worker pool and writes the report files
"""

import asyncio
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import structlog

from config.environments.env_loader import EnvironmentLoader

from .. import __version__
from ..verification.orchestrator import CheckOrchestrator
from ..verification.reports import VerificationReport, write_csv_summary, write_json_reports
from .plot_data import emit_plot_data
from .scenario import Scenario, load_scenario

logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2


@dataclass
class RunResult:
    reports: List[VerificationReport]
    out_dir: Path
    files: List[Path]

    @property
    def failures(self) -> int:
        return sum(r.counts_as_failure for r in self.reports)

    @property
    def skipped(self) -> int:
        return sum(r.status == "skipped" for r in self.reports)

    @property
    def exit_code(self) -> int:
        return EXIT_FAILED if self.failures else EXIT_OK


class ScenarioRunner:
    """Runs the checks of one scenario; report order follows declaration order"""

    def __init__(self, config: Dict[str, Any], seed: Optional[int] = None, jobs: Optional[int] = None,
                 cap_points: Optional[int] = None, out_dir: Optional[str] = None):
        self.config = config
        self.seed_override = seed
        self.jobs_override = jobs
        self.cap_override = cap_points
        self.out_override = out_dir

    def _settings(self, scenario: Scenario) -> Dict[str, Any]:
        """CLI flag > scenario file > environment > defaults"""
        defaults = self.config.get("defaults", {})
        limits = self.config.get("limits", {})

        def pick(flag, from_scenario, from_env):
            return next(v for v in (flag, from_scenario, from_env) if v is not None)

        out_dir = pick(self.out_override, scenario.output.dir,
                       str(Path(self.config.get("output", {}).get("dir", "reports")) / scenario.name))
        return {
            "seed": pick(self.seed_override, scenario.seed, defaults.get("seed", 42)),
            "jobs": pick(self.jobs_override, scenario.jobs, defaults.get("jobs", 1)),
            "cap": pick(self.cap_override, scenario.cap_points, limits.get("point_cap", 5_000_000)),
            "out_dir": Path(out_dir),
        }

    async def run(self, scenario: Scenario) -> RunResult:
        settings = self._settings(scenario)
        config = {**self.config, "limits": {**self.config.get("limits", {}), "point_cap": settings["cap"]}}
        logger.info("Running scenario", scenario=scenario.name, checks=len(scenario.checks),
                    seed=settings["seed"], jobs=settings["jobs"], cap=settings["cap"])

        with ThreadPoolExecutor(max_workers=settings["jobs"]) as executor:
            orchestrator = CheckOrchestrator(config, executor)
            tasks = []
            for check in scenario.checks:
                params = check.params()
                params.setdefault("seed", settings["seed"])
                tasks.append(orchestrator.process_check(check.kind, params))
            batches = await asyncio.gather(*tasks)

        reports = [report for batch in batches for report in batch]
        files = self._write(scenario, reports, settings)
        result = RunResult(reports, settings["out_dir"], files)
        logger.info("Scenario finished", scenario=scenario.name, reports=len(reports),
                    failures=result.failures, skipped=result.skipped, exit_code=result.exit_code)
        return result

    def _write(self, scenario: Scenario, reports: List[VerificationReport],
               settings: Dict[str, Any]) -> List[Path]:
        out_dir: Path = settings["out_dir"]
        files = [
            write_json_reports(reports, out_dir / "reports.json"),
            write_csv_summary(reports, out_dir / "summary.csv"),
        ]
        if scenario.output.plot_data:
            files.extend(emit_plot_data(reports, out_dir))
        metadata = {
            "scenario": scenario.name,
            "version": __version__,
            "seed": settings["seed"],
            "jobs": settings["jobs"],
            "point_cap": settings["cap"],
            "reports": len(reports),
            "finished_at": datetime.now(timezone.utc).isoformat(),
        }
        meta_path = out_dir / "metadata.json"
        meta_path.write_text(json.dumps(metadata, sort_keys=True, indent=2) + "\n", encoding="utf-8")
        files.append(meta_path)
        return files


def run_scenario_sync(scenario: Scenario, config: Dict[str, Any], **overrides: Any) -> RunResult:
    return asyncio.run(ScenarioRunner(config, **overrides).run(scenario))


def run_scenario(path: Union[str, Path], config: Optional[Dict[str, Any]] = None,
                 **overrides: Any) -> RunResult:
    """Validate the scenario file, run every check and write the report files

    Raises ConfigError before any check runs when the file does not validate.
    """
    scenario = load_scenario(path)
    if config is None:
        config = EnvironmentLoader().load()
    return run_scenario_sync(scenario, config, **overrides)
