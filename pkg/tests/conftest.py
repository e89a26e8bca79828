import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from beurling_kit.services.convex_geometry import ConvexBody  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def unit_disk():
    return ConvexBody.ball(2)


@pytest.fixture
def unit_interval():
    return ConvexBody.interval(1.0)


@pytest.fixture
def config(tmp_path):
    return {
        "limits": {"point_cap": 5_000_000, "lp_max_frequencies": 200, "lp_max_points": 2000},
        "defaults": {"seed": 42, "tolerance": 1e-9, "jobs": 1},
        "logging": {"level": "INFO", "format": "json"},
        "output": {"dir": str(tmp_path / "reports")},
    }
