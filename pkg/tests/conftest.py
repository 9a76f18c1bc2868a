import pytest

import macjam as mj
from macjam.cli import run_sweep


@pytest.fixture(scope="session")
def fig_setup():
    spec = mj.load_scenario(mj.bundled_scenario_path("fig2.scenario"))
    return spec, mj.to_system_config(spec)


@pytest.fixture(scope="session")
def fig_sweep_rows(fig_setup):
    """Full bundled sweep (71 points, Monte Carlo included); shared session-wide."""
    spec, _ = fig_setup
    return run_sweep(spec)
