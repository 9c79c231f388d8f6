from __future__ import annotations

import pytest

from emnetplan.geometry import build_grid
from emnetplan.scenario_gen import default_scenario


@pytest.fixture(scope="session")
def default_sc():
    return default_scenario()


@pytest.fixture(scope="session")
def grid01():
    # 0.1 km cells over the 20 km disaster disk
    return build_grid(20.0, 0.1)


@pytest.fixture(scope="session")
def grid02():
    # coarser grid for optimizer-heavy tests
    return build_grid(20.0, 0.2)
