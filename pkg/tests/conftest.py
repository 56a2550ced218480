import random
import sys
from importlib import resources

import pytest

from cubeplan.model import (BlockSpec, Design, DesignConfig, ImplementationCandidate, Strategy,
                            load_design)


def random_design(rng: random.Random, n: int, z_con: int, max_cands: int = 3) -> Design:
    """Blocks with 1..max_cands candidates of random size and height <= z_con."""
    blocks = []
    for i in range(n):
        cands = []
        for _ in range(rng.randint(1, max_cands)):
            cands.append(ImplementationCandidate(
                rng.uniform(0.5, 10.0), rng.uniform(0.5, 10.0), rng.randint(1, z_con),
                rng.uniform(0, 100), rng.uniform(0, 50), Strategy.BASE_2D))
        blocks.append(BlockSpec(f"b{i}", f"b{i}", tuple(cands)))
    cfg = DesignConfig(layer_limit=z_con, whitespace_fraction=0.0)
    return Design(tuple(blocks), (), (), cfg)


def random_selection(design: Design, rng: random.Random) -> list[int]:
    return [rng.randrange(len(b.candidates)) for b in design.blocks]


@pytest.fixture(scope="session")
def driver_path():
    return str(resources.files("cubeplan") / "data" / "driver.json")


@pytest.fixture(scope="session")
def driver(driver_path):
    return load_design(driver_path)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
