"""
Shared fixtures for the markovcanon test suite
"""

from fractions import Fraction
from pathlib import Path

import pytest
from loguru import logger

from markovcanon.core.catalog import (
    HOMOGENEOUS,
    drunkard_rho,
    drunkard_ruin,
    drunkard_z2_extension,
    random_relabeling,
    two_cycle,
)
from markovcanon.parsers.sgf import emit_gsp, emit_sgf

DRUNKARD_SGF = """\
# finite Drunkard's Ruin on three states
graph drunkard-3
rho 0 2/3
rho 1 1/3
vertex 1
vertex 2
vertex 3
edge 0:1 1 1 2/3 label=0
edge 1:1 1 2 1/3 label=1
edge 0:2 2 1 2/3 label=0
edge 1:2 2 3 1/3 label=1
edge 0:3 3 2 2/3 label=0
edge 1:3 3 3 1/3 label=1
"""


@pytest.fixture(autouse=True)
def quiet_logger():
    """Keep library logging out of captured output unless a test asks for it."""
    logger.remove()
    yield
    logger.remove()


@pytest.fixture
def rho():
    return drunkard_rho(Fraction(1, 3))


@pytest.fixture
def homogeneous():
    return HOMOGENEOUS


@pytest.fixture
def drunkard3():
    return drunkard_ruin(3)


@pytest.fixture
def drunkard4():
    return drunkard_ruin(4)


@pytest.fixture
def z2_three():
    return drunkard_z2_extension(3)


@pytest.fixture
def z2_four():
    return drunkard_z2_extension(4)


@pytest.fixture
def cycle():
    return two_cycle()


@pytest.fixture
def drunkard_file(tmp_path) -> Path:
    path = tmp_path / "drunkard.sgf"
    path.write_text(DRUNKARD_SGF)
    return path


@pytest.fixture
def relabeled_drunkard_file(tmp_path, drunkard3) -> Path:
    relabeling = random_relabeling(drunkard3.graph, seed=11)
    path = tmp_path / "shuffled.sgf"
    path.write_text(emit_sgf(relabeling.graph, drunkard3.rho, relabeling.labels(drunkard3.labels)))
    return path


@pytest.fixture
def z2_files(tmp_path, z2_three, z2_four) -> tuple[Path, Path]:
    first = tmp_path / "z2-three.sgf"
    second = tmp_path / "z2-four.sgf"
    first.write_text(emit_gsp(z2_three, name="z2-three"))
    second.write_text(emit_gsp(z2_four, name="z2-four"))
    return first, second
