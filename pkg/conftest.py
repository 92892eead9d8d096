# conftest.py - SHARED TEST FIXTURES

import numpy as np
import pytest

from elements.bdm1 import REFERENCE_VERTICES
from elements.dofmap import build_dofmap
from meshing.lshape import Mesh, build_lshape, refine_uniform


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run the convergence-rate studies")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: multi-minute convergence study")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(scope="session")
def mesh1():
    return build_lshape(1)


@pytest.fixture(scope="session")
def mesh2():
    return build_lshape(2)


@pytest.fixture(scope="session")
def mesh4():
    return build_lshape(4)


@pytest.fixture(scope="session")
def refined2(mesh2):
    """Uniform refinement of the n=2 mesh (parent links kept)"""
    return refine_uniform(mesh2)


@pytest.fixture(scope="session")
def reference_mesh():
    return Mesh(REFERENCE_VERTICES, np.array([[0, 1, 2]]))


@pytest.fixture(scope="session")
def dofmap2(mesh2):
    return build_dofmap(mesh2)
