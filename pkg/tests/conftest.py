import numpy as np
import pytest
from hypothesis import settings

from dspqsl import rydberg
from dspqsl.cli import DEMO_POPULATIONS

settings.register_profile("workbench", deadline=None)
settings.load_profile("workbench")


@pytest.fixture(scope="session")
def model():
    return rydberg.build_model()


@pytest.fixture(scope="session")
def demo_pops():
    return np.array(DEMO_POPULATIONS)
