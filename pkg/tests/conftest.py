import os

import numpy as np
import pytest

from barriersim.arm import ArmDescription

DATA_DIR = os.path.join(os.path.dirname(__file__), "..", "src", "barriersim", "data")


def data_path(name: str) -> str:
    return os.path.abspath(os.path.join(DATA_DIR, name))


@pytest.fixture(scope="session")
def planar_arm() -> ArmDescription:
    return ArmDescription.from_file(data_path("planar_2link.json"))


@pytest.fixture(scope="session")
def cobot_arm() -> ArmDescription:
    return ArmDescription.from_file(data_path("cobot_6dof.json"))


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(20240819)
