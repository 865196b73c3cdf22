from __future__ import annotations

from pathlib import Path

import pytest

from laser_eval.textnorm import load_pack

DATA_DIR = Path(__file__).parent / "data"

# The worked sentence pairs used across the suite.
HI_REF = "vo bhajansangraha ke paas walaa A.T.M. das times sundar hai skool se"
HI_HYP = "vaha bhajan sangraha komal paaswala aytiem 10 par taims sundar hain skul se"
EN_REF = "The colorful bumblebee stung unlucky Priya 3 times on the arm though."
EN_HYP = "The colourful bumble-bee strung Pria three times on the arms tho."


@pytest.fixture(scope="session")
def hi_pack():
    return load_pack("hi")


@pytest.fixture(scope="session")
def en_pack():
    return load_pack("en")


@pytest.fixture(scope="session")
def mr_pack():
    return load_pack("mr")


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR
