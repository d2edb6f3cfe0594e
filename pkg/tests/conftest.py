import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import pytest

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def iris_path():
    return DATA / "iris.csv"


@pytest.fixture(scope="session")
def iris(iris_path):
    from lzcausal.dataio import load_csv

    return load_csv(iris_path)
