import importlib.resources

import numpy as np
import pytest


@pytest.fixture(scope="session")
def students_path(tmp_path_factory):
    src = importlib.resources.files("uapca").joinpath("data/students.json")
    out = tmp_path_factory.mktemp("data") / "students.json"
    out.write_bytes(src.read_bytes())
    return out


@pytest.fixture(scope="session")
def iris_path(tmp_path_factory):
    src = importlib.resources.files("uapca").joinpath("data/iris.csv")
    out = tmp_path_factory.mktemp("data") / "iris.csv"
    out.write_bytes(src.read_bytes())
    return out


def random_psd(rng: np.random.Generator, dim: int) -> np.ndarray:
    a = rng.standard_normal((dim, dim))
    m = a @ a.T / dim
    return (m + m.T) / 2.0
