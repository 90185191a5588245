import math

import numpy as np
import pytest

from superint_lab.geometry import PhasePoint
from superint_lab.potentials import TTW, Calogero, Evans, Plane23, Wolfes


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def ttw1():
    return TTW(n=1, k=1.0)


@pytest.fixture
def calogero():
    return Calogero(1.0, 1.0, 1.0)


@pytest.fixture
def wolfes():
    return Wolfes(3.0, 3.0, 3.0)


@pytest.fixture(params=("V1", "V2", "V3", "V4"))
def evans(request):
    if request.param == "V4":
        return Evans("V4", k=1.0, k1=1.0, k2=1.0, k3=1.0)
    return Evans(request.param, profile={"name": "inverse_sin2", "params": {"k": 1.0}}, k=0.7)


@pytest.fixture
def plane23():
    return Plane23(profile={"name": "inverse_cos2", "params": {"k": 1.0}})


@pytest.fixture
def reduced_point():
    return PhasePoint("reduced_polar", [1.0, math.pi / 6], [0.0, 1.0])


@pytest.fixture
def out_dir(tmp_path):
    return tmp_path / "out"
