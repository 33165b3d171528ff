import numpy as np
import pytest

from relequil.central import regular_polygon
from relequil.model import BodyConfiguration, PotentialSpec
from relequil.presets import all_standard_cases


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def triangle():
    return regular_polygon(3)


@pytest.fixture
def square():
    return regular_polygon(4)


@pytest.fixture(params=["homogeneous", "manev", "schwarzschild"])
def any_spec(request):
    return {
        "homogeneous": PotentialSpec.homogeneous(1.0),
        "manev": PotentialSpec.manev(),
        "schwarzschild": PotentialSpec.schwarzschild(),
    }[request.param]


@pytest.fixture
def standard_cases():
    return all_standard_cases()


def random_safe_configuration(rng, n=4, min_distance=0.35, masses=None):
    while True:
        pos = rng.uniform(-1.5, 1.5, size=2 * n)
        try:
            cfg = BodyConfiguration(
                np.ones(n) if masses is None else masses, pos
            )
        except ValueError:
            continue
        if cfg.min_pair_distance() >= min_distance:
            return cfg
