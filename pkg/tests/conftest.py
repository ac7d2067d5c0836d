import random

import pytest
from hypothesis import HealthCheck, settings

from galois_forecast.fca import FormalContext

settings.register_profile(
    "ci",
    derandomize=True,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
    deadline=None,
)
settings.load_profile("ci")


def random_context(rng: random.Random, n_objects: int, n_attributes: int, density: float = 0.5) -> FormalContext:
    rows = [
        [1 if rng.random() < density else 0 for _ in range(n_attributes)]
        for _ in range(n_objects)
    ]
    objects = [f"o{i}" for i in range(n_objects)]
    attributes = [f"a{j}" for j in range(n_attributes)]
    return FormalContext.from_incidence(objects, attributes, rows)


@pytest.fixture
def diagonal2() -> FormalContext:
    return FormalContext.from_incidence(["o1", "o2"], ["a1", "a2"], [[1, 0], [0, 1]])


@pytest.fixture
def full2() -> FormalContext:
    return FormalContext.from_incidence(["o1", "o2"], ["a1", "a2"], [[1, 1], [1, 1]])


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0xC0FFEE)
