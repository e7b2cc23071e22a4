import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

SQRT_HALF = 1 / math.sqrt(2)


@pytest.fixture
def bell():
    from geoment import DenseTensor

    return DenseTensor(np.array([[SQRT_HALF, 0], [0, SQRT_HALF]], dtype=complex))


def unit(v):
    v = np.asarray(v, dtype=complex)
    return v / np.linalg.norm(v)


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        name, ok = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:>2}: {'PASS' if ok else 'FAIL'}  {name}")
