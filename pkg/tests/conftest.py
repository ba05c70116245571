import pytest

import scalereg


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # Compile the accelerated kernels once up front so that the timed
    # acceptance criteria measure compute, not JIT latency.
    scalereg.warmup()
