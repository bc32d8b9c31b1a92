import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bilevel import box_kernel, cumulative, h0_kernel, h1_kernel, x0_signal  # noqa: E402


@pytest.fixture
def x0():
    return x0_signal()


@pytest.fixture
def h0():
    return h0_kernel()


@pytest.fixture
def cum0(h0):
    return cumulative(h0)


@pytest.fixture
def cum1():
    return cumulative(h1_kernel())


@pytest.fixture
def cum_box():
    return cumulative(box_kernel())
