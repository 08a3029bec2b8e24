import numpy as np
import pytest

from riffle.rng import stream


@pytest.fixture
def rng():
    """Fresh deterministic generator, independent of test order."""
    return stream(20260214, 0x7E57)


def make_rng(*path):
    return stream(20260214, 0x7E57, *path)
