import os

import numpy as np
import pytest

from lsc_stego.controller.media import Image, SignificationFunction
from lsc_stego.controller.strategy import StegoKey
from lsc_stego.model.options import GeneratorId


FIXTURES = os.path.join(os.path.dirname(__file__), 'fixtures')


def read_fixture(name):
    with open(os.path.join(FIXTURES, name), 'rb') as file:
        return file.read()


def natural_cover(seed, width=128, height=128, spread=3.0):
    """Smooth, skewed histogram standing in for a photograph"""

    rng = np.random.default_rng(seed)
    values = np.rint(rng.normal(128.3, spread, size=width * height))
    return Image(width, height, 255, np.clip(values, 0, 255))


def random_cover(seed, width, height):
    rng = np.random.default_rng(seed)
    return Image(width, height, 255, rng.integers(0, 256, width * height))


def fast_key(label):
    seed = label.to_bytes(4, 'big') * 4 if isinstance(label, int) else label
    return StegoKey(seed, GeneratorId.FAST)


@pytest.fixture
def fixture_bytes():
    return read_fixture


@pytest.fixture
def grayscale():
    return SignificationFunction.grayscale()


@pytest.fixture
def key():
    return StegoKey(bytes(range(16)), GeneratorId.FAST)


@pytest.fixture
def bbs_key():
    return StegoKey(bytes(range(100, 132)), GeneratorId.BBS)
