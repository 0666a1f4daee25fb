from math import sqrt

import numpy as np

from scipy.special import erfc, gammaincc

from lsc_stego.util.logger import ProjectLogger


DEFAULT_ALPHA = 0.01
MIN_BITS = 100


class TestReport:
    """Outcome of a single statistical test"""

    __test__ = False  # not a pytest class

    def __init__(self, test_name, statistic, p_value, passed, sample_size,
                 reason=None):
        self.test_name = test_name
        self.statistic = float(statistic)
        self.p_value = min(1.0, max(0.0, float(p_value)))
        self.passed = bool(passed)
        self.sample_size = int(sample_size)
        self.reason = reason

    def to_dict(self):
        """Convert the report to a dict ready to be serialised"""

        return {
            'test': self.test_name,
            'statistic': self.statistic,
            'p_value': self.p_value,
            'pass': self.passed,
            'n': self.sample_size
        }

    def __repr__(self):
        verdict = "pass" if self.passed else "fail"
        return f"TestReport({self.test_name}, p={self.p_value:.4g}, {verdict})"


def _bits(bits):
    bits = np.asarray(bits, dtype=np.uint8).reshape(-1)
    if bits.size < MIN_BITS:
        raise SampleSizeException(
            f"At least {MIN_BITS} bits are required, got {bits.size}"
        )

    return bits


def monobit_test(bits, alpha=DEFAULT_ALPHA):
    """Frequency test: balance of ones and zeros"""

    bits = _bits(bits)
    size = bits.size
    ones = int(np.count_nonzero(bits))

    statistic = abs(2 * ones - size) / sqrt(size)
    p_value = erfc(statistic / sqrt(2))

    return TestReport('monobit', statistic, p_value, p_value >= alpha, size)


def runs_test(bits, alpha=DEFAULT_ALPHA):
    """Runs test: number of uninterrupted runs of identical bits"""

    logger = ProjectLogger().get_logger()

    bits = _bits(bits)
    size = bits.size
    ones = np.count_nonzero(bits) / size
    runs = 1 + int(np.count_nonzero(np.diff(bits)))

    if abs(ones - 0.5) >= 2 / sqrt(size):
        reason = f"frequency precondition failed (proportion of ones {ones:.4f})"
        logger.debug("Runs test: %s", reason)
        return TestReport('runs', runs, 0.0, False, size, reason)

    spread = 2 * ones * (1 - ones)
    p_value = erfc(abs(runs - size * spread) / (spread * sqrt(2 * size)))

    return TestReport('runs', runs, p_value, p_value >= alpha, size)


def chi_square_uniformity(values, categories, alpha=DEFAULT_ALPHA):
    """Pearson goodness of fit of integer samples against uniformity"""

    values = np.asarray(values, dtype=np.int64).reshape(-1)
    if categories < 2:
        raise ValueRangeException("At least two categories are required")
    if values.size < 5 * categories:
        raise SampleSizeException(
            f"At least {5 * categories} samples are required for "
            f"{categories} categories, got {values.size}"
        )
    if values.min() < 0 or values.max() >= categories:
        raise ValueRangeException(
            f"Samples must lie in [0, {categories - 1}]"
        )

    counts = np.bincount(values, minlength=categories)
    expected = values.size / categories
    statistic = float(np.sum((counts - expected) ** 2) / expected)
    p_value = gammaincc((categories - 1) / 2, statistic / 2)

    return TestReport(
        'chi_square_uniformity', statistic, p_value, p_value >= alpha,
        values.size
    )


def symbolize(bits, max_width=8):
    """
    Group bits MSB first into the widest symbols that still leave five
    expected samples per symbol value. Returns (symbols, categories).
    """

    bits = np.asarray(bits, dtype=np.uint8).reshape(-1)
    width = max_width
    while width > 1 and bits.size // width < 5 * (1 << width):
        width -= 1

    count = bits.size // width
    groups = bits[:count * width].reshape(count, width).astype(np.int64)
    weights = 1 << np.arange(width - 1, -1, -1, dtype=np.int64)
    return groups @ weights, 1 << width


class RandomnessException(Exception):
    """Base class for exceptions raised by the randomness tests"""


class SampleSizeException(RandomnessException):
    """Raised when a sample is too small for the test's approximation"""


class ValueRangeException(RandomnessException):
    """Raised when a sample lies outside the declared categories"""
