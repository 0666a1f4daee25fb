import numpy as np

from scipy.special import gammaincc

from lsc_stego.controller.media import BITS_PER_PIXEL, bit_plane
from lsc_stego.controller.randomness import DEFAULT_ALPHA, TestReport, \
    monobit_test
from lsc_stego.util.logger import ProjectLogger


# Pairs whose expected count falls below this are left out of the statistic
MIN_EXPECTED = 5


def pair_histogram(img):
    """Counts of the even and odd member of each pair of values (2i, 2i+1)"""

    histogram = np.bincount(img.pixels, minlength=256)
    return histogram[0::2], histogram[1::2]


def lsb_chi_square_attack(img, alpha=DEFAULT_ALPHA):
    """
    Pairs-of-values attack on the lowest bit plane.

    Replacing the lowest bits with random ones equalises the counts of 2i and
    2i+1. The p-value is read as the likelihood of such an embedding: close
    to 1 for equalised pairs, close to 0 for the skew of natural images.
    The report passes when the image is not flagged, p < 1 - alpha.
    """

    logger = ProjectLogger().get_logger()

    even, odd = pair_histogram(img)
    expected = (even + odd) / 2
    usable = expected >= MIN_EXPECTED
    pairs = int(np.count_nonzero(usable))

    if pairs < 2:
        raise DegenerateHistogramException(
            f"Only {pairs} pair(s) of values hold enough samples"
        )

    statistic = float(np.sum(
        (even[usable] - expected[usable]) ** 2 / expected[usable]
    ))
    likelihood = gammaincc((pairs - 1) / 2, statistic / 2)

    logger.debug(
        "Chi-square attack over %d pairs: statistic %.3f", pairs, statistic
    )
    return TestReport(
        'lsb_chi_square_attack', statistic, likelihood,
        likelihood < 1 - alpha, img.pixels.size
    )


def survey_bit_planes(img, alpha=DEFAULT_ALPHA):
    """Frequency test on every in-pixel bit plane, MSB first"""

    reports = []
    for position in range(BITS_PER_PIXEL):
        report = monobit_test(bit_plane(img, position), alpha)
        report.test_name = f'monobit_plane_{position}'
        reports.append(report)

    return reports


class SteganalysisException(Exception):
    """Base class for exceptions raised by the steganalysis probes"""


class DegenerateHistogramException(SteganalysisException):
    """Raised when the histogram mass sits in fewer than two pairs"""
