"""
Exhaustive check that the stego channel is uniform whenever the cover
channel and the message are, for every key: p(Y | K) == p(X).

All probabilities are exact fractions; states are encoded as integers whose
most significant bit is channel position 0.
"""

from collections import namedtuple
from fractions import Fraction

import numpy as np

from lsc_stego.controller.di3 import di3_embed_batch
from lsc_stego.controller.strategy import StegoKey, generate_strategy
from lsc_stego.model.options import GeneratorId
from lsc_stego.util.logger import ProjectLogger


MAX_ENUMERATED_BITS = 24
MAX_CHANNEL_BITS = 16
# Cover-message pairs embedded at once
BLOCK_PAIRS = 1 << 16

DEFAULT_SEED = bytes.fromhex("5ec0de5ec0de5ec0de5ec0de5ec0de00")

SecurityVerdict = namedtuple("SecurityVerdict", "uniform max_deviation table")


class DistributionTable:
    """Exact count of every N-bit state"""

    def __init__(self, n_bits, counts):
        counts = np.asarray(counts, dtype=np.int64)
        if counts.size != 1 << n_bits:
            raise SecurityException(
                f"Expected {1 << n_bits} state counts, got {counts.size}"
            )

        self.n_bits = n_bits
        self.counts = counts
        self.total = int(counts.sum())

    def probability(self, state):
        """Exact probability of one state"""

        return Fraction(int(self.counts[state]), self.total)

    def max_deviation(self):
        """Largest |p(y) - 2^-N| over all states"""

        uniform = Fraction(1, 1 << self.n_bits)
        return max(abs(self.probability(state) - uniform)
                   for state in range(self.counts.size))

    def is_uniform(self):
        """True when every state is exactly equally likely"""

        # count * 2^N == total for every state, in integers
        return self.total > 0 and all(
            int(count) << self.n_bits == self.total for count in self.counts
        )

    def __eq__(self, other):
        """Equal probability models, whatever the sample sizes"""

        return isinstance(other, DistributionTable) \
            and self.n_bits == other.n_bits \
            and all(self.probability(s) == other.probability(s)
                    for s in range(self.counts.size))

    def to_dict(self):
        """Convert the table summary to a dict ready to be serialised"""

        deviation = self.max_deviation()
        return {
            'n_bits': self.n_bits,
            'total': self.total,
            'max_deviation_num': deviation.numerator,
            'max_deviation_den': deviation.denominator,
            'uniform': self.is_uniform()
        }


def all_vectors(width):
    """Every vector of B^width, one per row, in counting order"""

    states = np.arange(1 << width, dtype=np.int64)
    shifts = np.arange(width - 1, -1, -1, dtype=np.int64)
    return ((states[:, None] >> shifts) & 1).astype(np.uint8)


def encode_states(vectors):
    """Integer code of bit vectors along the last axis"""

    codes = np.zeros(vectors.shape[:-1], dtype=np.int64)
    for column in range(vectors.shape[-1]):
        codes <<= 1
        codes |= vectors[..., column]
    return codes


def enumerate_stego_distribution(n_bits, p_width, strategies,
                                 embedder=di3_embed_batch):
    """Count stego states over all covers, all messages and the strategies"""

    logger = ProjectLogger().get_logger()

    if not 1 <= p_width <= n_bits:
        raise EnumerationBoundException(
            f"Need 1 <= P <= N, got N={n_bits}, P={p_width}"
        )
    if n_bits > MAX_CHANNEL_BITS:
        raise EnumerationBoundException(
            f"N = {n_bits} exceeds {MAX_CHANNEL_BITS}"
        )
    if n_bits + p_width > MAX_ENUMERATED_BITS:
        raise EnumerationBoundException(
            f"N + P = {n_bits + p_width} exceeds {MAX_ENUMERATED_BITS}"
        )
    if len(strategies) == 0:
        raise StrategySampleException("At least one strategy is required")
    if any(s.p_width != p_width for s in strategies):
        raise StrategySampleException(f"Every strategy must have width {p_width}")

    covers = all_vectors(n_bits)[:, None, :]
    messages = all_vectors(p_width)[None, :, :]
    step = max(1, BLOCK_PAIRS >> p_width)

    # Counts of disjoint cover blocks add up exactly
    counts = np.zeros(1 << n_bits, dtype=np.int64)
    for strategy in strategies:
        for start in range(0, covers.shape[0], step):
            stego = embedder(covers[start:start + step], messages, strategy)
            counts += np.bincount(
                encode_states(stego).reshape(-1), minlength=1 << n_bits
            )

    logger.debug(
        "Enumerated N=%d, P=%d over %d strategies", n_bits, p_width,
        len(strategies)
    )
    return DistributionTable(n_bits, counts)


def sample_strategies(p_width, count, seed=DEFAULT_SEED):
    """Deterministic strategies of varied lengths from derived keys"""

    strategies = []
    for idx in range(count):
        key = StegoKey(seed + idx.to_bytes(4, 'big'), GeneratorId.FAST)
        strategies.append(generate_strategy(key, p_width, 2 * p_width + 1 + idx))

    return strategies


def check_stego_security(n_bits, p_width, strategy_samples,
                         embedder=di3_embed_batch, seed=DEFAULT_SEED):
    """Is the enumerated stego distribution exactly uniform?"""

    strategies = sample_strategies(p_width, strategy_samples, seed)
    table = enumerate_stego_distribution(n_bits, p_width, strategies, embedder)
    return SecurityVerdict(table.is_uniform(), table.max_deviation(), table)


def double_write_embed(x0, message, strategy):
    """Broken embedder: also copies m0 to the last channel position"""

    channel = di3_embed_batch(x0, message, strategy)
    channel[..., -1] = np.asarray(message)[..., 0]
    return channel


def strategy_leak_embed(x0, message, strategy):
    """Broken embedder: writes the parity of the first strategy term"""

    channel = di3_embed_batch(x0, message, strategy)
    channel[..., -1] = strategy.terms[0] & 1
    return channel


MUTANTS = {
    'double_write': double_write_embed,
    'strategy_leak': strategy_leak_embed,
}


class SecurityException(Exception):
    """Base class for exceptions raised by the security oracle"""


class EnumerationBoundException(SecurityException):
    """Raised when an enumeration would be intractable or ill-formed"""


class StrategySampleException(SecurityException):
    """Raised when the strategy sample is empty or of the wrong width"""
