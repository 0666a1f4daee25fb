import hashlib
import secrets

from collections import namedtuple
from math import gcd

import numpy as np

from lsc_stego.model.options import GeneratorId
from lsc_stego.util.logger import ProjectLogger


SequenceClass = namedtuple("SequenceClass", "injective onto bijective")

# Moduli below this size are fine for reproducible traces only
SECURE_MODULUS_BITS = 1024

MIN_SEED_BYTES = 16

# Deterministic Miller-Rabin witnesses, exact for n < 3.3e24
_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


class Strategy:
    """Finite strategy over [0, P-1] whose last P terms are injective"""

    def __init__(self, terms, p_width):
        terms = tuple(int(t) for t in terms)
        if p_width < 1:
            raise DomainException(f"Message width must be positive, got {p_width}")
        if len(terms) <= p_width:
            raise ConstraintException(
                f"Strategy length {len(terms)} must exceed width {p_width}"
            )
        if any(t < 0 or t >= p_width for t in terms):
            raise SequenceRangeException(
                f"Strategy terms must lie in [0, {p_width - 1}]"
            )
        if not classify_sequence(terms[-p_width:], p_width).injective:
            raise ConstraintException("The last P strategy terms repeat a value")

        self.terms = terms
        self.p_width = p_width

    @property
    def length(self):
        """Number of iterations, the lambda of the scheme"""

        return len(self.terms)

    @property
    def tail(self):
        """The final P terms, a permutation of [0, P-1]"""

        return self.terms[-self.p_width:]

    def __eq__(self, other):
        return isinstance(other, Strategy) \
            and self.p_width == other.p_width \
            and self.terms == other.terms

    def __repr__(self):
        return f"Strategy(P={self.p_width}, length={self.length})"


class StegoKey:
    """Embedding key: a seed plus the generator it drives"""

    def __init__(self, seed, generator_id=GeneratorId.BBS):
        if len(seed) == 0:
            raise KeyException("Key seed must not be empty")

        self.seed = bytes(seed)
        self.generator_id = GeneratorId(generator_id)

        if len(self.seed) < MIN_SEED_BYTES:
            ProjectLogger().get_logger().warning(
                "Key seed has %d bytes, at least %d are recommended",
                len(self.seed), MIN_SEED_BYTES
            )

    @staticmethod
    def from_hex(key_hex, generator_id=GeneratorId.BBS):
        """Create a key from its lowercase hexadecimal form"""

        if not key_hex or key_hex != key_hex.lower() \
                or len(key_hex) % 2 != 0:
            raise KeyException(f"Key must be lowercase hex, got '{key_hex}'")
        try:
            seed = bytes.fromhex(key_hex)
        except ValueError:
            raise KeyException(f"Key must be lowercase hex, got '{key_hex}'")

        return StegoKey(seed, generator_id)

    @staticmethod
    def random(generator_id=GeneratorId.BBS, size=32):
        """Draw a fresh key from the operating system"""

        return StegoKey(secrets.token_bytes(size), generator_id)

    def to_hex(self):
        """Lowercase hexadecimal form of the seed"""

        return self.seed.hex()


class BbsState(namedtuple("BbsState", "modulus state")):
    """Blum-Blum-Shub generator state: x is squared modulo n"""

    __slots__ = ()

    @staticmethod
    def create(modulus, state):
        """Create a state, checking 1 < x < n and gcd(x, n) == 1"""

        if not 1 < state < modulus or gcd(state, modulus) != 1:
            raise BbsException(
                f"BBS state {state} is not a unit of Z/{modulus}Z above 1"
            )

        return BbsState(modulus, state)


class BbsParameters(namedtuple("BbsParameters", "p q x0")):
    """Primes p, q (both 3 mod 4) and an optional fixed starting state"""

    __slots__ = ()

    @property
    def modulus(self):
        """The Blum integer n = p * q"""

        return self.p * self.q

    def validate(self):
        """Raise BbsException unless p and q are distinct Blum primes"""

        for name, prime in (('p', self.p), ('q', self.q)):
            if prime % 4 != 3 or not is_probable_prime(prime):
                raise BbsException(
                    f"BBS parameter {name}={prime} is not a prime congruent to 3 mod 4"
                )
        if self.p == self.q:
            raise BbsException("BBS primes p and q must differ")
        if self.x0 is not None:
            BbsState.create(self.modulus, self.x0)

        return self


DEFAULT_BBS = BbsParameters(2147483059, 1073741783, None)

# The only stream a fixed bbs.x0 applies to; other purposes derive theirs
STRATEGY_PURPOSE = 'strategy'


def is_probable_prime(n):
    """Miller-Rabin test with fixed witnesses"""

    if n < 2:
        return False
    for witness in _WITNESSES:
        if n % witness == 0:
            return n == witness

    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1

    for witness in _WITNESSES:
        x = pow(witness, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False

    return True


def sequence_support(sequence):
    """Set of the distinct values of a finite sequence"""

    return set(sequence)


def classify_sequence(sequence, width):
    """Injectivity and surjectivity of a sequence over [0, width-1]"""

    if any(t < 0 or t >= width for t in sequence):
        raise SequenceRangeException(
            f"Sequence terms must lie in [0, {width - 1}]"
        )

    support = len(sequence_support(sequence))
    injective = len(sequence) == support
    onto = width == support
    return SequenceClass(injective, onto, injective and onto)


def bbs_next_bit(state):
    """Square the state modulo n and emit the parity of the result"""

    value = state.state * state.state % state.modulus
    return value & 1, BbsState(state.modulus, value)


class KeyedBitStream:
    """Deterministic bit stream derived from a key and a purpose label"""

    def __init__(self):
        self._bits = np.zeros(0, dtype=np.uint8)
        self._pos = 0

    def _block(self):
        raise NotImplementedError

    def bits(self, count):
        """Next count bits as a uint8 array"""

        available = self._bits.size - self._pos
        if available < count:
            blocks = [self._bits[self._pos:]]
            while available < count:
                block = self._block()
                blocks.append(block)
                available += block.size
            self._bits = np.concatenate(blocks)
            self._pos = 0

        chunk = self._bits[self._pos:self._pos + count]
        self._pos += count
        return chunk

    def next_bits(self, count):
        """Next count bits packed MSB first into an integer"""

        value = 0
        for bit in self.bits(count):
            value = (value << 1) | int(bit)
        return value

    def next_below(self, bound):
        """Uniform integer in [0, bound) by rejection of oversized draws"""

        width = (bound - 1).bit_length()
        if width == 0:
            return 0

        while True:
            value = self.next_bits(width)
            if value < bound:
                return value


class FastBitStream(KeyedBitStream):
    """Keyed BLAKE2b in counter mode"""

    def __init__(self, seed, purpose):
        super().__init__()
        # BLAKE2b keys are limited to 64 bytes
        self._key = seed if len(seed) <= 64 else hashlib.sha512(seed).digest()
        self._person = purpose.encode('ascii')[:16]
        self._counter = 0

    def _block(self):
        digest = hashlib.blake2b(
            self._counter.to_bytes(8, 'big'),
            key=self._key,
            person=self._person
        ).digest()
        self._counter += 1
        return np.unpackbits(np.frombuffer(digest, dtype=np.uint8))


class BbsBitStream(KeyedBitStream):
    """Blum-Blum-Shub parity bits, seeded from the key and the purpose"""

    BLOCK_BITS = 512

    def __init__(self, seed, purpose, params=DEFAULT_BBS):
        super().__init__()
        params.validate()
        modulus = params.modulus

        if modulus.bit_length() < SECURE_MODULUS_BITS:
            ProjectLogger().get_logger().debug(
                "BBS modulus has %d bits: reproducible, not cryptographically secure",
                modulus.bit_length()
            )

        if params.x0 is not None and purpose == STRATEGY_PURPOSE:
            state = params.x0
        else:
            digest = hashlib.sha256(purpose.encode('ascii') + b'\0' + seed)
            state = int.from_bytes(digest.digest(), 'big') % (modulus - 3) + 2
            while gcd(state, modulus) != 1:
                state += 1

        self._state = BbsState.create(modulus, state)

    def _block(self):
        block = np.empty(self.BLOCK_BITS, dtype=np.uint8)
        state = self._state
        for idx in range(self.BLOCK_BITS):
            block[idx], state = bbs_next_bit(state)
        self._state = state
        return block


def open_stream(key, purpose, params=DEFAULT_BBS):
    """Bit stream for one purpose of a key, independent of other purposes"""

    if key.generator_id == GeneratorId.FAST:
        return FastBitStream(key.seed, purpose)

    return BbsBitStream(key.seed, purpose, params)


def generate_strategy(key, p_width, length, params=DEFAULT_BBS):
    """Keyed strategy: uniform free terms followed by a uniform permutation"""

    logger = ProjectLogger().get_logger()

    if p_width < 1:
        raise DomainException(f"Message width must be positive, got {p_width}")
    if length <= p_width:
        raise ConstraintException(
            f"Strategy length {length} must exceed width {p_width}"
        )

    stream = open_stream(key, STRATEGY_PURPOSE, params)
    terms = [stream.next_below(p_width) for _ in range(length - p_width)]

    tail = list(range(p_width))
    for idx in range(p_width - 1, 0, -1):
        swap = stream.next_below(idx + 1)
        tail[idx], tail[swap] = tail[swap], tail[idx]

    logger.debug("Generated strategy with P=%d, length=%d", p_width, length)
    return Strategy(terms + tail, p_width)


class StrategyException(Exception):
    """Base class for exceptions raised by the strategy module"""


class ConstraintException(StrategyException):
    """Raised when a strategy is not longer than its width or its tail repeats"""


class DomainException(StrategyException):
    """Raised when the message width is not positive"""


class SequenceRangeException(StrategyException):
    """Raised when a term lies outside [0, P-1]"""


class KeyException(StrategyException):
    """Raised when a key cannot be built"""


class BbsException(StrategyException):
    """Raised when BBS parameters or states are invalid"""
