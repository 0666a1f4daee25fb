"""
Iterated single-position embedding into the least significant coefficients.

Every iteration n writes the message bit m[S^n] at channel position S^n and
leaves every other position untouched. Because the written value depends only
on the position, and the last P strategy terms visit every message position,
the final channel always equals the cover channel with its first P positions
replaced by the message, whatever the strategy and its length. Extraction
therefore reads the first P channel positions; confidentiality of the message
has to come from encrypting it before embedding, not from its placement.
"""

import numpy as np

from lsc_stego.controller.media import BITS_PER_PIXEL, extract_bits, \
    partition, write_bits
from lsc_stego.controller.strategy import DEFAULT_BBS, generate_strategy, \
    open_stream
from lsc_stego.controller.randomness import chi_square_uniformity, \
    RandomnessException
from lsc_stego.util.logger import ProjectLogger


class EmbeddingInstance:
    """Cover channel x0, message m and the strategy coupling them"""

    def __init__(self, x0, message, strategy):
        self.x0 = _bit_vector(x0)
        self.message = _bit_vector(message)
        self.strategy = strategy

        if self.message.size > self.x0.size:
            raise CapacityException(
                f"Message of {self.message.size} bits exceeds a channel of "
                f"{self.x0.size} bits"
            )
        if strategy.p_width != self.message.size:
            raise MessageLengthException(
                f"Strategy width {strategy.p_width} does not match message "
                f"width {self.message.size}"
            )

    @property
    def channel_width(self):
        """N, the number of LSCs carrying the message"""

        return self.x0.size

    @property
    def message_width(self):
        """P, the number of message bits"""

        return self.message.size


def _bit_vector(bits):
    return np.asarray(bits, dtype=np.uint8).reshape(-1)


def di3_embed_batch(x0, message, strategy):
    """Run the iteration along the last axis of broadcastable batches"""

    x0 = np.asarray(x0, dtype=np.uint8)
    message = np.asarray(message, dtype=np.uint8)
    shape = np.broadcast_shapes(x0.shape[:-1], message.shape[:-1]) \
        + x0.shape[-1:]

    channel = np.array(np.broadcast_to(x0, shape))
    for term in strategy.terms:
        channel[..., term] = message[..., term]

    return channel


def di3_embed(inst):
    """Stego channel y = x^lambda of an embedding instance"""

    return di3_embed_batch(inst.x0, inst.message, inst.strategy)


def substitution_oracle(x0, message):
    """Channel with its first P positions replaced by the message"""

    x0 = _bit_vector(x0)
    message = _bit_vector(message)
    if message.size > x0.size:
        raise CapacityException(
            f"Message of {message.size} bits exceeds a channel of {x0.size} bits"
        )

    channel = x0.copy()
    channel[:message.size] = message
    return channel


def di3_extract(channel, p_width):
    """Message bits read back from the first P channel positions"""

    channel = _bit_vector(channel)
    if p_width > channel.size:
        raise CapacityException(
            f"Cannot read {p_width} bits from a channel of {channel.size} bits"
        )

    return channel[:p_width].copy()


def check_headroom(img, lsc):
    """Raise HeadroomException unless any LSC bits keep pixels <= maxval"""

    if img.maxval >= 255 or lsc.size == 0:
        return

    # Worst case write sets every LSC of a pixel
    masks = np.zeros(img.pixels.size, dtype=np.int64)
    np.bitwise_or.at(
        masks, lsc // BITS_PER_PIXEL,
        1 << (BITS_PER_PIXEL - 1 - lsc % BITS_PER_PIXEL)
    )
    blocked = np.count_nonzero((img.pixels | masks) > img.maxval)
    if blocked:
        raise HeadroomException(
            f"{blocked} pixels cannot take arbitrary LSC bits without "
            f"exceeding maxval {img.maxval}; pick thresholds that leave "
            f"the high bits alone or use a maxval of 255"
        )


def randomize_lscs(img, part, key, params=DEFAULT_BBS):
    """Overwrite every LSC with a keyed pseudorandom bit"""

    if part.lsc.size == 0:
        return img

    check_headroom(img, part.lsc)

    stream = open_stream(key, 'lsc', params)
    return write_bits(img, part.lsc, stream.bits(part.lsc.size))


def capacity(img, func, m_thresh, M_thresh):
    """LSC channel size of an image, in bits, bytes and bits per pixel"""

    part = partition(func, img.bit_length, m_thresh, M_thresh)
    lsc_bits = int(part.lsc.size)
    return {
        'lsc_bits': lsc_bits,
        'capacity_bytes': lsc_bits // 8,
        'bits_per_pixel': lsc_bits / (img.width * img.height)
    }


def message_uniformity_warning(message_bits, alpha):
    """Warn when the message is grossly non-uniform, i.e. not encrypted"""

    logger = ProjectLogger().get_logger()
    try:
        report = chi_square_uniformity(message_bits, 2, alpha)
    except RandomnessException:
        logger.debug("Message too short for a uniformity check")
        return False

    if not report.passed:
        logger.warning(
            "Message bits fail a uniformity check (p=%.3g): encrypt the "
            "message before embedding, the security argument assumes "
            "uniform message bits", report.p_value
        )
        return True

    return False


def embed_in_image(img, func, m_thresh, M_thresh, message_bytes, key,
                   length=None, prerandomize=True, params=DEFAULT_BBS,
                   message_alpha=0.001):
    """Hide message bytes in the LSCs of an image"""

    logger = ProjectLogger().get_logger()

    part = partition(func, img.bit_length, m_thresh, M_thresh)
    message = np.unpackbits(np.frombuffer(bytes(message_bytes), dtype=np.uint8))
    channel_width = int(part.lsc.size)
    p_width = int(message.size)

    if p_width > channel_width:
        raise CapacityException(
            f"Message of {p_width} bits exceeds the capacity of "
            f"{channel_width} LSC bits"
        )
    if 2 * p_width > channel_width:
        logger.warning(
            "Message uses %d of %d LSC bits, more than half of the channel",
            p_width, channel_width
        )

    check_headroom(img, part.lsc)
    message_uniformity_warning(message, message_alpha)

    if length is None:
        length = 2 * p_width + 1

    if prerandomize:
        logger.debug("Randomizing %d LSC bits", channel_width)
        img = randomize_lscs(img, part, key, params)

    strategy = generate_strategy(key, p_width, length, params)
    inst = EmbeddingInstance(extract_bits(img, part.lsc), message, strategy)
    stego = write_bits(img, part.lsc, di3_embed(inst))

    logger.info(
        "Embedded %d message bits into %d LSC bits in %d iterations",
        p_width, channel_width, length
    )
    return stego


def extract_from_image(img, func, m_thresh, M_thresh, message_len_bytes):
    """Read message_len_bytes bytes back from the LSC channel"""

    if message_len_bytes < 0:
        raise CapacityException(
            f"Message length must not be negative, got {message_len_bytes}"
        )

    part = partition(func, img.bit_length, m_thresh, M_thresh)
    p_width = 8 * message_len_bytes
    if p_width > part.lsc.size:
        raise CapacityException(
            f"Cannot read {p_width} bits from {part.lsc.size} LSC bits"
        )

    channel = extract_bits(img, part.lsc[:p_width])
    return np.packbits(di3_extract(channel, p_width)).tobytes()


class EmbeddingException(Exception):
    """Base class for exceptions raised while embedding or extracting"""


class CapacityException(EmbeddingException):
    """Raised when the message does not fit the LSC channel"""


class MessageLengthException(EmbeddingException):
    """Raised when the strategy and the message disagree on the width"""


class HeadroomException(EmbeddingException):
    """Raised when a cover's maxval leaves no room to set some LSCs"""
