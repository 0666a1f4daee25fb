import re

import numpy as np

from lsc_stego.util.logger import ProjectLogger


BITS_PER_PIXEL = 8


class Image:
    """Grayscale raster with pixels addressed as 8-bit words"""

    def __init__(self, width, height, maxval, pixels):
        if width < 1 or height < 1:
            raise ImageException(
                f"Image dimensions must be positive, got {width}x{height}"
            )
        if not 1 <= maxval <= 255:
            raise MaxvalException(f"Maxval {maxval} outside [1, 255]")

        values = np.asarray(pixels)
        if values.size != width * height:
            raise PixelCountException(
                f"Expected {width * height} pixels, got {values.size}"
            )
        if values.size > 0 and (values.min() < 0 or values.max() > maxval):
            raise PixelValueException(
                f"Pixel values must lie in [0, {maxval}]"
            )

        self.width = width
        self.height = height
        self.maxval = maxval
        self.pixels = values.astype(np.uint8).reshape(-1)
        self.pixels.flags.writeable = False

    @property
    def bit_length(self):
        """Number of addressable bits, eight per pixel"""

        return BITS_PER_PIXEL * self.width * self.height

    def __eq__(self, other):
        if not isinstance(other, Image):
            return NotImplemented

        return self.width == other.width \
            and self.height == other.height \
            and self.maxval == other.maxval \
            and np.array_equal(self.pixels, other.pixels)

    def __repr__(self):
        return f"Image({self.width}x{self.height}, maxval={self.maxval})"


class SignificationFunction:
    """Periodic weight table giving the importance of every bit position"""

    def __init__(self, weights):
        weights = tuple(float(w) for w in weights)
        if len(weights) == 0:
            raise ThresholdException("Signification weights are empty")

        self.weights = weights

    @property
    def period(self):
        """Length of the repeating weight pattern"""

        return len(self.weights)

    @staticmethod
    def grayscale():
        """Weights 8 down to 1 for the bits of each pixel, MSB first"""

        return SignificationFunction(
            BITS_PER_PIXEL - k for k in range(BITS_PER_PIXEL)
        )

    def __eq__(self, other):
        return isinstance(other, SignificationFunction) \
            and self.weights == other.weights


class CoefficientPartition:
    """Most, least significant and passive bit indices of a medium"""

    def __init__(self, msc, lsc, passive, bit_length):
        self.msc = _frozen_indices(msc)
        self.lsc = _frozen_indices(lsc)
        self.passive = _frozen_indices(passive)
        self.bit_length = bit_length

    def to_dict(self):
        """Coefficient counts, ready to be serialised"""

        return {
            'bit_length': self.bit_length,
            'msc_bits': int(self.msc.size),
            'lsc_bits': int(self.lsc.size),
            'passive_bits': int(self.passive.size)
        }


def _frozen_indices(indices):
    array = np.asarray(indices, dtype=np.int64).reshape(-1)
    array.flags.writeable = False
    return array


def _bit_vector(bits):
    return np.asarray(bits, dtype=np.uint8).reshape(-1)


def _read_token(data, pos):
    """Return the next header token, skipping whitespace and comments"""

    length = len(data)
    while pos < length:
        char = data[pos:pos + 1]
        if char == b'#':
            end = data.find(b'\n', pos)
            pos = length if end < 0 else end + 1
        elif char.isspace():
            pos += 1
        else:
            break

    start = pos
    while pos < length:
        char = data[pos:pos + 1]
        if char.isspace() or char == b'#':
            break
        pos += 1

    return data[start:pos], pos


def _read_int(data, pos, name, error=None):
    token, pos = _read_token(data, pos)
    if not token.isdigit():
        raise (error or HeaderException)(
            f"Malformed {name} in PGM header: {token!r}"
        )

    return int(token), pos


def parse_pgm(data):
    """Parse an ASCII (P2) or binary (P5) graymap"""

    logger = ProjectLogger().get_logger()

    magic = data[:2]
    if magic not in (b'P2', b'P5'):
        raise MagicNumberException(f"Unsupported magic number: {magic!r}")

    pos = 2
    width, pos = _read_int(data, pos, 'width')
    height, pos = _read_int(data, pos, 'height')
    maxval, pos = _read_int(data, pos, 'maxval', MaxvalException)

    if width < 1 or height < 1:
        raise HeaderException(f"Invalid dimensions {width}x{height}")
    if not 1 <= maxval <= 255:
        raise MaxvalException(f"Maxval {maxval} outside [1, 255]")

    expected = width * height
    if magic == b'P5':
        # A single whitespace byte separates the header from the raster
        raster = data[pos + 1:]
        if len(raster) != expected:
            raise PixelCountException(
                f"Expected {expected} raster bytes, got {len(raster)}"
            )
        pixels = np.frombuffer(raster, dtype=np.uint8)
    else:
        body = re.sub(rb'#[^\n]*', b'', data[pos:])
        tokens = body.split()
        if len(tokens) != expected:
            raise PixelCountException(
                f"Expected {expected} samples, got {len(tokens)}"
            )
        if not all(token.isdigit() for token in tokens):
            raise PixelValueException("Non numeric sample in PGM raster")
        pixels = np.array([int(token) for token in tokens], dtype=np.int64)

    if pixels.size > 0 and pixels.max() > maxval:
        raise PixelValueException(
            f"Sample {int(pixels.max())} exceeds maxval {maxval}"
        )

    logger.debug("Parsed %s graymap %dx%d", magic.decode(), width, height)
    return Image(width, height, maxval, pixels)


def write_pgm(img, binary=True):
    """Serialise an image in canonical P5 or P2 form, without comments"""

    if binary:
        header = f"P5\n{img.width} {img.height}\n{img.maxval}\n"
        return header.encode('ascii') + img.pixels.tobytes()

    lines = ["P2", f"{img.width} {img.height}", str(img.maxval)]
    rows = img.pixels.reshape(img.height, img.width)
    for row in rows:
        lines.append(" ".join(str(int(value)) for value in row))

    return ("\n".join(lines) + "\n").encode('ascii')


def significance(func, k):
    """Weight of the bit at global index k"""

    return func.weights[k % func.period]


def partition(func, bit_length, m, M):
    """Split bit indices into MSCs (u >= M), LSCs (u <= m) and the rest"""

    if not m < M:
        raise ThresholdException(
            f"Thresholds must satisfy m < M, got m={m}, M={M}"
        )
    if bit_length < 1:
        raise ThresholdException("Bit length must be positive")

    indices = np.arange(bit_length, dtype=np.int64)
    weights = np.asarray(func.weights)[indices % func.period]

    return CoefficientPartition(
        msc=indices[weights >= M],
        lsc=indices[weights <= m],
        passive=indices[(weights > m) & (weights < M)],
        bit_length=bit_length
    )


def _checked_indices(img, indices):
    indices = np.asarray(indices, dtype=np.int64).reshape(-1)
    if indices.size > 0 and (indices.min() < 0
                             or indices.max() >= img.bit_length):
        raise BitIndexException(
            f"Bit index out of range [0, {img.bit_length})"
        )

    return indices


def extract_bits(img, indices):
    """Read bits MSB first: index k is bit 7 - (k mod 8) of pixel k // 8"""

    indices = _checked_indices(img, indices)
    plane = np.unpackbits(img.pixels)
    return plane[indices]


def write_bits(img, indices, bits):
    """Return a copy of the image with the given bits written in place"""

    indices = _checked_indices(img, indices)
    bits = _bit_vector(bits)
    if indices.size != bits.size:
        raise BitLengthException(
            f"{indices.size} indices for {bits.size} bits"
        )

    plane = np.unpackbits(img.pixels)
    plane[indices] = bits & 1
    pixels = np.packbits(plane)

    if img.maxval < 255 and pixels.max(initial=0) > img.maxval:
        raise ImageException(
            f"Written bits push a pixel above maxval {img.maxval}"
        )

    return Image(img.width, img.height, img.maxval, pixels)


def bit_plane(img, position):
    """Bits of one in-pixel position (0 is the MSB) over all pixels"""

    if not 0 <= position < BITS_PER_PIXEL:
        raise BitIndexException(f"Bit plane {position} outside [0, 7]")

    return (img.pixels >> (BITS_PER_PIXEL - 1 - position)) & 1


class MediaException(Exception):
    """Base class for exceptions raised by the media module"""


class ImageException(MediaException):
    """Raised when an image violates its invariants"""


class PgmException(MediaException):
    """Base class for graymap parsing errors"""


class MagicNumberException(PgmException):
    """Raised when the file is neither P2 nor P5"""


class HeaderException(PgmException):
    """Raised when width or height cannot be read"""


class MaxvalException(PgmException):
    """Raised when maxval is not within [1, 255]"""


class PixelCountException(PgmException):
    """Raised when the raster does not hold width x height samples"""


class PixelValueException(PgmException):
    """Raised when a sample exceeds maxval"""


class BitIndexException(MediaException):
    """Raised when a bit index falls outside of the image"""


class BitLengthException(MediaException):
    """Raised when indices and bits differ in length"""


class ThresholdException(MediaException):
    """Raised when signification thresholds are inconsistent"""
