import argparse

from lsc_stego.settings import NAME
from lsc_stego.model.options import Command, GeneratorId
from lsc_stego.util.config import ConfigLoader


class SmartFormatter(argparse.HelpFormatter):
    """Custom formatter breaking lines on \n"""

    def _split_lines(self, text, width):
        if text.startswith('R|'):
            return text[2:].splitlines()
        # this is the RawTextHelpFormatter._split_lines
        return argparse.HelpFormatter._split_lines(self, text, width)


def key_hex(value):
    """Argparse type accepting lowercase hexadecimal keys only"""

    digits = '0123456789abcdef'
    if not value or len(value) % 2 != 0 \
            or any(char not in digits for char in value):
        raise argparse.ArgumentTypeError(
            f"key must be an even number of lowercase hex digits: '{value}'"
        )
    return value


def lambda_value(value):
    """Argparse type accepting 'auto' or a positive integer"""

    if value == 'auto':
        return value
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"lambda must be 'auto' or an integer: '{value}'"
        )
    if number < 1:
        raise argparse.ArgumentTypeError("lambda must be positive")
    return str(number)


def length_value(value):
    """Argparse type accepting a non-negative byte count"""

    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"length must be an integer: '{value}'"
        )
    if number < 0:
        raise argparse.ArgumentTypeError("length must not be negative")
    return number


def __add_input(parser, required=True):
    parser.add_argument(
        '--in',
        dest='input_path',
        metavar='PATH',
        required=required,
        help="input graymap (P2 or P5)"
    )


def __add_thresholds(parser):
    parser.add_argument(
        '--m',
        dest='m_thresh',
        type=float,
        metavar='m',
        help="LSC threshold, bits weighing at most m are LSCs" +
        f" (default: {ConfigLoader.get_default('media', 'm')})"
    )

    parser.add_argument(
        '--M',
        dest='M_thresh',
        type=float,
        metavar='M',
        help="MSC threshold, bits weighing at least M are MSCs" +
        f" (default: {ConfigLoader.get_default('media', 'M')})"
    )


def __add_key(parser, required=True):
    parser.add_argument(
        '--key',
        type=key_hex,
        required=required,
        help="embedding key as lowercase hex"
    )

    parser.add_argument(
        '--generator',
        choices=list(GeneratorId),
        type=GeneratorId,
        help="R|keyed bit generator" +
        f" (default: {ConfigLoader.get_default('embedding', 'generator')})\n" +
        "bbs  - Blum-Blum-Shub\n" +
        "fast - keyed BLAKE2b counter mode"
    )


def __add_commands(parser):
    commands = parser.add_subparsers(dest='command', metavar='COMMAND')

    embed = commands.add_parser(
        str(Command.EMBED), allow_abbrev=False,
        formatter_class=SmartFormatter,
        help="hide a message in the LSCs of a cover image"
    )
    __add_input(embed)
    embed.add_argument('--out', dest='output_path', metavar='PATH',
                       required=True, help="stego image to write")
    __add_key(embed)
    embed.add_argument('--message', dest='message_path', metavar='PATH',
                       required=True,
                       help="file holding the (encrypted) message bytes")
    __add_thresholds(embed)
    embed.add_argument(
        '--lambda',
        dest='lambda_',
        type=lambda_value,
        metavar='LAMBDA',
        help="number of iterations, 'auto' is 2P+1" +
        f" (default: {ConfigLoader.get_default('embedding', 'lambda')})"
    )
    embed.add_argument('--ascii', action='store_true',
                       help="write an ASCII (P2) graymap instead of P5")
    embed.add_argument('--no-prerandomize', action='store_true',
                       help="keep the cover LSCs instead of randomizing them")

    extract = commands.add_parser(
        str(Command.EXTRACT), allow_abbrev=False,
        formatter_class=SmartFormatter,
        help="read a message back from a stego image"
    )
    __add_input(extract)
    __add_key(extract, required=False)
    extract.add_argument('--len', dest='length', type=length_value,
                         required=True, help="message length in bytes")
    extract.add_argument('--out', dest='output_path', metavar='PATH',
                         help="write the message here instead of stdout")
    __add_thresholds(extract)

    capacity = commands.add_parser(
        str(Command.CAPACITY), allow_abbrev=False,
        help="report the size of the LSC channel"
    )
    __add_input(capacity)
    __add_thresholds(capacity)

    analyze = commands.add_parser(
        str(Command.ANALYZE), allow_abbrev=False,
        help="run the randomness battery and the chi-square attack"
    )
    __add_input(analyze, required=False)
    analyze.add_argument('--glob', metavar='PATTERN',
                         help="analyze every file matching the pattern")
    analyze.add_argument(
        '--alpha', type=float,
        help="significance level" +
        f" (default: {ConfigLoader.get_default('analysis', 'alpha')})"
    )
    analyze.add_argument('--survey', action='store_true',
                         help="also test each of the eight bit planes")
    __add_thresholds(analyze)

    randomize = commands.add_parser(
        str(Command.RANDOMIZE), allow_abbrev=False,
        formatter_class=SmartFormatter,
        help="replace every LSC with a keyed random bit"
    )
    __add_input(randomize)
    randomize.add_argument('--out', dest='output_path', metavar='PATH',
                           required=True, help="image to write")
    __add_key(randomize)
    __add_thresholds(randomize)
    randomize.add_argument('--ascii', action='store_true',
                           help="write an ASCII (P2) graymap instead of P5")

    selftest = commands.add_parser(
        str(Command.SELFTEST), allow_abbrev=False,
        help="verify stego-security by exhaustive enumeration"
    )
    selftest.add_argument(
        '--max-n', type=int,
        help="largest channel width enumerated" +
        f" (default: {ConfigLoader.get_default('selftest', 'max_n')})"
    )
    selftest.add_argument(
        '--strategies', type=int,
        help="strategies sampled per (N, P)" +
        f" (default: {ConfigLoader.get_default('selftest', 'strategies')})"
    )


def parse_arguments(argv=None):
    """Parse command line arguments using argparse"""

    parser = argparse.ArgumentParser(
        prog=NAME,
        description="Data hiding in the least significant coefficients " +
        "of grayscale images, with an exhaustive stego-security check",
        usage=usage(),
        formatter_class=SmartFormatter
    )

    parser.add_argument(
        '-v', '--verbose',
        help="increase verbosity level",
        action='store_true',
    )

    parser.add_argument(
        "--version",
        help="show version information and exit",
        action="store_true"
    )

    parser.add_argument(
        "--no-config",
        help="ignore config files and use default values",
        action="store_true"
    )

    parser.add_argument(
        "--dump-config",
        help="dump the contents of the config data to stdout",
        action="store_true"
    )

    parser.add_argument(
        '--logging',
        help=f"also log to ~/.cache/{NAME}/{NAME}.log",
        action="store_true"
    )

    parser.add_argument(
        "--config",
        help="use a custom config file path"
    )

    __add_commands(parser)

    return parser, parser.parse_args(argv)


def usage():
    """Custom usage text for help text"""

    return f'''{NAME} [OPTIONS] COMMAND [COMMAND OPTIONS]'''
