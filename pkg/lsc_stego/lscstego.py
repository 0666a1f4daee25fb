import glob
import sys

from lsc_stego.util.logger import ProjectLogger
from lsc_stego.util.arguments import parse_arguments
from lsc_stego.util.config import ConfigLoader, ConfigException
from lsc_stego.util.formatter import ReportFormatter
from lsc_stego.settings import NAME, VERSION
from lsc_stego.model.options import AttackClass, Command
from lsc_stego.controller.media import SignificationFunction, \
    MediaException, PgmException, extract_bits, parse_pgm, partition, \
    write_pgm
from lsc_stego.controller.strategy import StegoKey, StrategyException
from lsc_stego.controller.di3 import EmbeddingException, capacity, \
    embed_in_image, extract_from_image, randomize_lscs
from lsc_stego.controller.randomness import RandomnessException, \
    chi_square_uniformity, monobit_test, runs_test, symbolize
from lsc_stego.controller.steganalysis import SteganalysisException, \
    lsb_chi_square_attack, survey_bit_planes
from lsc_stego.controller.security import MUTANTS, SecurityException, \
    check_stego_security

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_IO = 2

# Channel width and message width used to exercise the broken embedders
MUTANT_N = 4
MUTANT_P = 2


class LscStego:
    """
    Start and control the execution of a single command
    """

    def __init__(self, argv=None):
        self._config = None
        self._parser, self._args = parse_arguments(argv)
        self._logger = ProjectLogger().configure(
            self._args.verbose, self._args.logging
        ).get_logger()

    def start(self):
        """Run the selected command and return its exit code"""

        if self._args.version:
            print(f"{NAME} v{VERSION}")
            return EXIT_OK

        try:
            self._config = ConfigLoader(self._args)

            if self._args.dump_config:
                print(self._config.dump())
                return EXIT_OK

            if self._args.command is None:
                self._parser.print_usage(sys.stderr)
                self._logger.error("No command given")
                return EXIT_IO

            commands = {
                Command.EMBED: self.__embed,
                Command.EXTRACT: self.__extract,
                Command.CAPACITY: self.__capacity,
                Command.ANALYZE: self.__analyze,
                Command.RANDOMIZE: self.__randomize,
                Command.SELFTEST: self.__selftest,
            }
            command = Command(self._args.command)
            self._logger.debug("Running command %s", command)
            return commands[command]()

        except (PgmException, ConfigException, OSError):
            self._logger.exception("Failed to read or write data")
            return EXIT_IO
        except (MediaException, StrategyException, EmbeddingException,
                RandomnessException, SteganalysisException,
                SecurityException):
            self._logger.exception("Command failed")
            return EXIT_DOMAIN

    def __signification(self):
        return (
            SignificationFunction(self._config.get_weights('media.weights')),
            self._config.get_float('media.m'),
            self._config.get_float('media.M'),
        )

    def __key(self):
        return StegoKey.from_hex(
            self._args.key,
            self._config.get_generator('embedding.generator')
        )

    def __read_image(self, path):
        self._logger.debug("Reading image %s", path)
        with open(path, 'rb') as file:
            return parse_pgm(file.read())

    def __write(self, path, data):
        self._logger.debug("Writing %d bytes to %s", len(data), path)
        with open(path, 'wb') as file:
            file.write(data)

    def __print(self, document):
        sys.stdout.write(ReportFormatter.render(document))
        sys.stdout.flush()

    def __embed(self):
        img = self.__read_image(self._args.input_path)
        with open(self._args.message_path, 'rb') as file:
            message = file.read()

        func, m_thresh, M_thresh = self.__signification()
        stego = embed_in_image(
            img, func, m_thresh, M_thresh, message, self.__key(),
            self._config.get_lambda('embedding.lambda'),
            self._config.get_boolean('embedding.prerandomize'),
            self._config.get_bbs_parameters(),
            self._config.get_float('embedding.message_alpha')
        )

        self.__write(
            self._args.output_path,
            write_pgm(stego, binary=not self._args.ascii)
        )
        return EXIT_OK

    def __extract(self):
        img = self.__read_image(self._args.input_path)
        if self._args.key is not None:
            self._logger.debug(
                "Message placement does not depend on the key, ignoring it"
            )

        func, m_thresh, M_thresh = self.__signification()
        message = extract_from_image(
            img, func, m_thresh, M_thresh, self._args.length
        )

        if self._args.output_path is not None:
            self.__write(self._args.output_path, message)
        else:
            sys.stdout.buffer.write(message)
            sys.stdout.buffer.flush()
        return EXIT_OK

    def __capacity(self):
        img = self.__read_image(self._args.input_path)
        func, m_thresh, M_thresh = self.__signification()
        self.__print(capacity(img, func, m_thresh, M_thresh))
        return EXIT_OK

    def __analyze_image(self, path, alpha):
        img = self.__read_image(path)
        func, m_thresh, M_thresh = self.__signification()
        part = partition(func, img.bit_length, m_thresh, M_thresh)
        channel = extract_bits(img, part.lsc)

        probes = [
            lambda: monobit_test(channel, alpha),
            lambda: runs_test(channel, alpha),
            lambda: chi_square_uniformity(*symbolize(channel), alpha),
            lambda: lsb_chi_square_attack(img, alpha),
        ]
        if self._args.survey:
            probes.append(lambda: survey_bit_planes(img, alpha))

        reports = []
        for probe in probes:
            try:
                result = probe()
            except (RandomnessException, SteganalysisException) as exc:
                self._logger.warning("Skipping a test on %s: %s", path, exc)
                continue
            reports.extend(result if isinstance(result, list) else [result])

        return ReportFormatter.image_analysis(
            path, img, int(part.lsc.size), reports
        )

    def __analyze(self):
        paths = []
        if self._args.input_path is not None:
            paths.append(self._args.input_path)
        if self._args.glob is not None:
            matches = sorted(glob.glob(self._args.glob))
            if not matches:
                self._logger.warning("No file matches %s", self._args.glob)
            paths.extend(matches)
        if self._args.input_path is None and self._args.glob is None:
            self._logger.error("analyze needs --in or --glob")
            return EXIT_IO

        alpha = self._config.get_float('analysis.alpha')
        images = [self.__analyze_image(path, alpha) for path in paths]
        self.__print(ReportFormatter.analysis(alpha, images))
        return EXIT_OK

    def __randomize(self):
        img = self.__read_image(self._args.input_path)
        func, m_thresh, M_thresh = self.__signification()
        part = partition(func, img.bit_length, m_thresh, M_thresh)

        randomized = randomize_lscs(
            img, part, self.__key(), self._config.get_bbs_parameters()
        )
        self.__write(
            self._args.output_path,
            write_pgm(randomized, binary=not self._args.ascii)
        )
        return EXIT_OK

    def __selftest(self):
        max_n = self._config.get_int('selftest.max_n')
        budget = self._config.get_int('selftest.budget')
        samples = self._config.get_int('selftest.strategies')
        try:
            seed = bytes.fromhex(str(self._config.get('selftest.seed')))
        except ValueError:
            raise ConfigException("selftest.seed must be hexadecimal")

        self._logger.info(
            "Enumerating stego distributions against the %s model",
            AttackClass.WOA.description
        )
        self._logger.info(
            "Attack models left out of the check: %s",
            ", ".join(attack.description for attack in AttackClass
                      if attack is not AttackClass.WOA)
        )

        results = []
        for n_bits in range(1, max_n + 1):
            for p_width in range(1, min(n_bits, budget - n_bits) + 1):
                verdict = check_stego_security(
                    n_bits, p_width, samples, seed=seed
                )
                result = verdict.table.to_dict()
                result['p_width'] = p_width
                results.append(result)
                self._logger.info(
                    "N=%d P=%d: max deviation %s", n_bits, p_width,
                    verdict.max_deviation
                )

        mutants = []
        for name, embedder in MUTANTS.items():
            verdict = check_stego_security(
                MUTANT_N, MUTANT_P, 1, embedder=embedder, seed=seed
            )
            mutants.append({
                'name': name,
                'detected': not verdict.uniform,
                'max_deviation_num': verdict.max_deviation.numerator,
                'max_deviation_den': verdict.max_deviation.denominator
            })

        document = ReportFormatter.selftest(AttackClass.WOA, results, mutants)
        self.__print(document)

        if document['uniform'] and all(m['detected'] for m in mutants):
            return EXIT_OK

        self._logger.error("Self test failed")
        return EXIT_DOMAIN


def run_cli(argv=None):
    """Run the command line front end and return the exit code"""

    try:
        return LscStego(argv).start()
    except SystemExit as exc:
        # argparse reports usage errors and --help by exiting
        return exc.code if isinstance(exc.code, int) else EXIT_IO


def run():
    """Initialise the program controller"""

    sys.exit(run_cli())
