import os
import collections.abc

import yaml
try:
    from yaml import CSafeLoader as Loader
except ImportError:
    from yaml import SafeLoader as Loader

from lsc_stego.util.logger import ProjectLogger
from lsc_stego.model.options import GeneratorId
from lsc_stego.controller.strategy import BbsParameters
from lsc_stego.settings import NAME


AUTO = 'auto'


class ConfigLoader:
    """Single source of truth for config data, merging default, file and args"""

    _default_values = {
        'media': {
            'weights': [8, 7, 6, 5, 4, 3, 2, 1],  # MSB first
            'm': 1,
            'M': 5
        },
        'embedding': {
            'generator': str(GeneratorId.BBS),
            'lambda': AUTO,
            'prerandomize': True,
            'message_alpha': 0.001
        },
        'bbs': {
            'p': 2147483059,
            'q': 1073741783,
            'x0': None  # derived from the key when unset
        },
        'analysis': {
            'alpha': 0.01
        },
        'selftest': {
            'max_n': 10,
            'budget': 14,  # largest N + P enumerated
            'strategies': 5,
            'seed': '5ec0de5ec0de5ec0de5ec0de5ec0de00'
        }
    }

    _default_path = f'~/.config/{NAME}/config'

    def __init__(self, args):
        self._logger = ProjectLogger().get_logger()
        self._config = None

        self.__init_config(args)
        self.__init_converters()

    def __init_converters(self):
        self.add_converter('int', int)
        self.add_converter('float', float)
        self.add_converter('boolean', lambda t: str(t).lower() == "true")
        self.add_converter('generator', lambda g: GeneratorId(str(g).lower()))
        self.add_converter('weights', lambda w: [
            float(v) for v in yaml.load(str(w), Loader=Loader)
        ])
        self.add_converter('optional_int', _optional_int)
        self.add_converter('lambda', _lambda)

    def __init_config(self, args):

        # Load default values from a copy of the dict
        self._config = yaml.load(
            yaml.dump(self._default_values), Loader=Loader
        )

        # Command line arguments ovewrite default values and those
        # set by config file
        if not args.no_config:
            self.__from_file(args.config)
        else:
            self._logger.debug("Preventing config file from loading")

        self.__from_args(args)

    def __from_args(self, args):
        overrides = {
            'media.m': getattr(args, 'm_thresh', None),
            'media.M': getattr(args, 'M_thresh', None),
            'embedding.generator': getattr(args, 'generator', None),
            'embedding.lambda': getattr(args, 'lambda_', None),
            'analysis.alpha': getattr(args, 'alpha', None),
            'selftest.max_n': getattr(args, 'max_n', None),
            'selftest.strategies': getattr(args, 'strategies', None),
        }

        for key, value in overrides.items():
            if value is not None:
                self.set(key, value)

        if getattr(args, 'no_prerandomize', False):
            self.set('embedding.prerandomize', False)

    def __from_file(self, path):
        explicit = path is not None
        if path is None:
            path = self._default_path

        # Resolve to absolute path by either expanding '~' or
        # resolving the relative path
        if path[0] == '~':
            path = os.path.expanduser(path)
        else:
            path = os.path.abspath(path)

        if not os.path.isfile(path):
            if explicit:
                raise ConfigException(f"Config file not found: {path}")
            self._logger.debug("No config file at %s, using defaults", path)
            return

        self._logger.debug("Loading config from %s", path)
        try:
            with open(path, 'r') as yaml_file:
                config = yaml.load(yaml_file, Loader=Loader)
        except (IOError, yaml.YAMLError):
            raise ConfigException(f"Failed to read config file {path}")

        if config is None:
            return
        if not isinstance(config, collections.abc.Mapping):
            raise ConfigException(f"Config file {path} is not a mapping")

        flat = self.__flatten_config(config)
        self.__insert_file(flat)

    def __insert_file(self, flat):
        for key, value in flat.items():
            self.set(key, value)

    # Source code adapted from Imran on StackOverflow
    # https://stackoverflow.com/a/6027615
    def __flatten_config(self, config, parent_key='', sep='.'):
        items = []
        for key, value in config.items():
            new_key = parent_key + sep + key if parent_key else key
            if isinstance(value, collections.abc.MutableMapping):
                items.extend(
                    self.__flatten_config(
                        value, new_key, sep=sep
                    ).items()
                )
            else:
                items.append((new_key, value))
        return dict(items)

    def dump(self):
        """Flatten and convert to string all config data"""

        flat = self.__flatten_config(self._config)
        lines = []
        for key, value in flat.items():
            lines.append(f"{key}={value}")

        return "\n".join(lines)

    def get(self, key):
        """Retrieve value of a single config key"""

        path = key.split('.')
        option = self._config
        for idx, section in enumerate(path):
            if not isinstance(option, dict) or section not in option:
                missing_path = ".".join(path[:idx + 1])
                raise ConfigException(
                    f"Config key {missing_path} could not be found"
                )

            option = option[section]

        return option

    def set(self, key, value):
        """Set the value of a single config key"""

        path = key.split('.')

        # Test to see if the key is valid
        try:
            self.get(key)
        except ConfigException:
            raise ConfigException(f"Config key could not be set '{key}'")

        option = self._config.get(path[0])
        for section in path[1:-1]:
            option = option.get(section)

        if not isinstance(value, str):
            value = str(value)

        option[path[-1]] = value

    def add_converter(self, name, converter):
        """Dynamically generate a getter method using a custom converter"""

        def getter(self, key):
            raw = self.get(key)
            try:
                return converter(raw)
            except (TypeError, ValueError, yaml.YAMLError):
                raise ConfigException(
                    f"Config key {key} has an invalid value: {raw}"
                )

        getter.__name__ = f"get_{name}"
        setattr(self.__class__, getter.__name__, getter)

    def get_bbs_parameters(self):
        """Blum-Blum-Shub primes and optional starting state"""

        return BbsParameters(
            self.get_int('bbs.p'),
            self.get_int('bbs.q'),
            self.get_optional_int('bbs.x0')
        )

    @staticmethod
    def get_default(section, option):
        """Get the default value of a config key"""

        return ConfigLoader._default_values.get(section).get(option)


def _optional_int(raw):
    if raw is None or str(raw).lower() in ('none', 'null', ''):
        return None

    return int(raw)


def _lambda(raw):
    if raw is None or str(raw).lower() == AUTO:
        return None

    return int(raw)


class ConfigException(Exception):
    """Base class for exceptions thrown by ConfigLoader"""
