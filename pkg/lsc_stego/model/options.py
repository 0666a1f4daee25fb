from enum import Enum


class BaseOption(Enum):
    """Base enum for options that are selected by name on the command line"""

    def __str__(self):
        return self.value

    def __repr__(self):
        return str(self)


class Command(BaseOption):
    """Workflows exposed by the command line front end"""

    EMBED = 'embed'
    EXTRACT = 'extract'
    CAPACITY = 'capacity'
    ANALYZE = 'analyze'
    RANDOMIZE = 'randomize'
    SELFTEST = 'selftest'


class GeneratorId(BaseOption):
    """Keyed bit generators able to drive strategies and LSC randomization"""

    BBS = 'bbs'
    FAST = 'fast'


class AttackClass(BaseOption):
    """Attacker knowledge classes of the prisoner problem"""

    WOA = 'woa'  # stego contents only
    KMA = 'kma'  # stego contents and their messages
    KOA = 'koa'  # stego contents and their originals
    CMA = 'cma'  # a constant, unknown message

    @property
    def description(self):
        """Short human readable summary of what the attacker observes"""

        return {
            AttackClass.WOA: "watermark-only attack",
            AttackClass.KMA: "known-message attack",
            AttackClass.KOA: "known-original attack",
            AttackClass.CMA: "constant-message attack",
        }[self]
