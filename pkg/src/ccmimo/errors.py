"""Exception hierarchy.

Each family carries the process exit code the CLI uses for it.
"""


class CCMimoError(Exception):
    exit_code = 2


class InputError(CCMimoError, ValueError):
    """Malformed or inconsistent input (config, demands, scheme files)."""

    exit_code = 2


class ConfigError(InputError):
    pass


class NonIntegerT(ConfigError):
    pass


class NonIntegerEta(ConfigError):
    pass


class ServeGroupTooLarge(ConfigError):
    pass


class GExceedsL(ConfigError):
    pass


class BadFileIndex(InputError):
    pass


class WrongLength(InputError):
    pass


class DemandMissing(InputError):
    pass


class ConfigMismatch(InputError):
    pass


class WrongFlavor(InputError):
    pass


class SchemeFormatError(InputError):
    pass


class ChannelMismatch(InputError):
    pass


class ApplicabilityError(CCMimoError):
    exit_code = 3


class UnsupportedT(ApplicabilityError):
    pass


class NotStrictMode(ApplicabilityError):
    pass


class NotVerified(CCMimoError):
    exit_code = 1


class ScheduleNotFound(CCMimoError):
    """The delivery search ran out of candidates or node budget."""

    exit_code = 4

    def __init__(self, message, nodes=0, budget_exhausted=False):
        super().__init__(message)
        self.nodes = nodes
        self.budget_exhausted = budget_exhausted


class NumericalError(CCMimoError, ArithmeticError):
    exit_code = 1


class RankDeficient(NumericalError):
    pass


class DegenerateZfSet(NumericalError):
    pass
