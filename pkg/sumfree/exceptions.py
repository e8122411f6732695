"""Exceptions raised by the sumfree engine.

Every exception carries the process exit code the management commands use
when they turn it into a ``CommandError``: 2 for configuration and input
errors, 3 when a configured cap would be exceeded, 4 for verification
failures.
"""


class SumfreeError(Exception):
    exit_code = 1


class ConfigurationError(SumfreeError):
    exit_code = 2


class CapExceeded(SumfreeError):
    exit_code = 3


class VerificationFailed(SumfreeError):
    exit_code = 4


class ParseError(ConfigurationError):
    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class OddOrderError(ConfigurationError):
    pass


# The group constructor and the spec parser report the same condition.
EmptyEvenPart = OddOrderError


class ElementOutOfRange(ConfigurationError):
    pass


class InvalidLaw(ConfigurationError):
    pass


class InvalidTrials(ConfigurationError):
    pass


class UnknownConfigKey(ConfigurationError):
    pass


class RangeError(ConfigurationError):
    pass


class DivisibilityError(ConfigurationError):
    pass


class GeneratorNotEven(ConfigurationError):
    pass


class ZeroGenerator(ConfigurationError):
    pass


class DegeneratePair(ConfigurationError):
    pass


class PairedGenerators(ConfigurationError):
    pass


class VertexInA(ConfigurationError):
    pass


class NotAWitness(ConfigurationError):
    pass


class NotNice(ConfigurationError):
    pass


class SecondFormInapplicable(ConfigurationError):
    pass


class OrderOverflow(CapExceeded):
    pass


class SubgroupCountOverflow(CapExceeded):
    pass


class EnumerationTooLarge(CapExceeded):
    pass


class SolverCapExceeded(CapExceeded):
    pass


class CoverCapExceeded(CapExceeded):
    pass
