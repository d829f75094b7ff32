# Base class for exceptions
class PcfgCompressException(Exception):
    """Base class for exceptions in this package."""

    pass


class GrammarError(PcfgCompressException):
    """Raised when a derivation cannot be carried out in a grammar."""

    pass


class ChoiceUnderflow(GrammarError):
    """Raised when the choice sequence ends before the derivation does."""

    pass


class ChoiceOutOfRange(GrammarError):
    """Raised when a choice names a rule its head does not have."""

    pass


class EmptyDerivation(GrammarError):
    """Raised when a nonterminal with no rules has to be expanded."""

    pass


class UnknownRule(GrammarError):
    """Raised when a rule is not part of the grammar."""

    pass


class ProbabilityModeError(GrammarError):
    """Raised when explicit probabilities are needed from an adaptive PCFG."""

    pass


class FibonacciError(PcfgCompressException):
    """Base class for noisy Fibonacci string errors."""

    pass


class InvalidIndex(FibonacciError):
    """Raised when a Fibonacci index is outside the supported range."""

    pass


class InvalidNoiseSpec(FibonacciError):
    """Raised when a noise specification is malformed."""

    pass


class RatioOutOfRange(InvalidNoiseSpec):
    """Raised when a noise ratio is outside [0, 1]."""

    pass


class LengthMismatch(FibonacciError):
    """Raised when a text or choice sequence does not have length |Fib_m|."""

    pass


class IllegalLetter(FibonacciError):
    """Raised when a letter cannot be derived by the selected grammar."""

    pass


class RepairError(PcfgCompressException):
    """Base class for Re-Pair construction errors."""

    pass


class EmptyInput(RepairError):
    """Raised when an empty text is given to a grammar construction."""

    pass


class RuleMissing(RepairError):
    """Raised when a replacement refers to a rule that was never added."""

    pass


class CodingError(PcfgCompressException):
    """Base class for entropy coding and serialization errors."""

    pass


class InvalidModel(CodingError):
    """Raised when a frequency model cannot be built."""

    pass


class SymbolOutOfRange(CodingError):
    """Raised when a symbol is outside the model's alphabet."""

    pass


class TruncatedStream(CodingError):
    """Raised when the coded stream ends before all symbols are decoded."""

    pass


class MalformedBytes(CodingError):
    """Raised when serialized bytes do not follow the container format."""

    pass


class UnsupportedShape(CodingError):
    """Raised when a grammar does not have the serializable Re-Pair shape."""

    pass


class MethodMismatch(CodingError):
    """Raised when an artifact is handed to the wrong method."""

    pass


class BenchError(PcfgCompressException):
    """Base class for benchmark harness errors."""

    pass


class InvalidBenchConfig(BenchError):
    """Raised when a benchmark configuration is invalid."""

    pass


class ExternalToolMissing(BenchError):
    """Raised when an external compressor cannot be found on PATH."""

    pass


class ConflictingOptions(PcfgCompressException):
    """Raised when command-line options contradict each other."""

    pass
