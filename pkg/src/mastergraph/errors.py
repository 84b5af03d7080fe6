"""Exception hierarchy.

Every error carries a stable ``code`` string and the process exit code the
CLI uses for it (2 input validation, 3 internal numeric mismatch, 4 resource
caps).
"""


class MastergraphError(Exception):
    code = "error"
    exit_code = 1


class ValidationError(MastergraphError, ValueError):
    code = "validation"
    exit_code = 2


class ParseError(ValidationError):
    """Input text could not be turned into a network.

    ``line`` is the 1-based line number, or None when the problem is not
    tied to a single line (e.g. JSON input).
    """

    code = "parse"

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MalformedLine(ParseError):
    code = "malformed_line"


class DuplicateEdge(ParseError):
    code = "duplicate_edge"


class SelfLoop(ParseError):
    code = "self_loop"


class NonPositiveRate(ParseError):
    code = "non_positive_rate"


class IndexOutOfRange(ValidationError, IndexError):
    code = "index_out_of_range"


class EmptySet(ValidationError):
    code = "empty_set"


class NonSquare(ValidationError):
    code = "non_square"


class StaleCondensation(ValidationError):
    code = "stale_condensation"


class NoTransientStates(ValidationError):
    code = "no_transient_states"


class NotStronglyConnected(ValidationError):
    code = "not_strongly_connected"


class NegativeTime(ValidationError):
    code = "negative_time"


class InvalidProbability(ValidationError):
    code = "invalid_probability"


class NumericMismatch(MastergraphError, ArithmeticError):
    code = "numeric_mismatch"
    exit_code = 3


class SingularTransientBlock(NumericMismatch):
    code = "singular_transient_block"


class TooLarge(MastergraphError):
    code = "too_large"
    exit_code = 4
