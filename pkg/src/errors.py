"""Error hierarchy shared by the library and the CLI.

Every error is a ``ValueError`` so callers that only know about bad input keep
working; ``exit_code`` is what ``app.py`` returns for it.
"""

VALIDATION_FAILED = 1
USAGE = 2
PARSE = 3
MODULE = 4


class PatcoverError(ValueError):
    exit_code = MODULE


class NotAnEdge(PatcoverError):
    pass


class Disconnected(PatcoverError):
    pass


class NoAttachment(PatcoverError):
    pass


class DegenerateInput(PatcoverError):
    pass


class EmptyGraph(PatcoverError):
    pass


class Infeasible(PatcoverError):
    pass


class ExtractionFailed(PatcoverError):
    pass


class InvariantViolation(PatcoverError):
    pass


class WidthTooLarge(PatcoverError):
    def __init__(self, width, budget):
        super().__init__(f"decomposition width {width} exceeds DP budget {budget}")
        self.width = width
        self.budget = budget


class TooLarge(PatcoverError):
    pass


class ReplayMismatch(PatcoverError):
    pass


class BadParams(PatcoverError):
    exit_code = USAGE


class ParseError(PatcoverError):
    exit_code = PARSE


class ValidationFailed(PatcoverError):
    exit_code = VALIDATION_FAILED
