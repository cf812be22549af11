"""Exception hierarchy shared by every module of the package."""


class EvidenceError(Exception):
    """Base class for all errors raised by evidence_logic."""


class InvalidStructure(EvidenceError, ValueError):
    """A space, distribution, table or world violates its invariants."""


class UnknownName(EvidenceError, KeyError):
    """A hypothesis or observation name is not declared."""

    def __str__(self):
        return Exception.__str__(self)


class OrthogonalMeasures(EvidenceError, ArithmeticError):
    """Dempster combination of two measures whose product has zero mass."""


class ZeroSequenceLikelihood(EvidenceError, ArithmeticError):
    """No hypothesis assigns positive probability to an observation sequence."""


class MoreThanTwoHypotheses(EvidenceError, ValueError):
    pass


class UndefinedRatio(EvidenceError, ArithmeticError):
    """Likelihood ratio 0/0."""


class ConditionalMismatch(EvidenceError, ValueError):
    """A joint distribution is not compatible with the likelihood functions."""


class NotRealizable(EvidenceError):
    """A weight table is not the weight function of any evidence space."""

    def __init__(self, condition, detail=""):
        self.condition = condition
        self.detail = detail
        super().__init__(f"{condition} {detail}".strip())


class ParseError(EvidenceError, ValueError):
    def __init__(self, message, position=None, text=None):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} (at offset {position})"
        super().__init__(message)


class QuantifierUnsupported(EvidenceError):
    """Quantified formulas cannot be evaluated by the model checker."""


class FragmentUnsupported(EvidenceError):
    """The satisfiability solver only handles the quantifier-free static fragments."""


class DecodeInconsistent(EvidenceError):
    def __init__(self, message, assertion=None):
        self.assertion = assertion
        super().__init__(message)
