"""Exception and warning types raised across the package."""


class EirlabError(Exception):
    """Base class for all package errors."""


class ParseError(EirlabError, ValueError):
    """A prediction or dataset file is malformed."""


class LabelRangeError(EirlabError, ValueError):
    """A label or prediction falls outside ``0..K-1``."""


class WeightError(EirlabError, ValueError):
    """Classifier weights are negative or cannot be normalized."""


class SpecError(EirlabError, ValueError):
    """A pathological-ensemble specification is inconsistent."""


class ParameterError(EirlabError, ValueError):
    """A generator or fitter received an invalid parameter."""


class NonFiniteError(EirlabError, ArithmeticError):
    """The optimizer produced a non-finite loss."""


class ZeroErrorWarning(UserWarning):
    """Average error is zero, so EIR and DER are undefined."""
