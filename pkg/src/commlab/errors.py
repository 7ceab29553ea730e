"""Exception hierarchy shared by all commlab modules."""


class CommlabError(Exception):
    """Base class for all errors raised by commlab."""


class ValidationError(CommlabError, ValueError):
    """Bad inputs: precondition violations, mismatched grids, size guards."""


class NumericalError(CommlabError, ArithmeticError):
    """A computation could not be completed reliably (quadrature failure,
    SVD breakdown, power iteration that did not converge)."""


class ConfigError(CommlabError, ValueError):
    """An experiment config file could not be parsed or is malformed."""
