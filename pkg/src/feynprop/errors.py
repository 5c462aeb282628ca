"""Exception types shared across the package.

Plain argument errors (dimension mismatches, bad ranges) raise the builtin
ValueError; the classes below cover conditions a caller may want to catch
and handle separately.
"""


class FeynpropError(Exception):
    """Base class for package-specific failures."""


class UnsupportedError(FeynpropError):
    """Requested operation is outside the supported problem class."""


class ConvergenceBudgetError(FeynpropError):
    """Series truncation could not certify the requested tolerance.

    Carries the deepest result computed so far in ``partial``.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class PrecisionLossError(FeynpropError):
    """A series or iteration failed to converge within its term budget."""


class PoleError(FeynpropError):
    """Evaluation requested at (or too close to) a pole.

    ``location`` is the pole position, ``residue_sign`` the sign of the
    residue there (for gamma at -n this is (-1)^n).
    """

    def __init__(self, message, location=None, residue_sign=None):
        super().__init__(message)
        self.location = location
        self.residue_sign = residue_sign


class GreenFormError(FeynpropError):
    """Green-function evaluation outside a form's domain.

    ``form`` identifies which representation failed ("whittaker" or
    "kummer").
    """

    def __init__(self, message, form):
        super().__init__(message)
        self.form = form


class DomainTooSmallError(FeynpropError):
    """Grid oracle detected amplitude leaking through the boundary."""


class ConfigError(FeynpropError):
    """Malformed run configuration; ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
