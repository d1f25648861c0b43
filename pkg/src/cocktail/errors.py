"""Exception hierarchy.

Everything raised for bad input derives from :class:`ValidationError` (and
therefore ``ValueError``) so callers can catch one type; the CLI maps it to
exit status 1 and ``OSError`` to exit status 2.
"""


class CocktailError(Exception):
    """Base class for all package errors."""


class ValidationError(CocktailError, ValueError):
    """Input violates a documented precondition."""


class WavFormatError(ValidationError):
    """WAV header or chunk layout is malformed."""


class UnsupportedFormatError(WavFormatError):
    """Well-formed WAV that is not 16-bit linear PCM mono."""


class DegeneratePosteriorError(ValidationError):
    """Every class likelihood vanished, so Bayes' rule has no denominator."""
