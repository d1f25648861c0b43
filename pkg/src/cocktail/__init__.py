"""Multi-speaker recognition in a cocktail-party setting.

MFCC voiceprints, per-coefficient Gaussian speaker models and a
distance-based decision procedure that answers two questions about a probe
voice: is it one of the speakers talking in a group, and if so, which one.
"""

from .errors import (
    CocktailError,
    DegeneratePosteriorError,
    UnsupportedFormatError,
    ValidationError,
    WavFormatError,
)

__version__ = "0.1.0"

__all__ = [
    "CocktailError",
    "DegeneratePosteriorError",
    "UnsupportedFormatError",
    "ValidationError",
    "WavFormatError",
    "__version__",
]
