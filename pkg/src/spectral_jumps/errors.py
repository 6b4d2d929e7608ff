"""Exception hierarchy shared by the library and the command line front end."""


class SpectralJumpsError(ValueError):
    """Base class for every error raised by this package."""


class SignalSpecError(SpectralJumpsError):
    """A piecewise signal description is malformed or violates its invariants."""


class IndexRangeError(SpectralJumpsError):
    """A requested order exceeds the available coefficient range."""


class OrderError(SpectralJumpsError):
    """The detector order is too small (``log(1) == 0``)."""


class AliasingError(SpectralJumpsError):
    """Too few samples for the requested number of coefficients."""


class GridTooCoarseError(SpectralJumpsError):
    """The evaluation grid cannot resolve the trigonometric polynomial."""


class InputFormatError(SpectralJumpsError):
    """A data or signal file could not be parsed."""
