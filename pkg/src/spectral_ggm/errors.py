"""Exception and warning classes raised across the package."""


class SpectralGGMError(Exception):
    """Base class for all package errors."""


class WindowTooLarge(SpectralGGMError, ValueError):
    """Requested window side ``n`` exceeds the lattice side ``N``."""


class WindowMismatch(SpectralGGMError, ValueError):
    """Windowed coefficients do not cover exactly the expected window."""


class SizeLimitExceeded(SpectralGGMError, ValueError):
    """Dense reference computation requested on a lattice that is too large."""


class NonPositiveInput(SpectralGGMError, ValueError):
    pass


class InvalidConfig(SpectralGGMError, ValueError):
    pass


class NonSquareImage(SpectralGGMError, ValueError):
    pass


class ImageFormatError(SpectralGGMError, OSError):
    """Malformed or unsupported image file."""


class NonHermitianInput(UserWarning):
    """Inverse transform of a spectrum whose pixel field is not real."""


class NotConverged(UserWarning):
    """Optimizer hit its iteration budget before the stopping rule held."""


class DegenerateData(UserWarning):
    """Flat data spectrum; the smoothness precision is not identifiable."""
