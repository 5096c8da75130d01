"""Exception types raised by the numerical core."""


class NmdError(Exception):
    """Base class for model/numeric errors (CLI exit code 3)."""


class DimensionMismatch(ValueError):
    pass


class NonHermitianSpectrum(NmdError):
    """Probabilities recovered from a spectrum carry an imaginary part."""


class NonRealRates(NmdError):
    """Decoherence rates recovered from mu carry an imaginary part."""


class SpectrumSingularity(NmdError):
    """A map eigenvalue fell below the singularity floor, so mu is undefined."""
