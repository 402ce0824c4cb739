"""Exception hierarchy shared by all fmb modules."""


class FMBError(ValueError):
    """Base class for every error raised by fmb."""


class DimensionError(FMBError):
    """Shapes or dimensions are incompatible with the operation."""


class ParameterError(FMBError):
    """A scalar parameter lies outside its admissible range."""


class NotHermitianError(FMBError):
    pass


class NotPositiveDefiniteError(FMBError):
    pass


class RankError(FMBError):
    """The numerical rank differs from the declared one."""


class VerificationError(FMBError):
    """A structural check (isotropy, unit diagonal, ...) failed."""
