class MagneticFieldError(Exception):
    """Base class for errors raised by the library."""


class StructureError(MagneticFieldError, ValueError):
    """Structure is invalid or excluded from the requested operation."""


class StructureInputError(StructureError):
    """Structure flag or query text could not be parsed."""


class NonUnitVectorError(MagneticFieldError, ValueError):
    """Operation requires a unit frame vector."""


class FrameIndexError(MagneticFieldError, ValueError):
    """Frame indices out of range or not distinct."""


class StructureMismatchError(MagneticFieldError):
    """Solution set and scan were computed for different structures."""
