"""Exception types raised by the library."""


class ChurError(Exception):
    """Base class for all library-specific errors."""


class ShiftTooLarge(ChurError, ValueError):
    """Requested translation would wrap around the periodic grid."""


class GridTooSmall(ChurError, ValueError):
    """State geometry does not fit inside the grid window."""


class TeethUnresolved(ChurError, ValueError):
    """Comb teeth are narrower than the grid can resolve."""


class ZeroVariance(ChurError, ValueError):
    """An operation requiring a finite spread received a degenerate state."""


class DomainOverflow(ChurError, ValueError):
    """Detection window extends beyond what the grids can represent."""


class NonIntegrableMask(ChurError, ValueError):
    """Mask transmittance is not square-integrable."""


class InvalidShots(ChurError, ValueError):
    """Shot count cannot be split between the two readout bases."""


class NotUnitary(ChurError, ValueError):
    """Matrix expected to be unitary is not."""


class NotUnitVector(ChurError, ValueError):
    """Vector expected to have unit norm does not."""


class ConfigError(ChurError, ValueError):
    """Invalid or malformed run configuration."""
