"""Exception types shared across the package."""


class KirigamiError(Exception):
    """Base class for all errors raised by this package."""


class InvalidSpecError(KirigamiError):
    """The input description failed validation."""


class NoPathError(KirigamiError):
    """p and q lie in different connected components of the slit domain."""


class ExteriorTreeError(KirigamiError):
    """A cut tree lies (partly) outside the region swept by the geodesics.

    Such configurations admit no flat folding that rectifies every geodesic,
    so the construction refuses rather than producing a wrong map.  The
    offending trees are reported as tuples of cut-vertex indices.
    """

    def __init__(self, message: str, trees: tuple[tuple[int, ...], ...] = ()):
        super().__init__(message)
        self.trees = trees


class ConstructionError(KirigamiError):
    """An internal folding step violated one of its post-conditions."""


class UnsupportedConfigurationError(KirigamiError):
    """Valid input outside the scope of the implemented construction."""
