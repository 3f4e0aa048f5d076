"""Exception hierarchy shared by all masep modules."""


class MasepError(Exception):
    """Base class; CLI maps these to exit code 2."""


class InvalidDimension(MasepError):
    """Matrix/tensor shapes incompatible with the requested operation."""


class SingularMatrix(MasepError):
    """Exact inverse requested for a singular matrix."""


class SpectralPole(MasepError):
    """Spectral parameter hits a pole of R(x), k(x) or a derived object."""


class DegenerateRates(MasepError):
    """Boundary rate pair with a + c = 0."""


class InvalidSpecies(MasepError):
    """Species label outside 1..N."""


class InvalidSpec(MasepError):
    """Boundary spec violating the integer constraints."""


class NonMarkovian(MasepError):
    """Rates/q combination yielding negative transition rates."""


class SingularConjugation(MasepError):
    """Diagonal deformation with a zero weight."""


class DegenerateQ(MasepError):
    """Operation undefined at q = 1."""


class InvalidComparison(MasepError):
    """Empirical/exact distributions indexed incompatibly."""


class DimensionCapExceeded(MasepError):
    """Configuration space larger than the configured safety cap."""
