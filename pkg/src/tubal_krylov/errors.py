"""Exception hierarchy shared by all modules."""


class TubalError(Exception):
    """Base class for every error raised by this package."""


class ShapeError(TubalError, ValueError):
    """Operands have incompatible or invalid dimensions."""


class SymmetryError(TubalError):
    """A Fourier-domain tensor violates conjugate symmetry, so it has no real
    spatial counterpart. Also raised when an inverse transform leaves a
    non-negligible imaginary residue (internal consistency failure)."""


class NotInvertibleError(TubalError, ArithmeticError):
    """A tube has a (numerically) zero Fourier coefficient.

    ``index`` is the 0-based position of the first offending coefficient.
    """

    def __init__(self, msg, index):
        super().__init__(msg)
        self.index = index


class BreakdownError(TubalError):
    """Normalization hit a Fourier slice whose Frobenius norm is below tol.

    ``index`` is the 0-based Fourier slice; ``block`` is the 0-based block of a
    multi-block factorization, when that applies.
    """

    def __init__(self, msg, index, block=None):
        super().__init__(msg)
        self.index = index
        self.block = block


class RankDeficiencyError(BreakdownError):
    """A block of a tubal-global QR is dependent on its predecessors."""


class SingularSystemError(TubalError, ArithmeticError):
    """A (projected or dense) system has no unique solution."""

    def __init__(self, msg, index=None):
        super().__init__(msg)
        self.index = index


class SizeGuardError(TubalError):
    """The dense reference solver refuses problems above its size guard."""


class FormatError(TubalError, ValueError):
    """Malformed TNS3 file."""
