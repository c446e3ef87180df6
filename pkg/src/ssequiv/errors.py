"""Exception types raised by the library.

Every error carries a ``code`` used by the command-line front end as its
process exit status.
"""


class SSEquivError(Exception):
    """Base class for all library errors."""

    code = 1

    def fields(self):
        """Key/value pairs for a one-line diagnostic."""
        return {}

    def diagnostic(self):
        parts = [f"error={type(self).__name__}"]
        parts += [f"{k}={v}" for k, v in self.fields().items()]
        parts.append(f"message={str(self)!r}")
        return " ".join(parts)


class DimensionMismatch(SSEquivError, ValueError):
    code = 2


class NonFiniteEntries(SSEquivError, ValueError):
    code = 2


class SizeCapExceeded(SSEquivError, ValueError):
    code = 2

    def __init__(self, rows, cols, cap):
        super().__init__(f"{rows}x{cols} result exceeds the dense size cap of {cap} per side")
        self.rows, self.cols, self.cap = rows, cols, cap

    def fields(self):
        return {"rows": self.rows, "cols": self.cols, "cap": self.cap}


class NumericalBreakdown(SSEquivError, ArithmeticError):
    code = 5


class SingularMatrix(SSEquivError, ArithmeticError):
    code = 6

    def __init__(self, message, condition=float("inf")):
        super().__init__(message)
        self.condition = condition

    def fields(self):
        return {"condition": f"{self.condition:.6g}"}


class NotObservable(SSEquivError):
    """One of the (A, C) pairs fails the observability rank test."""

    code = 3

    def __init__(self, which, rank, n_x):
        super().__init__(f"pair {which!r} is not observable: rank {rank} < n_x = {n_x}")
        self.which, self.rank, self.n_x = which, rank, n_x

    def fields(self):
        return {"which": self.which, "rank": self.rank, "n_x": self.n_x}


class KernelDimensionMismatch(SSEquivError):
    """The displacement kernel does not have dimension ``n_x``.

    ``dim < n_x`` means the state matrices are not similar; ``dim > n_x``
    means a derogatory (ambiguous) case where uniqueness cannot be argued.
    """

    code = 4

    def __init__(self, dim, n_x):
        self.dim, self.n_x = dim, n_x
        super().__init__(f"kernel dimension {dim} != n_x = {n_x}: {self.diagnosis}")

    @property
    def diagnosis(self):
        if self.dim < self.n_x:
            return "not-similar"
        return "derogatory-ambiguous"

    def fields(self):
        return {"dim": self.dim, "n_x": self.n_x, "diagnosis": self.diagnosis}


class RankDeficientCoefficientSystem(SSEquivError):
    code = 5

    def __init__(self, rank, n_x):
        super().__init__(f"coefficient system has rank {rank} < n_x = {n_x}; T is not unique")
        self.rank, self.n_x = rank, n_x

    def fields(self):
        return {"rank": self.rank, "n_x": self.n_x}


class ResidualTooLarge(SSEquivError):
    code = 5

    def __init__(self, what, residual, tol):
        super().__init__(f"{what} residual {residual:.3e} exceeds tolerance {tol:.3e}")
        self.what, self.residual, self.tol = what, residual, tol

    def fields(self):
        return {"what": self.what, "residual": f"{self.residual:.6g}", "tol": f"{self.tol:.6g}"}


class SingularTransform(SSEquivError):
    code = 6

    def __init__(self, message, condition=float("inf")):
        super().__init__(message)
        self.condition = condition

    def fields(self):
        return {"condition": f"{self.condition:.6g}"}


class NotSimilarOrAmbiguous(SSEquivError):
    """Raised by the brute-force oracle when no unique T solves the stacked system."""

    code = 4


class GenerationFailure(SSEquivError, RuntimeError):
    code = 1
