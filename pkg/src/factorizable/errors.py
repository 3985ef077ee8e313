"""Exception hierarchy shared by all modules."""


class FactorizableError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(FactorizableError, ValueError):
    pass


class NotHermitian(FactorizableError, ValueError):
    pass


class NotCompletelyPositive(FactorizableError, ValueError):
    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class NotTracePreserving(FactorizableError, ValueError):
    pass


class NotUnital(FactorizableError, ValueError):
    pass


class NotUCPT(FactorizableError, ValueError):
    pass


class NotUnitary(FactorizableError, ValueError):
    pass


class NotCorrelationMatrix(FactorizableError, ValueError):
    pass


class WeightError(FactorizableError, ValueError):
    pass


class InvalidPVM(FactorizableError, ValueError):
    pass


class NonCommutingPVMs(FactorizableError, ValueError):
    def __init__(self, x, y, a, b, norm):
        super().__init__(
            f"Alice PVM {x} outcome {a} does not commute with Bob PVM {y} "
            f"outcome {b} (commutator norm {norm:.3g})"
        )
        self.index = (x, y, a, b)
        self.norm = norm


class InvalidTable(FactorizableError, ValueError):
    pass


class SizeOverflow(FactorizableError, ValueError):
    pass


class SchemaError(FactorizableError, ValueError):
    """Malformed input file; ``path`` is a JSON-pointer to the offending field."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path
