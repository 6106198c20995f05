"""Exception hierarchy shared by all modules."""


class AlmostFlatError(Exception):
    """Base class for every error raised by this package."""


class NonSquareError(AlmostFlatError, ValueError):
    def __init__(self, rows, cols):
        super().__init__(f"matrix is {rows}x{cols}, expected square")
        self.rows = rows
        self.cols = cols


class MatrixFormatError(AlmostFlatError, ValueError):
    def __init__(self, line, message):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


class PresentationSyntaxError(AlmostFlatError, ValueError):
    """Raised by the presentation parser; ``position`` is a 0-based offset."""

    def __init__(self, position, message, text=None):
        self.position = position
        self.message = message
        self.text = text
        super().__init__(f"position {position}: {message}")


class UnknownGeneratorError(AlmostFlatError, ValueError):
    def __init__(self, name, position=None):
        self.name = name
        self.position = position
        where = "" if position is None else f" at position {position}"
        super().__init__(f"unknown generator {name!r}{where}")


class DuplicateGeneratorError(AlmostFlatError, ValueError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"duplicate generator {name!r}")


class NotUnimodularError(AlmostFlatError, ValueError):
    def __init__(self, index, det=None):
        self.index = index
        self.det = det
        super().__init__(f"holonomy generator {index} has determinant {det}, not +-1")


class NotFiniteError(AlmostFlatError):
    def __init__(self, bound):
        self.bound = bound
        super().__init__(f"point group closure exceeded {bound} elements")


class InconsistentRoutesError(AlmostFlatError):
    def __init__(self, b_direct, b_underlying):
        self.b_direct = b_direct
        self.b_underlying = b_underlying
        super().__init__(
            f"first Betti number disagrees between routes: "
            f"presentation gives {b_direct}, underlying group gives {b_underlying}"
        )


class MissingDataError(AlmostFlatError, ValueError):
    pass


class DescriptorError(AlmostFlatError, ValueError):
    """Malformed descriptor document (schema or field level)."""


class RankMismatchError(AlmostFlatError, ValueError):
    def __init__(self, n1, n2):
        super().__init__(f"forms have different ranks {n1} and {n2}")
        self.n1 = n1
        self.n2 = n2


class NotSymmetricError(AlmostFlatError, ValueError):
    pass


class NotOrientableError(AlmostFlatError):
    pass


class BettiOutOfRangeError(AlmostFlatError):
    def __init__(self, b1, message=None):
        self.b1 = b1
        super().__init__(message or f"first Betti number {b1} out of range 1..4")


class TorusMismatchError(AlmostFlatError):
    pass


class SpinInconsistencyError(AlmostFlatError):
    def __init__(self, b1):
        self.b1 = b1
        super().__init__(
            f"descriptor is marked non-spin but has b1 = {b1}; "
            "non-spin almost-flat 4-manifolds have b1 = 1"
        )
