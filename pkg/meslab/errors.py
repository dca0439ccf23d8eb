"""Exception types raised by meslab."""


class MeslabError(Exception):
    """Base class for all meslab errors."""


class DimensionError(MeslabError, ValueError):
    """Dimension is not an odd prime."""


class IncommensurableScaleError(MeslabError, ArithmeticError):
    """Two nonzero cyclotomic numbers carry sqrt(d) scales of different parity."""


class DimensionMismatchError(MeslabError, ValueError):
    """Operands live in different Hilbert spaces."""


class LabelingMismatchError(MeslabError, ValueError):
    """Pair state carries the wrong labeling for the requested operation."""


class ParallelError(MeslabError):
    """The two points lie in the same column, so no line joins them."""

    def __init__(self, first, second):
        self.first = first
        self.second = second
        super().__init__(f"no line joins {first} and {second}: same column")


class ConsistencyError(MeslabError, AssertionError):
    """An identity that must hold exactly did not."""


class ConfigError(MeslabError, ValueError):
    """Invalid run configuration."""
