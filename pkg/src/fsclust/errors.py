"""Exception hierarchy shared by all pipeline stages."""


class FsClustError(Exception):
    """Base class for every error raised by fsclust."""


class MalformedInput(FsClustError, ValueError):
    pass


class IrregularSampling(FsClustError, ValueError):
    pass


class GapTooLarge(FsClustError, ValueError):
    def __init__(self, series_id, start, length, max_gap=None):
        self.series_id = series_id
        self.start = start
        self.length = length
        self.max_gap = max_gap
        msg = f"series {series_id!r}: masked run of length {length} at index {start}"
        if max_gap is not None:
            msg += f" cannot be filled (max_gap={max_gap})"
        super().__init__(msg)


class NoOverlap(FsClustError, ValueError):
    pass


class SeriesTooShort(FsClustError, ValueError):
    pass


class DegenerateSample(FsClustError, ValueError):
    pass


class BandwidthFailure(FsClustError, ArithmeticError):
    """Plug-in recursion produced a non-finite or non-positive functional."""


class QuadratureFailure(FsClustError, ArithmeticError):
    pass


class IsoperimetricViolation(FsClustError, ArithmeticError):
    pass


class LengthMismatch(FsClustError, ValueError):
    pass


class DegenerateComplexity(FsClustError, ValueError):
    pass


class InvalidK(FsClustError, ValueError):
    pass


class ConfigError(FsClustError, ValueError):
    pass
