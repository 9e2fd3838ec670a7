"""Exception hierarchy shared by all hsiband modules."""


class HsiError(Exception):
    """Base class for data and processing errors raised by hsiband."""


class MissingFileError(HsiError, FileNotFoundError):
    pass


class MalformedHeaderError(HsiError, ValueError):
    pass


class UnsupportedFormatError(HsiError, ValueError):
    pass


class TruncatedDataError(HsiError, ValueError):
    pass


class ParseError(HsiError, ValueError):
    pass


class ShapeMismatchError(HsiError, ValueError):
    pass


class LabelOutOfRangeError(HsiError, ValueError):
    pass


class InvalidLevelsError(HsiError, ValueError):
    pass


class EmptyBandError(HsiError, ValueError):
    pass


class InvalidSpecError(HsiError, ValueError):
    pass


class SymbolOutOfRangeError(HsiError, ValueError):
    pass


class EmptyInputError(HsiError, ValueError):
    pass


class LengthMismatchError(HsiError, ValueError):
    pass


class EmptyHistogramError(HsiError, ValueError):
    pass


class NoPairsError(HsiError, ValueError):
    """The image is too small for the requested co-occurrence offset."""


class LevelOverflowError(HsiError, ValueError):
    pass


class LevelMismatchError(HsiError, ValueError):
    pass


class EmptyCubeError(HsiError, ValueError):
    pass


class NoLabeledPixelsError(HsiError, ValueError):
    pass


class InvalidFractionError(HsiError, ValueError):
    pass


class EmptySubsetError(HsiError, ValueError):
    pass


class EmptyTrainSetError(HsiError, ValueError):
    pass
