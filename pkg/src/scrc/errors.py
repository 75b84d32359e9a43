"""Exception hierarchy shared by all modules."""


class ScrcError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(ScrcError, ValueError):
    pass


class AlignmentError(ScrcError, ValueError):
    pass


class ParameterError(ScrcError, ValueError):
    pass


class DegenerateColumnError(ScrcError, ValueError):
    def __init__(self, column, message=None):
        self.column = column
        super().__init__(message or f"column {column} vanishes after centering")


class NumericError(ScrcError, ArithmeticError):
    pass


class OracleCapError(ScrcError, ValueError):
    pass


class TooShortError(ScrcError, ValueError):
    pass


class ChannelMismatchError(ScrcError, ValueError):
    pass


class TrainingError(ScrcError, RuntimeError):
    def __init__(self, message, gesture_id=None):
        self.gesture_id = gesture_id
        super().__init__(message)
