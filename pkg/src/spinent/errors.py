class SpinEntError(Exception):
    """Base class for errors raised by spinent."""


class GridError(SpinEntError, ValueError):
    pass


class OrbitalError(SpinEntError, ValueError):
    pass


class UndefinedPointError(SpinEntError, ValueError):
    """A quantity was requested where the density is below the floor."""


class NegativeDError(SpinEntError, ValueError):
    pass


class CubeParseError(SpinEntError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CsvError(SpinEntError, ValueError):
    pass
