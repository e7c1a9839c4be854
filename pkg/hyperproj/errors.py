class HyperprojError(Exception):
    pass

class InvalidVectorError(HyperprojError):
    pass

class DimensionMismatchError(HyperprojError):
    def __init__(self, expected: int, actual: int, context: str = "") -> None:
        prefix = f"{context}: " if context else ""
        super().__init__(f"{prefix}expected dimension {expected}, got {actual}")
        self.expected = expected
        self.actual = actual

class ZeroNormalError(HyperprojError):
    pass

class InvalidToleranceError(HyperprojError):
    pass

class BasisNotOrthonormalError(HyperprojError):
    pass

class DegenerateDirectionError(HyperprojError):
    pass

class InfeasibleSystemError(HyperprojError):
    def __init__(self, residual: float) -> None:
        super().__init__(f"linear system is infeasible (residual {residual:.17g})")
        self.residual = residual

class ConvergedAtStartError(HyperprojError):
    pass

class InvalidPairingError(HyperprojError):
    pass

class InvalidExperimentConfigError(HyperprojError):
    pass

class ProblemFileParseError(HyperprojError):
    def __init__(self, line_number: int, field: str, message: str) -> None:
        super().__init__(f"line {line_number}: {field}: {message}")
        self.line_number = line_number
        self.field = field
        self.message = message
