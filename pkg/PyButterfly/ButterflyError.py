class ButterflyError(Exception):
    def __init__(self, message, error = None):
        super().__init__(message)
        self.error = error

    def __str__(self) -> str:
        if self.error:
            return f"{super().__str__()} ({self.error})"
        return super().__str__()

class ArgumentError(ButterflyError, ValueError):
    def __init__(self, message, error = None):
        super().__init__(message, error)

class DimensionError(ArgumentError):
    def __init__(self, message, expected = None, actual = None):
        super().__init__(message)
        self.expected = expected
        self.actual = actual

class DomainError(ButterflyError, ValueError):
    """ Evaluation point outside the open interval (-1, 1) """
    def __init__(self, message, points = None):
        super().__init__(message)
        self.points = points

class ComputationError(ButterflyError, ArithmeticError):
    def __init__(self, message, details : dict = None, error = None):
        super().__init__(message, error)
        self.details = details or {}

class PlanFormatError(ButterflyError, IOError):
    def __init__(self, message, offset : int = None):
        super().__init__(message)
        self.offset = offset

    def __str__(self) -> str:
        if self.offset is not None:
            return f"{self.args[0]} at byte offset {self.offset}"
        return str(self.args[0])

class VerificationError(ButterflyError):
    def __init__(self, message, property_name : str = None, instance = None):
        super().__init__(message)
        self.property_name = property_name
        self.instance = instance
