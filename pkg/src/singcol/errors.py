"""Exception types. Everything raised on bad domain input derives from DomainError."""


class DomainError(Exception):
    pass


class ArityError(DomainError):
    pass


class ParseError(DomainError):
    def __init__(self, message: str, position: int = -1):
        self.position = position
        if position >= 0:
            message = f"{message} at position {position}"
        super().__init__(message)


class NotAGermError(DomainError):
    pass


class NonIsolatedError(DomainError):
    pass


class NonReducedError(DomainError):
    pass


class DegenerateInputError(DomainError):
    pass


class InconsistencyError(DomainError):
    """An internal identity between invariants failed."""


class OrderConventionError(DomainError):
    pass


class UnsupportedCaseError(DomainError):
    pass


class NotTabulatedError(DomainError):
    pass


class PreconditionError(DomainError):
    pass


class NonTerminationError(DomainError):
    pass


class GenericityError(DomainError):
    pass


class StructuralBugError(Exception):
    pass
