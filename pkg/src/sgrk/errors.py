"""Exception types shared by the package."""


class SGRKError(Exception):
    """Base class for all package errors."""


class DDError(SGRKError):
    """Misuse of the decision-diagram kernel."""


class SpecSyntaxError(SGRKError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line, self.col = line, col
        where = f"line {line}, col {col}: " if line else ""
        super().__init__(where + message)


class SeparationError(SGRKError):
    """An assertion mentions a variable outside its allowed set."""

    def __init__(self, message: str, variable: str = ""):
        self.variable = variable
        super().__init__(message)


class DeadlockError(SGRKError):
    def __init__(self, message: str, player: str = "", witness=None):
        self.player, self.witness = player, witness
        super().__init__(message)


class InitError(SGRKError):
    """An initial condition is unsatisfiable."""


class NotWeakError(SGRKError):
    """An acceptance set splits a strongly connected component."""

    def __init__(self, message: str, witness=None):
        self.witness = witness
        super().__init__(message)


class ControllerError(SGRKError):
    """The controller was stepped outside its contract."""


class BudgetError(SGRKError):
    """An explicit construction would exceed its state budget."""


class TransducerError(SGRKError):
    pass


class ExportError(SGRKError):
    pass
