"""Exception hierarchy shared across the engine, DSL, and environment layers."""


class SwarmgridError(Exception):
    """Base class for all errors raised by this package."""


class InvalidConfigError(SwarmgridError):
    """A world, type, or scenario configuration violates its declared bounds."""


class PlacementError(SwarmgridError):
    """A wall or agent cannot be placed at the requested cell."""


class CapacityError(SwarmgridError):
    """Random placement could not find enough free cells."""


class UnknownIdError(SwarmgridError):
    """A type, group, or agent id does not exist."""


class InvalidActionError(SwarmgridError):
    """An action map references unknown agents or out-of-range indexes."""


class ContractError(SwarmgridError):
    """A tensor or batch does not match the shape the callee was bound to."""


class DslError(SwarmgridError):
    """Lexical or syntax error in a reward program.

    Carries 1-based line and column of the first offending token.
    """

    def __init__(self, message, line, col):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class DslValidationError(SwarmgridError):
    """Static validation of a reward program failed; all violations collected."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class OracleTooLargeError(SwarmgridError):
    """Brute-force evaluation would exceed its binding-count guard."""


class ReplayFormatError(SwarmgridError):
    """A replay file is malformed or has an unsupported version."""


class TrainingDivergenceError(SwarmgridError):
    """A non-finite loss was produced during training."""

    def __init__(self, message, curve=None):
        super().__init__(message)
        self.curve = curve if curve is not None else []
