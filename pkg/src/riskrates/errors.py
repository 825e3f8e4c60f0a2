"""Exception hierarchy shared across the package."""


class RiskratesError(Exception):
    """Base class for all package errors."""


class ParameterError(RiskratesError, ValueError):
    """A distribution, loss, or risk parameter is outside its valid range."""


class EmptyInputError(RiskratesError, ValueError):
    """An operation received an empty sample or scenario set."""


class SchemaError(RiskratesError, ValueError):
    """A config file or serialized object violates its schema."""


class ParseError(RiskratesError, ValueError):
    """A cell or field could not be parsed as a finite real."""


class ContractError(RiskratesError, ValueError):
    """A loss function lacks a property required by the requested use."""


class InfeasibleError(RiskratesError, RuntimeError):
    """A root-finding bracket could not be established."""


class NumericError(RiskratesError, RuntimeError):
    """An iterative solver failed to converge within its iteration cap."""

    def __init__(self, message, residual=None, best_value=None):
        super().__init__(message)
        self.residual = residual
        self.best_value = best_value
