"""Exception types shared across the package.

The CLI maps :class:`ValidationError` subclasses to exit code 2 and
:class:`NumericalError` subclasses to exit code 3.
"""


class ValidationError(ValueError):
    """Invalid user-supplied input (parameters, temperatures, brackets)."""


class ParameterError(ValidationError):
    """A Hamiltonian parameter set or parameter file is malformed."""


class UnknownPresetError(ParameterError, KeyError):
    def __init__(self, name, available):
        self.name = name
        self.available = tuple(available)
        super().__init__(
            f"unknown preset {name!r}; available: {', '.join(self.available)}"
        )

    def __str__(self):
        return self.args[0]


class DomainError(ValidationError):
    """Argument outside the domain of a thermodynamic function (e.g. T <= 0)."""


class NotHermitianError(ValidationError):
    pass


class NoEfficiencyError(ValidationError):
    """Efficiency requested for a cycle that has no operating mode."""


class NumericalError(ArithmeticError):
    """A numerical procedure failed to deliver a certified result."""


class ConvergenceError(NumericalError):
    pass


class NoRootError(NumericalError):
    """A bracketed root search found no sign change."""
