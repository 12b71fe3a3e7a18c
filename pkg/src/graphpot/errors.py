"""Exception hierarchy shared by the library and the CLI."""


class GraphpotError(Exception):
    """Base class for every error raised by graphpot."""


class ConfigError(GraphpotError, ValueError):
    """Invalid family specification, experiment config or parameter."""


class DomainError(GraphpotError, ValueError):
    """A function or vertex set is not defined where an operation needs it."""


class BallEscapesError(DomainError):
    """A metric ball reaches the horizon of its truncation."""


class IllPosedError(GraphpotError):
    """A Dirichlet problem has an interior component with no boundary contact."""


class SolverError(GraphpotError):
    """The energy minimiser did not reach its tolerance."""

    def __init__(self, message, residual=float("nan"), iterations=0):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class PreconditionError(GraphpotError):
    """The inputs do not satisfy a construction's hypotheses."""


class InconsistencyError(GraphpotError):
    """A checked inequality failed; signals an estimator or solver defect."""


class SearchError(GraphpotError):
    """Every candidate in a quotient search degenerated to zero."""
