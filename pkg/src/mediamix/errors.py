"""Exception types shared across the toolkit."""


class MediaMixError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(MediaMixError):
    """Invalid or inconsistent configuration."""


class DataError(MediaMixError):
    """Problem with ingested or generated observation data."""


class ConstantColumn(DataError):
    """A column has (near-)zero sample standard deviation."""

    def __init__(self, name: str):
        super().__init__(f"column {name!r} is constant (sample SD below threshold)")
        self.name = name


class NumericalError(MediaMixError):
    """Numerical failure inside a fitting or optimization routine."""


class RankDeficient(NumericalError):
    """Cross-product matrix of the regression design is (near-)singular."""


class NotPositiveDefinite(NumericalError):
    """Matrix failed a positive-definiteness check during factorization."""

    def __init__(self, leading_minor_index: int):
        super().__init__(
            f"matrix is not positive definite (pivot {leading_minor_index} <= 0)"
        )
        self.leading_minor_index = leading_minor_index


class ResampleExhausted(NumericalError):
    """Bound-violating rows could not be redrawn within the attempt budget."""


class CommunalityExceedsOne(NumericalError):
    """A loading row has squared length >= 1, leaving no residual variance."""

    def __init__(self, row: int):
        super().__init__(f"loading row {row} has communality >= 1")
        self.row = row


class ConvergenceFailure(NumericalError):
    """An iterative routine hit its iteration cap before converging."""


class ZeroComponents(NumericalError):
    """The eigenvalue-greater-than-one rule retained no components."""


class SingularSubmatrix(NumericalError):
    """Correlation submatrix is singular; partial correlation undefined."""


class InsufficientSample(NumericalError):
    """Too few observations for the requested conditional-independence test."""


class InfeasibleBounds(NumericalError):
    """A variable's lower bound exceeds its upper bound."""

    def __init__(self, variable: str):
        super().__init__(f"lower bound exceeds upper bound for {variable!r}")
        self.variable = variable


class PipelineStageError(MediaMixError):
    """Wraps a failure with the pipeline stage where it occurred.

    Tables produced by stages that completed before the failure ride along so
    the caller can still emit a partial report.
    """

    def __init__(self, stage: str, original: Exception, tables: dict | None = None):
        super().__init__(f"[{stage}] {original}")
        self.stage = stage
        self.original = original
        self.tables = tables if tables is not None else {}
