class ProbabilityError(ValueError):
    """Base class for invalid distributions, maps and shape errors."""


class DimensionMismatchError(ProbabilityError):
    pass


class InvalidDistributionError(ProbabilityError):
    pass


class NotStochasticError(ProbabilityError):
    """The observed dynamics cannot be described by a stochastic map."""

    def __init__(self, message, worst_entry=None, worst_column_sum=None):
        super().__init__(message)
        self.worst_entry = worst_entry
        self.worst_column_sum = worst_column_sum


class RankDeficientError(ProbabilityError):
    def __init__(self, message, rank=None, required=None):
        super().__init__(message)
        self.rank = rank
        self.required = required


class ZeroMarginalError(ProbabilityError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index
