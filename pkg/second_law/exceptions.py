class FixedPointNotConverged(RuntimeError):
    """Power iteration ran out of steps before the fixed point settled."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
