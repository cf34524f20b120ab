class SamplerError(Exception):
    pass


class ReconstructionError(SamplerError, ValueError):
    """A basis preparation was never accepted, so its output cannot be estimated."""

    def __init__(self, message, cell=None):
        super().__init__(message)
        self.cell = cell
