class LoewnerLabError(Exception):
    pass


class InvalidArgument(LoewnerLabError):
    """Input or spec string that violates an operation's preconditions."""


class NumericalError(LoewnerLabError):
    pass


class ConvergenceError(NumericalError):
    """Newton iteration, extrapolation or a least-squares fit did not settle."""


class IntegrationError(NumericalError):
    pass


class ResolutionError(NumericalError):
    """The discretisation is too coarse for the requested geometry; refine it."""
