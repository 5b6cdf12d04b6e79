from .config import NumericConfig
from .exceptions import (
    ConvergenceError,
    IntegrationError,
    InvalidArgument,
    LoewnerLabError,
    NumericalError,
    ResolutionError,
)

__version__ = "0.1.0"
