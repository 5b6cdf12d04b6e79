from .grid_oracle import harmonic_measure_grid_oracle
from .harmonic import harmonic_measure_interval, measures_from_pair, slit_side_measures
from .sweeps import (
    EXTRAPOLATION_MODELS,
    THEOREM2_QUANTITIES,
    extrapolate_limit,
    ratio_theorem1,
    ratio_theorem2,
    theorem2_value,
    theorem_limit,
    unresolved_capacities,
)
