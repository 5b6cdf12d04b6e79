from .curves import (
    ArcSpec,
    LineSpec,
    PerturbedArcSpec,
    PerturbedLineSpec,
    capacity_length_ratio,
    generate_curve,
    mobius_to_segment,
)
from .driving import DrivingFunction, DrivingKind
from .types import (
    ComplexPoint,
    Curve,
    IntervalOnR,
    LimitEstimate,
    MeasurePair,
    RatioSeries,
    Side,
    SingularPair,
)
