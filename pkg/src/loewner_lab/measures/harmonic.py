import numpy as np

from ..config import NumericConfig
from ..core import DrivingFunction, IntervalOnR, MeasurePair
from ..loewner_flow import singular_pair


def harmonic_measure_interval(interval: IntervalOnR) -> float:
    """
    Harmonic measure of a real interval at the point i with respect to the
    upper half-plane: the angle under which the interval is seen from i,
    divided by π.
    """
    return float((np.arctan(interval.b) - np.arctan(interval.a)) / np.pi)


def measures_from_pair(pair) -> MeasurePair:
    return MeasurePair(
        t=pair.t,
        m_left=harmonic_measure_interval(pair.left_interval),
        m_right=harmonic_measure_interval(pair.right_interval),
    )


def slit_side_measures(driving: DrivingFunction, t: float, cfg: NumericConfig) -> MeasurePair:
    """
    Harmonic measures of the left and right slit sides at f^{-1}(i, t) with
    respect to the slit domain; by conformal invariance these are the
    measures at i of the images [f_minus, λ(t)] and [λ(t), f_plus].
    """
    return measures_from_pair(singular_pair(driving, t, cfg))
