"""Prediction error metrics and summary statistics."""

from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import so3


def position_error(p_pred, p_true):
    """Euclidean distance between predicted and true position, millimeters."""
    return 1000.0 * float(np.linalg.norm(np.asarray(p_pred, dtype=float)
                                         - np.asarray(p_true, dtype=float)))


def orientation_error(q_pred, q_true):
    """Geodesic angle between predicted and true orientation, degrees in [0, 180]."""
    return float(np.degrees(so3.geodesic_distance(q_pred, q_true)))


@dataclass
class SummaryStats:
    n: int
    mean: float
    median: float
    ci_low: float
    ci_high: float
    level: float


def summarize(samples, level=0.95):
    """Median, mean, and a Student-t confidence interval on the mean.

    The median of an even-length sample is the midpoint of the two central
    values. A single sample collapses the interval onto the mean.
    """
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ValueError("cannot summarize an empty sample")
    if not 0.0 < level < 1.0:
        raise ValueError(f"confidence level must be in (0, 1), got {level}")
    mean = float(np.mean(x))
    median = float(np.median(x))
    if x.size == 1:
        return SummaryStats(1, mean, median, mean, mean, level)
    sem = float(np.std(x, ddof=1)) / np.sqrt(x.size)
    half = float(stats.t.ppf(0.5 + 0.5 * level, x.size - 1)) * sem
    return SummaryStats(int(x.size), mean, median, mean - half, mean + half, level)
