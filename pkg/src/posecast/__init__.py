"""Predictability-aware 6-DoF pose prediction.

A numpy library for forecasting head poses over short horizons with
error-state Kalman filters of selectable kinematic order, plus an
entropy-based motion classifier and a reproducible benchmark harness.
"""

__version__ = "0.1.0"
