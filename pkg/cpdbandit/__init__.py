"""Piecewise-stationary bandits with active changepoint detection."""
__version__ = "0.1.0"
