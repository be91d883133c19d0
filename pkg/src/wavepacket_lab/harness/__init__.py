"""Configuration, experiment orchestration, fitting and report emission."""

from .fitting import FitResult, loglog_fit
from .report import ScalingReport

__all__ = ["FitResult", "ScalingReport", "loglog_fit"]
