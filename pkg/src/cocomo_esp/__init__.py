"""COCOMO-II effort estimation and size-error sensitivity analysis."""
from .model import (
    ATTRIBUTES,
    DEFAULT_PARAMS,
    DEFAULT_TUNINGS,
    EFFORT_MULTIPLIERS,
    SCALE_FACTORS,
    CalibrationParams,
    Project,
    Rating,
    TuningTable,
    effort_multiplier_product,
    estimate_effort,
    scale_factor_sum,
)
from .dataset import Dataset, load_dataset, write_dataset

__version__ = "0.1.0"
