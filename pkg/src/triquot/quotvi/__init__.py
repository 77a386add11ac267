"""Root-of-unity evaluation of virtual Quot-scheme intersection numbers."""

from .engine import (
    BatteryCase,
    CalibrationError,
    DegreeMatchError,
    VIConvention,
    VIInstance,
    calibrate,
    default_search_space,
    resolve_workers,
    run_battery,
    vi_sum,
)
from .subsets import count_subsets, enumerate_subsets, next_subset, rank_subset, unrank_subset

__all__ = [
    "BatteryCase",
    "CalibrationError",
    "DegreeMatchError",
    "VIConvention",
    "VIInstance",
    "calibrate",
    "count_subsets",
    "default_search_space",
    "enumerate_subsets",
    "next_subset",
    "rank_subset",
    "resolve_workers",
    "run_battery",
    "unrank_subset",
    "vi_sum",
]
