"""Funnel-plot asymmetry tests for diagnostic accuracy meta-analysis."""

from ._core import (
    DtapbError,
    EffectEstimate,
    KendallResult,
    SimCondition,
    SimResult,
    StudyTable,
    TestResult,
    TestVariant,
    TrimFillState,
    analyze,
    default_battery,
    default_grid,
    effective_sample_size,
    estimate,
    estimates,
    generate,
    grid_from_json,
    kendall_tau,
    read_dataset,
    run_condition,
    run_test,
    trim_fill,
    wilson_interval,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
