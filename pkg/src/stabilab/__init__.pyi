from . import (
    bounds,
    common,
    config,
    core,
    landscape,
    optimizers,
    problems,
    report,
    search,
    stability,
    suite,
)
from .report import Report

__all__ = [
    "Report",
    "bounds",
    "common",
    "config",
    "core",
    "landscape",
    "optimizers",
    "problems",
    "report",
    "search",
    "stability",
    "suite",
]
