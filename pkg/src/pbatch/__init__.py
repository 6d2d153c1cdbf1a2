"""Column generation bounds and price-and-branch schedules for parallel-batching machines."""

__version__ = "0.1.0"

from .bounds import PrBound, pr_bound
from .colgen import CgConfig, CgResult, price_and_branch, run_cg
from .model import Instance, Schedule, evaluate_schedule, validate_instance
from .oracle import exact_optimum

__all__ = [
    "CgConfig",
    "CgResult",
    "Instance",
    "PrBound",
    "Schedule",
    "__version__",
    "evaluate_schedule",
    "exact_optimum",
    "pr_bound",
    "price_and_branch",
    "run_cg",
    "validate_instance",
]
