"""Instance generation, file formats and the experiment harness."""

from .experiment import DETAIL_FIELDS, SUMMARY_FIELDS, ReportRow, load_specs, run_experiment
from .generate import SIGMA_RANGES, GenSpec, SplitMix64, generate_instance
from .io import read_instance, result_to_dict, write_instance

__all__ = [
    "DETAIL_FIELDS",
    "SIGMA_RANGES",
    "SUMMARY_FIELDS",
    "GenSpec",
    "ReportRow",
    "SplitMix64",
    "generate_instance",
    "load_specs",
    "read_instance",
    "result_to_dict",
    "run_experiment",
    "write_instance",
]
