from .experiments import REGISTRY, ExperimentSpec, run_experiment
from .report import Report, emit_report

__all__ = ["REGISTRY", "ExperimentSpec", "Report", "emit_report", "run_experiment"]
