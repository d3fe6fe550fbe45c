from .runner import ExperimentConfig, compare, write_figures, run_sweep, write_sweep_csv
from .cli import main
