from .cli import RunConfig, main, run
from .config import OptimizerSettings, Tolerances

__all__ = ["OptimizerSettings", "RunConfig", "Tolerances", "main", "run"]

__version__ = "0.1.0"
