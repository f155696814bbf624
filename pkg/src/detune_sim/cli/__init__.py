from .config import FIGURE_PRESETS, RunConfig, load_config
from .main import main, run
from .output import write_csv

__all__ = ["FIGURE_PRESETS", "RunConfig", "load_config", "main", "run", "write_csv"]
