from .run_config import RunConfig, load_config_file, merge

__all__ = ["RunConfig", "load_config_file", "merge"]
