from .params import ExtremalSpec, Moments, Params
from .reports import FunctionalReport

__all__ = ["ExtremalSpec", "FunctionalReport", "Moments", "Params"]
