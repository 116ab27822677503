"""Lyapunov functions, heteroclinic bounds and phase portraits for planar
Kolmogorov systems ``x' = g(x) G(x, y)``, ``y' = h(y) H(x, y)``."""
from .analysis import Analysis, analyze
from .catalog import list_models, load_model
from .errors import KolmoError

__version__ = "0.1.0"

__all__ = ["Analysis", "KolmoError", "analyze", "list_models", "load_model", "__version__"]
