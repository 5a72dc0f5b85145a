"""Figure rendering for bicopter-safe scenario logs."""
from .figures import (FIGURES, EmptyLogError, FigureSpec, LogSchemaError,
                      data_extents, load_log, render_figures)

__version__ = "0.1.0"

__all__ = ["FIGURES", "EmptyLogError", "FigureSpec", "LogSchemaError",
           "data_extents", "load_log", "render_figures"]
