"""Busy-period kernel selection: the compiled extension when built, else pure Python."""
from ._busy_py import busy_periods as busy_periods_py

try:
    from ._busy import busy_periods as busy_periods_ext
except ImportError:  # extension not built
    busy_periods_ext = None

busy_periods = busy_periods_ext if busy_periods_ext is not None else busy_periods_py
BACKEND = "cython" if busy_periods_ext is not None else "python"

__all__ = ["busy_periods", "busy_periods_py", "busy_periods_ext", "BACKEND"]
