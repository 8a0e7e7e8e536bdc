"""Batch figure rendering for kickchain CSV artifacts.

This package talks to the simulator only through its documented CSV
files; it never imports the simulator.
"""

from .figures import CHAIN_COLUMNS, FigureSpec, load_chain_csv, \
    load_husimi_csv, render

__all__ = ["CHAIN_COLUMNS", "FigureSpec", "load_chain_csv",
           "load_husimi_csv", "render"]

__version__ = "0.1.0"
