"""Static figure rendering for qst CSV outputs.

The renderers never recompute any physics: they are pure functions of the
CSV files written by the ``qst`` command-line tool.
"""

from .recipes import RECIPES, render
from .schema import SchemaError, load_csv

__all__ = ["RECIPES", "render", "SchemaError", "load_csv"]
__version__ = "0.1.0"
