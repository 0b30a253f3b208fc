"""Plot layer for the wurmac experiment CSVs (public CSV contract only)."""

from .render import EXHIBITS, FigureRecipe, RenderError, recipe_for, render

__all__ = ["EXHIBITS", "FigureRecipe", "RenderError", "recipe_for", "render"]

__version__ = "0.1.0"
