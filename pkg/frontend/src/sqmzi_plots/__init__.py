"""CSV-to-figure rendering for the interferometry simulator's sweep output."""

from .render import FIGURE_KINDS, FigureSpec, RenderError, render

__all__ = ["FIGURE_KINDS", "FigureSpec", "RenderError", "render"]
