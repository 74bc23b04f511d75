"""Subgradient projectors of convex functions, with calculus rules, a
feasibility solver and regularity diagnostics."""

from ._core import *  # noqa: F401,F403
from ._core import SubprojError  # noqa: F401
