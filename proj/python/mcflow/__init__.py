"""Phase-field and level-set mean curvature flow solvers (C++ core)."""

from ._mcflow import *  # noqa: F401,F403
from ._mcflow import __version__  # noqa: F401
