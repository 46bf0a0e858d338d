"""Network formation ERGM with covariates and two-stars.

Thin re-export of the compiled extension. Parameters are
theta = (theta_edge, theta_match, beta) wherever a vector is expected.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401

__version__ = "0.1.0"
