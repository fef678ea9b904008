"""Rosettes, affine equidistants, Centre Symmetry Sets and extended wave fronts."""

from .equidistant import CssBranch, EquidistantBranch
from .errors import *  # noqa: F401,F403
from .invariants import WidthFunction
from .quadrature import QuadratureConfig, integrate_periodic, integrate_with_guards, refine_root
from .rosette import Rosette
from .support import SupportFunction, support_function
from .wavefront import FrontBranch, Kind, SingularPoint

__all__ = [
    "CssBranch",
    "EquidistantBranch",
    "FrontBranch",
    "Kind",
    "QuadratureConfig",
    "Rosette",
    "SingularPoint",
    "SupportFunction",
    "WidthFunction",
    "integrate_periodic",
    "integrate_with_guards",
    "refine_root",
    "support_function",
]
