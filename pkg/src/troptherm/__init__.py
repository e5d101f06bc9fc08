"""Max-plus (tropical) thermodynamic formalism on finite transition systems.

Layers, bottom up: the scalar semiring (tropical_core), densities and
functionals (tropical_measures), max-plus matrix algebra
(maxplus_linalg), weighted transition systems with the Bousch operator
and its adjoint (dynamics), ergodic optimization (ergodic_opt), the
classical Ruelle side (thermo), and zero-temperature diagnostics
(zerotemp). The cli module exposes all of it as batch commands.
"""

from .tropical_core import (
    NEG_INF,
    POS_INF,
    TropValue,
    TropVector,
    residual,
    t_add,
    t_mul,
)
from .tropical_measures import Density, TropicalFunctional
from .maxplus_linalg import CycleMeanResult, TropMatrix
from .dynamics import PathRecord, TransitionSystem

__all__ = [
    "NEG_INF",
    "POS_INF",
    "TropValue",
    "TropVector",
    "residual",
    "t_add",
    "t_mul",
    "Density",
    "TropicalFunctional",
    "CycleMeanResult",
    "TropMatrix",
    "PathRecord",
    "TransitionSystem",
]

__version__ = "0.1.0"
