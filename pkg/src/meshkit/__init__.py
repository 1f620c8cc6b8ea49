"""meshkit: doubly-periodic adaptive mesh redistribution.

Equidistributes a scalar density on the unit torus by solving the
Monge-Ampere equation -- in closed form for separable shock-train
densities, by parabolic relaxation in general -- and quantifies the
resulting mesh anisotropy through Jacobian and metric-tensor analysis.
"""

from .density import LevelSet, ProductTrains, ShockTrain, SingleTrain, \
    Uniform, density_from_json, theta_2d, theta_separable
from .exact import exact_jacobian, exact_map, solve_separable
from .grid import ComputationalGrid, PeriodicScalarField
from .metric import eig_sym2, ellipse_from_jacobian, metric_from_jacobian, \
    qa, qs
from .pma import PmaParams, initial_state, mesh_from_potential, pma_solve
from .presets import get_preset

__version__ = "0.1.0"

__all__ = [
    "ComputationalGrid", "PeriodicScalarField",
    "ShockTrain", "Uniform", "SingleTrain", "ProductTrains", "LevelSet",
    "density_from_json", "theta_separable", "theta_2d",
    "solve_separable", "exact_map", "exact_jacobian",
    "PmaParams", "initial_state", "mesh_from_potential", "pma_solve",
    "eig_sym2", "metric_from_jacobian", "qs", "qa", "ellipse_from_jacobian",
    "get_preset",
]
