"""Finite-radius ADM, CMC and Newtonian center-of-mass laboratory.

Builds asymptotically Schwarzschildean metric families and Newtonian
densities, evaluates mass and center-of-mass integrals on coordinate
spheres, and classifies the large-radius behaviour of the results.
"""

__version__ = "0.1.0"

from .errors import ComlabError, ConfigError, ConsistencyError, ContractError, DomainError
from .metric import (
    GraphFunction,
    MetricFamily,
    YorkWeight,
    divergent_graph_slice,
    eval_jet,
    extrinsic_data,
    family_from_json,
    family_to_json,
    graph_slice,
    prescribed_graph_slice,
    prescribed_york,
    scalar_curvature,
    schwarzschild,
    translated_schwarzschild,
    york_perturbed,
)
from .quadrature import SphereGrid, integrate_annulus, integrate_sphere, sphere_grid
from .adm import (
    SweepRecord,
    adm_com_at,
    adm_com_deviation_form,
    adm_mass_at,
    adm_momentum_at,
    com_volume_form,
    sweep,
)
from .newtonian import (
    NewtonianDensity,
    newton_com,
    newton_mass,
    newton_moment,
    quasilocal_com,
    quasilocal_mass,
)
from .cmc import CmcFit, cmc_center_sweep, fit_cmc_sphere, sphere_mean_curvature
from .limits import LimitVerdict, RadiusLadder, classify, extrapolate
