"""Colored Jones polynomials of twist knots at exp(2 pi i / (N + 1/2)) and their asymptotics."""

__version__ = "0.1.0"

from .asympt import (
    AsymptoticModel,
    approximant,
    convergence_experiment,
    fit_kappas,
    ratio,
)
from .critical import CriticalData, solve_critical
from .fourier import FourierCoefficient, hhat, poisson_check
from .geometry import GluingSolution, solve_gluing, vol_cs_from_w
from .jones import JonesValue, KnotSpec, g_sum, jones_exact
from .numerics import NumericsConfig, TwistJonesError, default_config
from .polylog import RootOfUnity, li2, lobachevsky, phi_N
from .potential import FourierIndex, PotentialPoint, RegionSpec, V, V_N_full

__all__ = [
    "AsymptoticModel",
    "CriticalData",
    "FourierCoefficient",
    "FourierIndex",
    "GluingSolution",
    "JonesValue",
    "KnotSpec",
    "NumericsConfig",
    "PotentialPoint",
    "RegionSpec",
    "RootOfUnity",
    "TwistJonesError",
    "V",
    "V_N_full",
    "approximant",
    "convergence_experiment",
    "default_config",
    "fit_kappas",
    "g_sum",
    "hhat",
    "jones_exact",
    "li2",
    "lobachevsky",
    "phi_N",
    "poisson_check",
    "ratio",
    "solve_critical",
    "solve_gluing",
    "vol_cs_from_w",
]
