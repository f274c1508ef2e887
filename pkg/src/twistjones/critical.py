"""Critical point of the twist-knot potential and the constants built from it."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq
from scipy.special import euler

from .numerics import ConsistencyError, DomainError, NumericsConfig, newton_solve_2d
from .polylog import V8, lobachevsky
from .potential import (
    H_factor,
    RegionSpec,
    V,
    grad_V,
    hess_V,
    region_contains,
)

__all__ = [
    "CriticalData",
    "c_of_p",
    "c_upper",
    "h_direct",
    "h_series",
    "seed_from_series",
    "slice_critical_T1",
    "slice_value",
    "solve_critical",
    "zeta_R_series",
    "zeta_series",
]

PI = math.pi


@dataclass(frozen=True)
class CriticalData:
    p: int
    t0: complex
    s0: complex
    x0: complex
    y0: complex
    zeta: complex
    zeta_R: float
    H: complex
    omega: complex
    omega_H_form: complex
    residual: float
    iterations: int = 0

    @property
    def two_pi_zeta(self):
        return 2 * PI * self.zeta


def seed_from_series(p):
    """Truncated gamma = 1/p expansion of the critical point (through gamma^4)."""
    if p < 1:
        raise DomainError("seed needs p >= 1")
    g = 1.0 / p
    pi3 = PI**3
    t = (
        np.log(1 - 2j) / (2j * PI)
        + 1
        + ((1 + 2j) * PI / 40) * g**2
        + ((3 + 1j) * PI / 80) * g**3
        + ((180 * PI + 19 * pi3) / 9600 - (45 * PI - 4 * pi3) / 4800 * 1j) * g**4
    )
    s = (
        0.5
        + g / 2
        + ((1 - 1j) / 8) * g**2
        - (1j / 16) * g**3
        - (1 / 61 + (3 + PI**2) / 192 * 1j) * g**4
    )
    return complex(t), complex(s)


def _omega_forms(p, x0, y0, hess):
    H = H_factor(p, x0, y0)
    det = hess[0, 0] * hess[1, 1] - hess[0, 1] ** 2
    # principal root of det Hess; sqrt(H) is then defined as sqrt(det)/(2 pi i)
    # so both forms share one branch (this is minus the principal sqrt(H))
    sqrt_det = np.sqrt(det)
    sqrt_H = sqrt_det / (2j * PI)
    one_minus = (1 - x0) ** 1.5
    s2 = (y0 - 1 / y0) / 2j
    om_hess = s2 * x0 / (one_minus * sqrt_det)
    om_H = (y0 - 1 / y0) * x0 / (-4 * PI * one_minus * sqrt_H)
    if abs(det - (2j * PI) ** 2 * H) > 1e-8 * abs(det):
        raise ConsistencyError("Hessian determinant disagrees with H factor")
    return complex(H), complex(om_hess), complex(om_H)


@lru_cache(maxsize=2048)
def solve_critical(p, newton_tol=1e-13, check_region=True):
    """Newton-solve grad V = 0 from the series seed and assemble the constants."""
    if p < 6:
        raise DomainError("critical point solver requires p >= 6")
    # the (4p+2) pi i s term in the gradient sets the attainable residual
    tol = max(newton_tol, 4e-15 * (4 * p + 2) * PI)
    cfg = NumericsConfig(newton_tol=tol, newton_max_iter=60)
    seed = seed_from_series(p)
    count = [0]

    def F(t, s):
        count[0] += 1
        return np.array(grad_V(p, t, s))

    t0, s0 = newton_solve_2d(F, lambda t, s: hess_V(p, t, s), seed, cfg)
    residual = float(np.linalg.norm(grad_V(p, t0, s0)))
    if check_region and not region_contains(RegionSpec("U", p=p, n=0), t0.real, s0.real):
        raise ConsistencyError(f"critical point for p={p} escaped U_0")
    x0 = complex(np.exp(2j * PI * t0))
    y0 = complex(np.exp(2j * PI * s0))
    zeta = V(p, t0, s0)
    H, om, om_H = _omega_forms(p, x0, y0, hess_V(p, t0, s0))
    return CriticalData(
        p=p, t0=t0, s0=s0, x0=x0, y0=y0, zeta=zeta, zeta_R=zeta.real,
        H=H, omega=om, omega_H_form=om_H, residual=residual, iterations=count[0],
    )


def zeta_R_series(p):
    """Series for 2 pi zeta_R(p) in gamma = 1/p through gamma^4."""
    g = 1.0 / p
    pi2 = PI**2
    return V8 - pi2 * g**2 / 4 - pi2 * g**3 / 8 - pi2 * (6 + pi2) / 192 * g**4


def zeta_series(p):
    """Series for the full complex 2 pi zeta(p) through gamma^4."""
    g = 1.0 / p
    pi2 = PI**2
    return (
        V8
        - (p + 23 / 4) * pi2 * 1j
        - pi2 * 1j * g
        - pi2 * (1 + 1j) / 4 * g**2
        - pi2 * g**3 / 8
        - pi2 * (6 + pi2 - 6j) / 192 * g**4
    )


def c_upper(p, zeta_R):
    """Upper band edge (1/pi) sqrt(v8 - 2 pi zeta_R) + 1/2."""
    gap = V8 - 2 * PI * zeta_R
    if gap < 0:
        raise DomainError("2 pi zeta_R exceeds v8")
    return math.sqrt(gap) / PI + 0.5


def slice_critical_T1(c):
    """Critical point in t of V(p, t, c; 0, n) for real c in [1/2, 1)."""
    if not 0.5 <= c < 1:
        raise DomainError("c must lie in [1/2, 1)")
    return complex(1 + np.log(1 - 2j * np.sin(PI * c)) / (2j * PI))


def slice_value(c, p=6, n=0):
    """Re V(p, T1(c), c; 0, n), evaluated directly."""
    from .potential import V_mn

    return float(np.real(V_mn(p, slice_critical_T1(c), c, 0, n)))


def h_direct(c):
    """Lambda(c/2) + Lambda(1/2 - c/2)."""
    return float(lobachevsky(c / 2) + lobachevsky(0.5 - c / 2))


_EULER = np.abs(euler(80))


def h_series(c, terms=40):
    """Power series of :func:`h_direct` about c = 1/2.

    Obtained by integrating h'' = -(pi/2) sec(pi (c - 1/2)) twice, with the
    secant expanded in Euler numbers.
    """
    X = PI * (c - 0.5)
    total = 0.0
    for k in range(terms):
        coef = _EULER[2 * k] / (math.factorial(2 * k) * (2 * k + 1) * (2 * k + 2))
        total += coef * X ** (2 * k + 2)
    return 2 * lobachevsky(0.25) - total / (2 * PI)


def c_of_p(p):
    """The c in (1/2, 1) with Re V(p, T1(c), c) = zeta_R(p)."""
    target = solve_critical(p).zeta_R
    return brentq(lambda c: slice_value(c, p) - target, 0.5, 0.99, xtol=1e-14)
