"""Fourier coefficients of the bump-weighted Jones summand.

The lattice sum of ``h_N(k, l) = psi(t, s) g_N(k, l)`` equals, by Poisson
summation, the sum over (m, n) of

    hhat_N(m, n) = (-1)^(p+m+n) e^(i pi/4) nu^(3/2) / sin(pi/(2N+1))
                   * int psi(t, s) sin(2 pi s) exp(nu V_N(p, t, s; m, n)) dt ds.

Integrals use tensor Gauss-Legendre panels over the bounding box of the
support of psi, with the panel count tied to N and doubled for the error
estimate. The s-nodes are symmetric about 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .jones import KnotSpec, g_terms, jones_exact
from .numerics import DomainError, QuadratureError, _panel_rule
from .polylog import PhiInterpolant, phi_N
from .potential import FourierIndex, V_N_full, bump_psi

__all__ = [
    "DEFAULT_EPS",
    "FourierCoefficient",
    "dominance_ratio",
    "exp_part",
    "fourier_integrand",
    "hhat",
    "lattice_sum",
    "main_term_deviation",
    "poisson_check",
    "spectral_terms",
]

#: bump width used for the Fourier integrals (see the decisions log)
DEFAULT_EPS = 0.03
T_BOX = (0.5, 0.909)
S_BOX = (0.2, 0.8)
_ORDER = 8


@dataclass(frozen=True)
class FourierCoefficient:
    m: int
    n: int
    value: complex
    quad_error: float
    N: int
    p: int

    def __post_init__(self):
        if not (self.quad_error >= 0):
            raise ValueError("quad_error must be non-negative")
        if not np.isfinite(self.value):
            raise ValueError("Fourier coefficient is not finite")


def _prefactor(p, N):
    nu = N + 0.5
    return (-1) ** p * np.exp(1j * np.pi / 4) * nu**1.5 / math.sin(math.pi / (2 * N + 1))


def exp_part(spec, t, s, m=0, n=0):
    """exp(nu V_N(p, t, s; m, n)) evaluated directly through :func:`V_N_full`."""
    nu = spec.N + 0.5
    return np.exp(nu * V_N_full(spec.N, spec.p, t, s, m, n))


def fourier_integrand(spec, t, s, m=0, n=0, eps=DEFAULT_EPS):
    """psi(t, s) sin(2 pi s) exp(nu V_N(p, t, s; m, n)), zero off the support."""
    t, s = np.asarray(t, dtype=float), np.asarray(s, dtype=float)
    psi = np.asarray(bump_psi(t, s, eps))
    out = np.zeros(np.broadcast(t, s).shape, dtype=complex)
    mask = psi > 0
    if np.any(mask):
        tb, sb = np.broadcast_to(t, out.shape)[mask], np.broadcast_to(s, out.shape)[mask]
        out[mask] = psi[mask] * np.sin(2 * np.pi * sb) * exp_part(spec, tb, sb, m, n)
    return complex(out) if out.ndim == 0 else out


@lru_cache(maxsize=8)
def _interpolant(N):
    # on the support of psi both two-variable arguments lie in [0.02, 0.7] + 1/M
    M = 2 * N + 1
    return PhiInterpolant(N, 0.02 + 1.0 / M - 1e-9, 0.7 + 1.0 / M + 1e-9)


@lru_cache(maxsize=6)
def _grid(N, p, eps, panels_t, panels_s):
    """Quadrature grid and (m, n) = (0, 0) integrand, prefactor included."""
    M, nu = 2 * N + 1, N + 0.5
    tn, tw = _panel_rule(np.linspace(*T_BOX, panels_t + 1), _ORDER)
    sn, sw = _panel_rule(np.linspace(*S_BOX, panels_s + 1), _ORDER)
    # mirror the s-nodes so that the s -> 1 - s symmetry is exact on the grid
    half = sn.size // 2
    sn = np.concatenate([sn[:half], 1.0 - sn[:half][::-1]]) if sn.size % 2 == 0 else sn
    T, S = np.meshgrid(tn, sn, indexing="ij")
    psi = bump_psi(T, S, eps)
    mask = psi > 0
    interp = _interpolant(N)
    t_only = phi_N(N, tn) + phi_N(N, tn - 1.0 / M) + phi_N(N, tn + 1.0 / M)
    rows = np.nonzero(mask)[0]
    Tm, Sm = T[mask], S[mask]
    phis = interp(Tm + Sm + 1.0 / M - 1) + interp(Tm - Sm + 1.0 / M) - t_only[rows]
    poly = 1j * np.pi * (
        (2 * p + 1) * Sm**2 - (2 * p + 3) * Sm + (4.0 / M - 2) * Tm
        - (6 * p + 7) / (3.0 * M * M) - 1.0 / 12
    )
    vals = np.zeros(T.shape, dtype=complex)
    vals[mask] = psi[mask] * np.sin(2 * np.pi * Sm) * np.exp(nu * (poly + phis / nu))
    vals *= _prefactor(p, N)
    return tn, sn, tw, sw, vals, float(tw @ np.abs(vals) @ sw)


def _apply(grid, N, m, n):
    tn, sn, tw, sw, vals, magnitude = grid
    nu = N + 0.5
    # the Fourier phase factorises, so each coefficient is a bilinear form
    wt = tw * np.exp(-2j * np.pi * nu * m * tn)
    ws = sw * np.exp(-2j * np.pi * nu * n * sn)
    return (-1) ** (m + n) * complex(wt @ vals @ ws), magnitude


def hhat(spec, idx, eps=DEFAULT_EPS, rel_tol=1e-8, panels=None, max_panels=None):
    """Fourier coefficient hhat_N(m, n) with a panel-doubling error estimate.

    Starts from ``panels`` panels per axis (default ``2N``) and doubles until
    two successive values agree to ``rel_tol`` times the integral of the
    integrand's modulus. The finer value is returned. The error estimate is
    never below a rounding floor of 64 machine epsilons times that modulus
    integral.
    """
    if spec.p < 6:
        raise DomainError("Fourier coefficients are set up for p >= 6")
    if not eps > 0:
        raise DomainError("eps must be positive")
    idx = idx if isinstance(idx, FourierIndex) else FourierIndex(*idx)
    N, p = spec.N, spec.p
    k = int(panels or max(8, 2 * N))
    cap = int(max_panels or max(64, 32 * N))
    prev, _ = _apply(_grid(N, p, eps, k, k), N, idx.m, idx.n)
    while True:
        k *= 2
        if k > cap:
            raise QuadratureError(
                f"hhat({idx.m},{idx.n}) not converged with {k // 2} panels per axis",
                partial=prev,
            )
        cur, mag = _apply(_grid(N, p, eps, k, k), N, idx.m, idx.n)
        err = max(abs(cur - prev), 64 * np.finfo(float).eps * mag)
        if abs(cur - prev) <= rel_tol * mag:
            return FourierCoefficient(idx.m, idx.n, cur, float(err), N, p)
        prev = cur


def lattice_sum(spec, eps=DEFAULT_EPS):
    """Sum of h_N(k, l) = psi g_N(k, l) over the lattice."""
    M = 2 * spec.N + 1
    k, l = np.tril_indices(spec.N)
    t, s = (2 * k + 1) / M, (2 * l + 1) / M
    psi = bump_psi(t, s, eps)
    keep = psi > 0
    if not np.any(keep):
        return 0j
    h = psi[keep] * g_terms(spec, k[keep], l[keep])
    return complex(math.fsum(h.real.tolist()), math.fsum(h.imag.tolist()))


def spectral_terms(spec, window, eps=DEFAULT_EPS, m_range=(-1, 0, 1)):
    """Coefficients hhat(m, n) for m in ``m_range`` and |n| <= ``window``."""
    if int(window) != window or window < 2:
        raise DomainError("window must be an integer >= 2")
    return {
        (m, n): hhat(spec, FourierIndex(m, n), eps)
        for m in m_range
        for n in range(-int(window), int(window) + 1)
    }


def poisson_check(spec, window, eps=DEFAULT_EPS, m_window=1):
    """(lattice side, spectral side) of the Poisson summation identity.

    The spectral side sums hhat(m, n) over |m| <= ``m_window`` and
    |n| <= ``window``.
    """
    ms = tuple(range(-int(m_window), int(m_window) + 1))
    terms = spectral_terms(spec, window, eps, m_range=ms)
    spectral = sum(c.value for c in terms.values())
    return lattice_sum(spec, eps), complex(spectral)


def dominance_ratio(spec, window, eps=DEFAULT_EPS):
    """|sum of hhat other than (0,0), (0,-2)| / |hhat(0,0)|."""
    terms = spectral_terms(spec, window, eps)
    rest = sum(c.value for key, c in terms.items() if key not in ((0, 0), (0, -2)))
    return abs(rest) / abs(terms[(0, 0)].value)


def main_term_deviation(p, N, eps=DEFAULT_EPS):
    """|J_N - 2 hhat(0,0)| / |J_N|."""
    spec = KnotSpec(p, N)
    J = jones_exact(spec, precision="machine-double").value
    h00 = hhat(spec, FourierIndex(0, 0), eps).value
    return abs(J - 2 * h00) / abs(J)
