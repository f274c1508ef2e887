"""Hyperbolic gluing equation of the twist knot complement and its complex volume."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import ConsistencyError, ConvergenceError, DomainError
from .polylog import li2

__all__ = [
    "F_expr",
    "G_expr",
    "GluingSolution",
    "gluing_residual",
    "reduce_mod_pi2",
    "solve_gluing",
    "vol_cs_from_w",
]

PI = math.pi
PI2 = PI * PI


def _log(z):
    return complex(np.log(complex(z) + 0j))


def _log_neg_inv(w):
    # branch fixed by log w + log(-1/w) = -i pi
    return -1j * PI - _log(w)


@dataclass(frozen=True)
class GluingSolution:
    p: int
    w0: complex
    volcs: complex
    volcs_raw: complex
    residual: float

    @property
    def volume(self):
        return self.volcs.real


def gluing_residual(p, w):
    """log(w-1) - 2(2p-1) log(-1/w) - log(-1/w - 1) - (2p-3) i pi."""
    return (
        _log(w - 1)
        - 2 * (2 * p - 1) * _log_neg_inv(w)
        - _log(-1 / w - 1)
        - (2 * p - 3) * PI * 1j
    )


def _gluing_deriv(p, w):
    return 1 / (w - 1) + 2 * (2 * p - 1) / w - 1 / (1 + w) + 1 / w


def solve_gluing(p, seed=None, tol=1e-13, max_iter=100):
    """Solve the gluing equation for the geometric shape parameter ``w0``.

    The default seed is ``-i``, the large-p limit of the geometric root. For
    p >= 6 the root is cross-checked against the critical point of the
    potential, where ``w0 = -1/sqrt(y0)`` with the principal square root.
    """
    if p < 2:
        raise DomainError("gluing solver requires p >= 2")
    w = complex(-1j if seed is None else seed)
    res = abs(gluing_residual(p, w))
    for _ in range(max_iter):
        if res <= tol * (4 * p):
            break
        step = -gluing_residual(p, w) / _gluing_deriv(p, w)
        lam = 1.0
        for _ in range(30):
            trial = w + lam * step
            try:
                r = abs(gluing_residual(p, trial))
            except (ZeroDivisionError, ValueError):
                r = math.inf
            if r < res:
                break
            lam *= 0.5
        w, res = trial, r
    else:
        raise ConvergenceError(f"gluing Newton failed for p={p}", last=w, residual=res)
    if p >= 6:
        from .critical import solve_critical

        ref = -1 / np.sqrt(solve_critical(p).y0)
        if abs(w - ref) > 1e-8:
            raise ConsistencyError(
                f"gluing root {w} does not match the critical-point value {ref}"
            )
    raw = _volcs_raw(p, w)
    return GluingSolution(p, w, reduce_mod_pi2(raw), raw, res)


def _R(U):
    return 0.5 * _log(U) * _log(1 - U) + complex(li2(U))


def _four_R(w):
    return _R(w) + _R(-1 / w) + _R(1 / (1 - w)) + _R(w / (w + 1))


def _volcs_raw(p, w):
    A = _log(w - 1) + 2 * _log_neg_inv(w) - _log(-1 / w - 1)
    corr = 2j * PI + 2j * PI / p + (A + 1j * PI) / p
    return 1j * _four_R(w) - (PI / 2) * corr


def reduce_mod_pi2(z):
    """Representative of ``z`` mod i pi^2 with imaginary part in (-pi^2/2, pi^2/2]."""
    im = z.imag - PI2 * math.floor(z.imag / PI2 + 0.5)
    if im <= -PI2 / 2:
        im += PI2
    return complex(z.real, im)


def vol_cs_from_w(p, w0):
    """vol + i cs of the complement, reduced mod i pi^2."""
    return reduce_mod_pi2(_volcs_raw(p, w0))


def F_expr(w):
    """vol + i cs + 2 pi^2 i written in w alone (p eliminated)."""
    A = _log(w - 1) + 2 * _log_neg_inv(w) - _log(-1 / w - 1)
    lm = _log_neg_inv(w)
    tail = (2j * PI + A + 1j * PI) * (2 * lm + 1j * PI) / (3j * PI + A)
    return 1j * _four_R(w) - PI * (-1j * PI + tail)


def G_expr(w):
    """2 pi (V(p, t0, s0) + (p+7) i pi / 2) written in w alone."""
    x = w - 1 / w + 1
    lw = _log(w)
    term1 = PI * (-2 * _log(x) + 2 * lw + 1.5j * PI)
    term2 = PI * (-lw / (1j * PI) - 0.5) * (_log(1 - x / w**2) - _log(1 - x * w**2))
    dil = PI2 / 6 - 3 * complex(li2(x)) + complex(li2(x / w**2)) + complex(li2(x * w**2))
    return term1 + term2 + dil / 1j
