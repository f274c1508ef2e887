"""Dilogarithm, Lobachevsky function and the quantum dilogarithm at level N + 1/2."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import mpmath
import numpy as np

from .numerics import BranchError, DomainError, contour_rule, principal_log

__all__ = [
    "CATALAN",
    "V8",
    "PhiInterpolant",
    "RootOfUnity",
    "bracket",
    "clausen2",
    "li2",
    "lobachevsky",
    "phi_N",
    "phi_N_deriv",
    "q_pochhammer",
]

PI2_6 = math.pi**2 / 6
_LOG2 = math.log(2.0)
CATALAN = 0.915965594177219015054603514932384110774
#: volume of the regular ideal octahedron, four times Catalan's constant
V8 = 4.0 * CATALAN

# exact Bernoulli numbers; scipy's recursion loses digits already at B_4
_B = [float(mpmath.bernoulli(k)) for k in range(61)]
# coefficients B_{2k} / (2k+1)! for the series in u = -log(1-z)
_LI2_COEF = np.array([_B[2 * k] / math.factorial(2 * k + 1) for k in range(1, 26)])
# coefficients |B_{2k}| / (2k (2k+1)!) for the Clausen series
_CL2_COEF = np.array(
    [abs(_B[2 * k]) / (2 * k * math.factorial(2 * k + 1)) for k in range(1, 26)]
)
# Cl2(pi - x) = x log 2 - sum (4^k - 1) |B_2k| x^(2k+1) / (2k (2k+1)!)
_CL2_PI_COEF = np.array(
    [(4**k - 1) * abs(_B[2 * k]) / (2 * k * math.factorial(2 * k + 1)) for k in range(1, 26)]
)


@dataclass(frozen=True)
class RootOfUnity:
    """The root of unity exp(2 pi i / (N + 1/2)) and its bracket conventions."""

    N: int

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise DomainError("N must be a positive integer")

    @property
    def nu(self):
        return self.N + 0.5

    @property
    def order(self):
        """2N + 1; the root has this multiplicative order."""
        return 2 * self.N + 1

    @cached_property
    def xi(self):
        return complex(np.exp(4j * np.pi / self.order))

    def q_power(self, e):
        """q**e for rational ``e`` with q**(1/2) read as exp(2 pi i / (2N+1))."""
        return complex(np.exp(4j * np.pi * e / self.order))


def bracket(root, n):
    """{n} = q^(n/2) - q^(-n/2) = 2i sin(2 pi n / (2N + 1))."""
    return 2j * np.sin(2 * np.pi * np.asarray(n) / root.order)


def _li2_series_u(w):
    # Li2(w) = sum_n B_n u^(n+1)/(n+1)!, u = -log(1-w); needs |w| <= 1, Re w <= 1/2
    u = -np.log(1.0 - w)
    u2 = u * u
    acc = np.zeros_like(u)
    for c in _LI2_COEF[::-1]:
        acc = acc * u2 + c
    return u - 0.25 * u2 + u * u2 * acc


def li2(z):
    """Principal branch of the dilogarithm, cut along the real ray (1, inf).

    Works on scalars or arrays. Points with ``|z| > 1`` are mapped inside the
    unit disc by inversion, points with ``Re z > 1/2`` by reflection, then a
    Bernoulli series in ``-log(1 - z)`` is summed.
    """
    arr = np.asarray(z, dtype=complex)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr).astype(complex)
    if not np.all(np.isfinite(arr)):
        raise DomainError("li2 argument not finite")
    on_cut = (arr.imag == 0) & (arr.real > 1)
    if np.any(on_cut):
        raise BranchError("li2 argument on the branch cut (1, inf)")
    out = np.empty_like(arr)

    one = arr == 1
    out[one] = PI2_6
    rest = ~one
    z = arr[rest]
    res = np.zeros_like(z)

    outer = np.abs(z) > 1
    w = np.where(outer, 1.0 / np.where(outer, z, 1.0), z)
    refl = w.real > 0.5
    base = np.where(refl, 1.0 - w, w)
    val = _li2_series_u(base)
    if np.any(refl):
        wr = w[refl]
        val[refl] = -val[refl] + PI2_6 - np.log(wr) * np.log(1.0 - wr)
    res = val
    if np.any(outer):
        zo = z[outer]
        lz = principal_log(-zo)
        res[outer] = -val[outer] - PI2_6 - 0.5 * lz * lz
    out[rest] = res
    return complex(out[0]) if scalar else out


def clausen2(theta):
    """Clausen function Cl2(theta) = sum sin(n theta) / n^2."""
    th = np.asarray(theta, dtype=float)
    th = th - 2 * np.pi * np.round(th / (2 * np.pi))
    sign = np.where(th < 0, -1.0, 1.0)
    th = np.abs(th)
    near = th <= 0.5 * np.pi
    # series about 0 on [0, pi/2], series about pi on (pi/2, pi]
    x = np.where(near, th, np.pi - th)
    x2 = x * x
    acc0 = np.zeros_like(x)
    acc1 = np.zeros_like(x)
    for c0, c1 in zip(_CL2_COEF[::-1], _CL2_PI_COEF[::-1]):
        acc0 = acc0 * x2 + c0
        acc1 = acc1 * x2 + c1
    with np.errstate(divide="ignore", invalid="ignore"):
        lead = np.where(x == 0, 0.0, x - x * np.log(np.where(x == 0, 1.0, x)))
    at0 = lead + x * x2 * acc0
    atpi = x * _LOG2 - x * x2 * acc1
    out = sign * np.where(near, at0, atpi)
    return float(out) if out.ndim == 0 else out


def lobachevsky(t):
    """Lambda(t) = -int_0^t log|2 sin(pi u)| du, odd with period 1."""
    return clausen2(2 * np.pi * np.asarray(t, dtype=float)) / (2 * np.pi)


def _as_root(N):
    return N if isinstance(N, RootOfUnity) else RootOfUnity(int(N))


@lru_cache(maxsize=64)
def _phi_rule(N):
    nu = N + 0.5
    nodes, weights = contour_rule(1.0 / nu, 1.0, 20, 48, 40.0)
    x = np.asarray(nodes)
    ray = np.abs(x.imag) == 0
    ax = np.abs(x.real)
    # 1/(4 x sinh x sinh(x/nu)) split as exp(base) * amp to avoid overflow
    base = np.where(ray, -ax * (1 + 1 / nu), 0.0).astype(complex)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        amp_ray = 1.0 / (x * np.expm1(-2 * ax) * np.expm1(-2 * ax / nu))
        amp_arc = 1.0 / (4 * x * np.sinh(x) * np.sinh(x / nu))
    amp = np.where(ray, amp_ray, amp_arc)
    return x, weights, base, amp


def _phi_domain(root, t):
    lo, hi = 0.0, 1.0
    bad = (t.real < lo - 1e-14) | (t.real > hi + 1e-14)
    if np.any(bad):
        off = t[bad].ravel()[0]
        raise DomainError(
            f"quantum dilogarithm argument {off} has real part outside [0, 1] (N={root.N})"
        )


def _phi_eval(N, t, deriv, chunk=4096):
    root = _as_root(N)
    arr = np.asarray(t, dtype=complex)
    scalar = arr.ndim == 0
    flat = np.atleast_1d(arr).ravel()
    _phi_domain(root, flat)
    x, w, base, amp = _phi_rule(root.N)
    kernel = w * amp * (2 * x if deriv else 1.0)
    out = np.empty(flat.shape, dtype=complex)
    for i in range(0, flat.size, chunk):
        tc = flat[i : i + chunk, None]
        out[i : i + chunk] = np.exp((2 * tc - 1) * x[None, :] + base[None, :]) @ kernel
    if scalar:
        return complex(out[0])
    return out.reshape(arr.shape)


def phi_N(N, t):
    """Quantum dilogarithm at level N + 1/2.

    Defined by the contour integral of exp((2t-1)x) / (4x sinh x sinh(x/nu))
    over (-inf,-1], the upper unit half circle and [1, inf), with nu = N + 1/2.
    The integral converges for real part of ``t`` in [0, 1].
    """
    return _phi_eval(N, t, deriv=False)


def phi_N_deriv(N, t):
    """Derivative of :func:`phi_N` in ``t``, by differentiating under the integral."""
    return _phi_eval(N, t, deriv=True)


def q_pochhammer(N, n):
    """(q)_n = prod_{i=1}^n (1 - q^i) at q = exp(2 pi i / (N + 1/2))."""
    root = _as_root(N)
    if int(n) != n or n < 0 or n > 2 * root.N:
        raise DomainError(f"Pochhammer index {n} outside [0, 2N]")
    i = np.arange(1, int(n) + 1)
    return complex(np.prod(1.0 - np.exp(4j * np.pi * i / root.order)))


class PhiInterpolant:
    """Chebyshev interpolant of :func:`phi_N` on a real interval ``[a, b]``.

    The degree is doubled until the trailing coefficients fall below ``tol``
    relative to the largest one. Cheap to evaluate on large grids.
    """

    def __init__(self, N, a, b, tol=1e-15, max_degree=1024):
        root = _as_root(N)
        if not 0.0 <= a < b <= 1.0:
            raise DomainError("interpolation interval must lie inside [0, 1]")
        self.N, self.a, self.b = root.N, float(a), float(b)
        deg = 32
        while True:
            k = np.arange(deg + 1)
            nodes = np.cos(np.pi * (k + 0.5) / (deg + 1))
            vals = phi_N(root, self._from_unit(nodes))
            coef = np.polynomial.chebyshev.chebfit(nodes, vals, deg)
            tail = np.abs(coef[-4:]).max()
            if tail <= tol * max(1.0, np.abs(coef).max()) or deg >= max_degree:
                break
            deg *= 2
        self.coef = coef
        self.degree = deg
        self.tail = float(tail)

    def _from_unit(self, u):
        return 0.5 * (self.b - self.a) * (u + 1) + self.a

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any((t < self.a - 1e-12) | (t > self.b + 1e-12)):
            raise DomainError(f"argument outside interpolation interval [{self.a}, {self.b}]")
        u = (2 * t - self.a - self.b) / (self.b - self.a)
        return np.polynomial.chebyshev.chebval(u, self.coef)
