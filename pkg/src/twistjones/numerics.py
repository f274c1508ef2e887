"""Complex arithmetic helpers, quadrature engines and a damped Newton solver.

Complex scalars are plain Python ``complex`` (or ``numpy.complex128`` arrays).
The extended-precision mode routes through :mod:`mpmath`.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = [
    "BranchError",
    "ConsistencyError",
    "ConvergenceError",
    "DomainError",
    "FittingError",
    "NumericsConfig",
    "PrecisionError",
    "QuadResult",
    "QuadratureError",
    "TwistJonesError",
    "contour_rule",
    "default_config",
    "gauss_legendre",
    "integrate_contour",
    "integrate_rect2d",
    "newton_solve_2d",
    "principal_log",
]


class TwistJonesError(Exception):
    """Base class for every error raised by this package."""


class DomainError(TwistJonesError, ValueError):
    """An argument lies outside the domain of the requested function."""


class BranchError(DomainError):
    """An argument sits on a branch cut."""


class QuadratureError(TwistJonesError):
    """Quadrature failed to reach its tolerance within the budget."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ConvergenceError(TwistJonesError):
    """An iteration did not converge; ``last`` holds the final iterate."""

    def __init__(self, message, last=None, residual=None):
        super().__init__(message)
        self.last = last
        self.residual = residual


class PrecisionError(TwistJonesError, OverflowError):
    """The requested computation does not fit the selected precision mode."""


class ConsistencyError(TwistJonesError):
    """Two independently computed quantities disagree."""


class FittingError(TwistJonesError):
    """A least-squares fit is too ill-conditioned to trust."""


PRECISION_MODES = ("machine-double", "extended")
PRECISION_ENV = "TWISTJONES_PRECISION"


@dataclass(frozen=True)
class NumericsConfig:
    precision_mode: str = "machine-double"
    quad_abs_tol: float = 1e-13
    quad_rel_tol: float = 1e-13
    newton_tol: float = 1e-13
    newton_max_iter: int = 50
    contour_radius: float = 1.0
    extended_dps: int = 40

    def __post_init__(self):
        if self.precision_mode not in PRECISION_MODES:
            raise DomainError(f"unknown precision mode {self.precision_mode!r}")
        for name in ("quad_abs_tol", "quad_rel_tol", "newton_tol", "contour_radius"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if self.newton_max_iter < 1:
            raise DomainError("newton_max_iter must be at least 1")
        if self.extended_dps < 16:
            raise DomainError("extended_dps must be at least 16")

    def tolerances(self):
        return {
            "quad_abs_tol": self.quad_abs_tol,
            "quad_rel_tol": self.quad_rel_tol,
            "newton_tol": self.newton_tol,
        }


def default_config(**overrides):
    """Config honouring the ``TWISTJONES_PRECISION`` environment variable."""
    mode = os.environ.get(PRECISION_ENV, "machine-double")
    overrides.setdefault("precision_mode", mode)
    return NumericsConfig(**overrides)


@dataclass
class QuadResult:
    value: complex
    est_error: float
    evaluations: int = 0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.est_error >= 0:
            raise DomainError("est_error must be non-negative")


def principal_log(z):
    """Logarithm with ``Im`` in ``(-pi, pi]``.

    Signed zeros in the imaginary part are normalised first, so ``-1 - 0j``
    maps to ``+i pi`` like ``-1 + 0j``.
    """
    arr = np.asarray(z, dtype=complex)
    if np.any(arr == 0):
        raise DomainError("log of zero")
    arr = arr + 0j
    arr = arr.real + 1j * (arr.imag + 0.0)
    out = np.log(arr)
    # an argument within rounding of -pi lands on -pi exactly; fold it onto pi
    out = np.where(out.imag == -np.pi, out.real + 1j * np.pi, out)
    if out.ndim == 0:
        return complex(out)
    return out


@lru_cache(maxsize=64)
def gauss_legendre(n):
    """Nodes and weights on ``[-1, 1]``."""
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _panel_rule(edges, order):
    x, w = gauss_legendre(order)
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1, None], edges[1:, None]
    half = 0.5 * (b - a)
    nodes = (a + half * (x + 1.0)).ravel()
    weights = (half * w).ravel()
    return nodes, weights


def _ray_edges(radius, x_max, width_cap, growth=1.5):
    edges = [radius]
    while edges[-1] < x_max:
        step = min((growth - 1.0) * edges[-1], width_cap)
        edges.append(min(edges[-1] + step, x_max))
    return edges


@lru_cache(maxsize=256)
def contour_rule(slow_rate, radius=1.0, order=20, arc_order=48, tail=40.0):
    """Quadrature rule for the keyhole-free path ``(-inf,-r] + arc + [r, inf)``.

    The arc is the upper half circle of radius ``r`` traversed from ``-r`` to
    ``r``. Rays are cut at ``tail / slow_rate`` where ``slow_rate`` is the
    slowest exponential decay rate of the integrands to be handled. Returns
    ``(nodes, weights)`` with complex nodes; ``sum(w * f(x))`` approximates the
    integral.
    """
    if slow_rate <= 0:
        raise DomainError("decay rate must be positive")
    x_max = radius + tail / slow_rate
    ray_nodes, ray_w = _panel_rule(_ray_edges(radius, x_max, 2.0 / slow_rate), order)
    th, wt = gauss_legendre(arc_order)
    theta = 0.5 * np.pi * (th + 1.0)
    z = radius * np.exp(1j * theta)
    # traversed from theta = pi to 0, hence the sign
    arc_w = -0.5 * np.pi * wt * 1j * z
    nodes = np.concatenate([-ray_nodes[::-1], z[::-1], ray_nodes]).astype(complex)
    weights = np.concatenate([ray_w[::-1], arc_w[::-1], ray_w]).astype(complex)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def integrate_contour(f, cfg=None, slow_rate=1.0, max_level=4):
    """Integrate ``f`` along the two rays and the upper half circle.

    ``f`` must accept a complex numpy array. The rule is refined (higher panel
    order, longer tail) until two successive levels agree.
    """
    cfg = cfg or NumericsConfig()
    radius = cfg.contour_radius
    prev = None
    err = math.inf
    evaluations = 0
    for level in range(max_level):
        order = 12 + 8 * level
        tail = 30.0 + 10.0 * level
        nodes, weights = contour_rule(slow_rate, radius, order, 24 + 16 * level, tail)
        vals = np.asarray(f(nodes), dtype=complex)
        evaluations += vals.size
        if not np.all(np.isfinite(vals)):
            raise QuadratureError("integrand not finite on the contour", partial=prev)
        # tail check: the integrand at the ray ends must be negligible
        edge = max(abs(vals[0]), abs(vals[-1]))
        value = complex(np.dot(weights, vals))
        if prev is not None:
            err = abs(value - prev)
            target = max(cfg.quad_abs_tol, cfg.quad_rel_tol * abs(value))
            if err <= target and edge < cfg.quad_abs_tol * 1e-2 + target:
                return QuadResult(value, err, evaluations)
        prev = value
    raise QuadratureError(
        f"contour quadrature did not converge (last change {err:.3e})", partial=prev
    )


def integrate_rect2d(f, box, tol=1e-10, order=10, panels=2, max_panels=512):
    """Tensor Gauss-Legendre quadrature over ``box = (a, b, c, d)``.

    ``f(T, S)`` is called on 2-D arrays. The panel count per axis is doubled
    until two successive estimates agree to ``tol`` (absolute).
    """
    a, b, c, d = map(float, box)
    prev = None
    evaluations = 0
    while panels <= max_panels:
        tn, tw = _panel_rule(np.linspace(a, b, panels + 1), order)
        sn, sw = _panel_rule(np.linspace(c, d, panels + 1), order)
        T, S = np.meshgrid(tn, sn, indexing="ij")
        vals = np.asarray(f(T, S), dtype=complex)
        evaluations += vals.size
        value = complex(tw @ vals @ sw)
        if prev is not None:
            err = abs(value - prev)
            if err <= tol:
                return QuadResult(value, err, evaluations)
        prev = value
        panels *= 2
    raise QuadratureError("rectangle quadrature budget exhausted", partial=prev)


def newton_solve_2d(F, J, x0, cfg=None, max_halvings=20):
    """Damped Newton iteration for a 2x2 complex system.

    A full step is halved (up to ``max_halvings`` times) while it fails to
    reduce the residual norm.
    """
    cfg = cfg or NumericsConfig()
    x = np.array(x0, dtype=complex)
    r = np.asarray(F(*x), dtype=complex)
    res = float(np.linalg.norm(r))
    for _ in range(cfg.newton_max_iter):
        if res <= cfg.newton_tol:
            return complex(x[0]), complex(x[1])
        jac = np.asarray(J(*x), dtype=complex)
        det = jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0]
        scale = np.abs(jac).max()
        if scale == 0 or abs(det) <= 1e-14 * scale**2:
            raise ConvergenceError("singular Jacobian", last=tuple(x), residual=res)
        step = np.linalg.solve(jac, -r)
        lam = 1.0
        for _ in range(max_halvings + 1):
            trial = x + lam * step
            try:
                rt = np.asarray(F(*trial), dtype=complex)
                rt_norm = float(np.linalg.norm(rt))
            except DomainError:
                rt_norm = np.inf
            if rt_norm < res or not np.isfinite(res):
                break
            lam *= 0.5
        # without a decrease the smallest trial step is accepted anyway
        if not np.isfinite(rt_norm):
            raise ConvergenceError("iterate left the domain", last=tuple(x), residual=res)
        x, r, res = trial, rt, rt_norm
    if res <= cfg.newton_tol:
        return complex(x[0]), complex(x[1])
    raise ConvergenceError(
        f"Newton did not converge (residual {res:.3e})", last=tuple(x), residual=res
    )
