"""Potential functions for twist knots, their derivatives, and the region geometry.

Conventions: ``x = exp(2 pi i t)``, ``y = exp(2 pi i s)``. All functions are
vectorised over numpy arrays of ``t`` and ``s``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .numerics import DomainError, principal_log
from .polylog import RootOfUnity, li2, lobachevsky, phi_N

__all__ = [
    "HIGH_REGION_THRESHOLD",
    "F_bound",
    "FourierIndex",
    "H_factor",
    "PotentialPoint",
    "RegionSpec",
    "V",
    "V_N_full",
    "V_mn",
    "bump_psi",
    "c0",
    "f_hessian_XY",
    "f_real",
    "grad_V",
    "hess_V",
    "high_region_sweep",
    "polygon_inside",
    "real_hessian_4x4",
    "region_contains",
    "region_polygon",
    "u_vertex_lines",
    "u_vertices",
    "v_function",
    "v_lattice",
]

TWO_PI_I = 2j * np.pi
#: threshold on 2 pi v used to carve the high region out of D
HIGH_REGION_THRESHOLD = 3.509 / (2 * np.pi)


@dataclass(frozen=True)
class PotentialPoint:
    t: complex
    s: complex

    @property
    def x(self):
        return complex(np.exp(TWO_PI_I * self.t))

    @property
    def y(self):
        return complex(np.exp(TWO_PI_I * self.s))


@dataclass(frozen=True)
class FourierIndex:
    m: int = 0
    n: int = 0


def _c(a):
    return np.asarray(a, dtype=complex)


def _ret(v):
    return complex(v) if np.ndim(v) == 0 else v


def V_mn(p, t, s, m=0, n=0):
    """Potential V(p, t, s; m, n)."""
    t, s = _c(t), _c(s)
    x = np.exp(TWO_PI_I * t)
    y = np.exp(TWO_PI_I * s)
    poly = 1j * np.pi * ((2 * p + 1) * s * s - (2 * p + 3 + 2 * n) * s - (2 * m + 2) * t)
    dil = li2(x * y) + li2(x / y) - 3 * li2(x) + np.pi**2 / 6
    return _ret(poly + dil / TWO_PI_I)


def V(p, t, s):
    """Potential V(p, t, s) of the twist knot K_p."""
    return V_mn(p, t, s)


def V_N_full(N, p, t, s, m=0, n=0):
    """Finite-level potential V_N(p, t, s; m, n).

    Built from five quantum dilogarithms so that
    ``exp((N + 1/2) V_N)`` reproduces the summand of the exact Jones sum at
    lattice points. Both sign cases of ``t + s - 1`` are handled.
    """
    root = N if isinstance(N, RootOfUnity) else RootOfUnity(int(N))
    M, nu = root.order, root.nu
    t, s = _c(t), _c(s)
    shift = np.where((t + s).real < 1, 0.0, 1.0)
    args = {
        "t+s+1/(2N+1)": t + s + 1.0 / M - shift,
        "t-s+1/(2N+1)": t - s + 1.0 / M,
        "t": t,
        "t-1/(2N+1)": t - 1.0 / M,
        "t+1/(2N+1)": t + 1.0 / M,
    }
    vals = {}
    for name, a in args.items():
        try:
            vals[name] = phi_N(root, a)
        except DomainError as exc:
            raise DomainError(f"V_N: shifted argument {name} out of range: {exc}") from None
    poly = 1j * np.pi * (
        (2 * p + 1) * s * s
        - (2 * p + 3) * s
        + (4.0 / M - 2) * t
        - (6 * p + 7) / (3.0 * M * M)
        - 1.0 / 12
    )
    phis = (
        vals["t+s+1/(2N+1)"]
        + vals["t-s+1/(2N+1)"]
        - vals["t"]
        - vals["t-1/(2N+1)"]
        - vals["t+1/(2N+1)"]
    )
    return _ret(poly + phis / nu - TWO_PI_I * (m * t + n * s))


def _xy(t, s):
    t, s = _c(t), _c(s)
    x = np.exp(TWO_PI_I * t)
    y = np.exp(TWO_PI_I * s)
    for name, z in (("x", x), ("xy", x * y), ("x/y", x / y)):
        if np.any(np.abs(1 - z) < 1e-300):
            raise DomainError(f"singular locus {name} = 1")
    return x, y


def grad_V(p, t, s, m=0, n=0):
    """Closed-form gradient (dV/dt, dV/ds)."""
    x, y = _xy(t, s)
    s = _c(s)
    lxy = principal_log(1 - x * y)
    lxdy = principal_log(1 - x / y)
    dt = -(2 * m + 2) * np.pi * 1j + 3 * principal_log(1 - x) - lxy - lxdy
    ds = (4 * p + 2) * np.pi * 1j * s - (2 * p + 3 + 2 * n) * np.pi * 1j - lxy + lxdy
    return _ret(dt), _ret(ds)


def hess_V(p, t, s):
    """Complex Hessian [[V_tt, V_ts], [V_ts, V_ss]] (independent of m, n)."""
    x, y = _xy(t, s)
    a = x * y / (1 - x * y)
    b = (x / y) / (1 - x / y)
    c = x / (1 - x)
    vtt = TWO_PI_I * (a + b - 3 * c)
    vss = (4 * p + 2) * np.pi * 1j + TWO_PI_I * (a + b)
    vts = TWO_PI_I * (a - b)
    return np.array([[vtt, vts], [vts, vss]])


def H_factor(p, x, y):
    """The factor H(p, x, y) with det Hess V = (2 pi i)^2 H."""
    x, y = _c(x), _c(y)
    ux = 1 / x - 1
    uxy = 1 / (x * y) - 1
    uxdy = y / x - 1
    q = 2 * p + 1
    return _ret(
        -3 * q / ux
        + q / uxy
        + q / uxdy
        - 3 / (ux * uxy)
        - 3 / (ux * uxdy)
        + 4 / (uxy * uxdy)
    )


def f_real(p, t, X, s, Y, m=0, n=0):
    """Real part of V(p, t + iX, s + iY; m, n)."""
    return np.real(V_mn(p, np.add(t, 1j * np.asarray(X)), np.add(s, 1j * np.asarray(Y)), m, n))


def f_hessian_XY(p, t, X, s, Y):
    """Closed-form (X, Y)-Hessian of :func:`f_real`."""
    x, y = _xy(t + 1j * X, s + 1j * Y)
    a = -np.imag(1 / (1 - x))
    b = np.imag(1 / (1 - x * y))
    c = np.imag(1 / (1 - x / y))
    return 2 * np.pi * np.array([[3 * a + b + c, b - c], [b - c, b + c]])


def real_hessian_4x4(p, t, X, s, Y):
    """Hessian of ``f`` in (t, X, s, Y) from the complex Hessian of V.

    With ``V_zw = A + iB`` the real part has d2/dt2 = A, d2/dtdX = -B and
    d2/dX2 = -A, which gives the block structure below.
    """
    hv = hess_V(p, t + 1j * X, s + 1j * Y)
    out = np.empty((4, 4))
    for i in range(2):
        for j in range(2):
            A, B = hv[i, j].real, hv[i, j].imag
            out[2 * i, 2 * j] = A
            out[2 * i, 2 * j + 1] = -B
            out[2 * i + 1, 2 * j] = -B
            out[2 * i + 1, 2 * j + 1] = -A
    return out


def F_bound(p, t, s, X, Y, m=0, n=0):
    """Piecewise-linear model of f / (2 pi) at large |(X, Y)|."""
    X, Y = np.asarray(X, dtype=float), np.asarray(Y, dtype=float)
    u, w = X + Y, X - Y
    val = np.where(u < 0, (t + s - 1.5) * u, 0.0)
    val = val + np.where(w < 0, (t - s - 0.5) * w, 0.0)
    val = val + np.where(X < 0, (1.5 - 3 * t) * X, 0.0)
    val = val + (p + 1.5 + n - (2 * p + 1) * s) * Y + (m + 1) * X
    return float(val) if val.ndim == 0 else val


def v_function(t, s):
    """v(t, s) = Lambda(t+s) + Lambda(t-s) - 3 Lambda(t), the real part of V on R^2."""
    t, s = np.asarray(t, dtype=float), np.asarray(s, dtype=float)
    return lobachevsky(t + s) + lobachevsky(t - s) - 3 * lobachevsky(t)


def v_lattice(N, t, s):
    """Finite-N analogue v_N(t, s) of :func:`v_function` with 1/(2N+1) shifts."""
    h = 1.0 / (2 * int(N) + 1)
    t, s = np.asarray(t, dtype=float), np.asarray(s, dtype=float)
    return (
        lobachevsky(t + s + h)
        + lobachevsky(t - s + h)
        - lobachevsky(t - h)
        - lobachevsky(t)
        - lobachevsky(t + h)
    )


# ---------------------------------------------------------------- regions

_DP0 = {
    "t-s": (Fraction("0.02"), Fraction("0.7")),
    "t+s": (Fraction("1.02"), Fraction("1.7")),
    "s": (Fraction("0.2"), Fraction("0.8")),
    "t": (Fraction("0.5"), Fraction("0.909")),
}
_DIRS = {"t-s": (1, -1), "t+s": (1, 1), "s": (0, 1), "t": (1, 0)}


def c0(p):
    """Half-width parameter of the s-band used to cut D''_0 out of D'_0.

    For p = 6 the band edge is replaced by the critical-value bound
    ``c_upper(6)``; otherwise it is 7/(8p) + 1/2.
    """
    if p == 6:
        from .critical import c_upper, solve_critical

        return c_upper(6, solve_critical(6).zeta_R)
    return Fraction(7, 8 * p) + Fraction(1, 2)


@dataclass(frozen=True)
class RegionSpec:
    """A named planar region; see :meth:`halfplanes` for the inequalities.

    ``name`` is one of ``D``, ``Dprime0``, ``DprimeEps``, ``Ddoubleprime0``,
    ``D_H`` or ``U``.
    """

    name: str
    p: int | None = None
    n: int = 0
    eps: float = 1e-5

    def __post_init__(self):
        known = {"D", "Dprime0", "DprimeEps", "Ddoubleprime0", "D_H", "U"}
        if self.name not in known:
            raise DomainError(f"unknown region {self.name!r}")
        if self.name in {"Ddoubleprime0", "U"} and self.p is None:
            raise DomainError(f"region {self.name} needs p")

    def halfplanes(self):
        """List of ``(a, b, c, strict)`` meaning ``a t + b s < c`` (or ``<=``)."""
        hp = []

        def band(a, b, lo, hi, strict):
            hp.append((-a, -b, -lo, strict))
            hp.append((a, b, hi, strict))

        if self.name == "D":
            band(1, 1, 1, 2, True)
            band(1, -1, 0, 1, True)
            band(1, 0, Fraction(1, 2), 1, True)
        elif self.name == "D_H":
            band(1, 0, Fraction(1, 2), 1, True)
            band(1, 1, 1, Fraction(3, 2), True)
            band(1, -1, 0, Fraction(1, 2), True)
        else:
            shrink = Fraction(self.eps) if self.name == "DprimeEps" else 0
            for key, (lo, hi) in _DP0.items():
                band(*_DIRS[key], lo + shrink, hi - shrink, False)
            if self.name == "Ddoubleprime0":
                c = c0(self.p)
                c = c if isinstance(c, Fraction) else Fraction(c)
                band(0, 1, 1 - c, c, False)
            elif self.name == "U":
                p, n = self.p, self.n
                # (p+n+1-t)/(2p-1) < s < (p+n+t)/(2p-1)
                hp.append((-1, -(2 * p - 1), -(p + n + 1), True))
                hp.append((-1, 2 * p - 1, p + n, True))
                # (p+n+t)/(2p) < s < (p+2+n-t)/(2p)
                hp.append((1, -2 * p, -(p + n), True))
                hp.append((1, 2 * p, p + 2 + n, True))
        return hp


def region_contains(r, t, s):
    """Membership test for ``RegionSpec`` ``r`` (vectorised over real t, s)."""
    t = np.real(np.asarray(t, dtype=complex))
    s = np.real(np.asarray(s, dtype=complex))
    ok = np.ones(np.broadcast(t, s).shape, dtype=bool)
    for a, b, c, strict in r.halfplanes():
        lhs = float(a) * t + float(b) * s
        ok &= (lhs < float(c)) if strict else (lhs <= float(c))
    return bool(ok) if ok.ndim == 0 else ok


def _clip(poly, a, b, c):
    out = []
    n = len(poly)
    for i in range(n):
        P, Q = poly[i], poly[(i + 1) % n]
        fp = a * P[0] + b * P[1] - c
        fq = a * Q[0] + b * Q[1] - c
        if fp <= 0:
            out.append(P)
        if (fp < 0 < fq) or (fq < 0 < fp):
            lam = fp / (fp - fq)
            out.append((P[0] + lam * (Q[0] - P[0]), P[1] + lam * (Q[1] - P[1])))
    return out


def region_polygon(r):
    """Vertices of the closure of ``r`` in exact rational arithmetic.

    Returns an empty list when the region has empty interior.
    """
    big = [(Fraction(-2), Fraction(-2)), (Fraction(3), Fraction(-2)),
           (Fraction(3), Fraction(3)), (Fraction(-2), Fraction(3))]
    poly = big
    for a, b, c, _ in r.halfplanes():
        poly = _clip(poly, Fraction(a), Fraction(b), Fraction(c))
        if len(poly) < 3:
            return []
    # drop duplicate vertices produced by clipping through a vertex
    uniq = []
    for v in poly:
        if not uniq or v != uniq[-1]:
            uniq.append(v)
    if len(uniq) > 1 and uniq[0] == uniq[-1]:
        uniq.pop()
    return uniq if len(uniq) >= 3 else []


def u_vertices(p, n=0):
    """Top and bottom vertices of the quadrilateral bounding U_n."""
    top = (Fraction(3 * p - 2 - n, 4 * p - 1), Fraction(1, 2) + Fraction(5 + 4 * n, 2 * (4 * p - 1)))
    bottom = (Fraction(3 * p + n, 4 * p - 1), Fraction(1, 2) + Fraction(3 + 4 * n, 2 * (4 * p - 1)))
    return top, bottom


# ---------------------------------------------------------------- bump

def _smoothstep(x):
    x = np.clip(x, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)
        b = np.where(x < 1, np.exp(-1.0 / np.where(x < 1, 1.0 - x, 1.0)), 0.0)
    return a / (a + b)


def bump_psi(t, s, eps=1e-5):
    """Smooth cutoff: 1 on D'_eps, 0 off D'_0, symmetric under s -> 1 - s.

    Product of exp(-1/x) smoothsteps across each pair of parallel edges. The
    t+s edges are written in the variable t+s-1 so that they are the mirror
    images of the t-s edges.
    """
    if not eps > 0:
        raise DomainError("eps must be positive")
    t, s = np.asarray(t, dtype=float), np.asarray(s, dtype=float)

    def window(u, lo, hi):
        return _smoothstep((u - lo) / eps) * _smoothstep((hi - u) / eps)

    out = (
        window(t - s, 0.02, 0.7)
        * window(t + s - 1, 0.02, 0.7)
        * window(s, 0.2, 0.8)
        * window(t, 0.5, 0.909)
    )
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------- certificates

def polygon_inside(inner, outer):
    """True when the closure of region ``inner`` lies in the closure of ``outer``.

    Both regions are convex, so checking the vertices of ``inner`` against
    the half-planes of ``outer`` in exact arithmetic is enough.
    """
    verts = region_polygon(inner)
    for a, b, c, _ in outer.halfplanes():
        a, b, c = Fraction(a), Fraction(b), Fraction(c)
        if any(a * t + b * s > c for t, s in verts):
            return False
    return True


def u_vertex_lines(p, n=0):
    """For the top and bottom vertex of U_n, the boundary lines they lie on.

    Returns two lists of half-plane indices (into the four U-specific
    half-planes) on which the vertex satisfies the equation exactly.
    """
    lines = RegionSpec("U", p=p, n=n).halfplanes()[-4:]
    out = []
    for t, s in u_vertices(p, n):
        out.append([i for i, (a, b, c, _) in enumerate(lines) if a * t + b * s == c])
    return out


def high_region_sweep(grid=2000, threshold=HIGH_REGION_THRESHOLD, chunk=250):
    """Grid check that points of D with v(t, s) > ``threshold`` lie in D'_0.

    Cell midpoints of a ``grid`` x ``grid`` mesh of [1/2, 1] x [0, 1] are
    used. Returns ``(points_in_D, points_above_threshold, violations)``.
    """
    D, Dp = RegionSpec("D"), RegionSpec("Dprime0")
    tt = 0.5 + (np.arange(grid) + 0.5) * (0.5 / grid)
    ss = (np.arange(grid) + 0.5) / grid
    n_in = n_high = n_bad = 0
    for i in range(0, grid, chunk):
        T, S = np.meshgrid(tt[i : i + chunk], ss, indexing="ij")
        inD = region_contains(D, T, S)
        high = inD & (v_function(T, S) > threshold)
        n_in += int(inD.sum())
        n_high += int(high.sum())
        n_bad += int((high & ~region_contains(Dp, T, S)).sum())
    return n_in, n_high, n_bad
