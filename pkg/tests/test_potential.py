import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistjones.numerics import DomainError
from twistjones.polylog import lobachevsky
from twistjones.potential import (
    HIGH_REGION_THRESHOLD,
    F_bound,
    FourierIndex,
    H_factor,
    PotentialPoint,
    RegionSpec,
    V,
    V_mn,
    V_N_full,
    bump_psi,
    c0,
    f_hessian_XY,
    f_real,
    grad_V,
    hess_V,
    high_region_sweep,
    polygon_inside,
    real_hessian_4x4,
    region_contains,
    region_polygon,
    u_vertex_lines,
    u_vertices,
    v_function,
    v_lattice,
)

T100 = 0.8237997818 - 0.1280592525j
S100 = 0.5050124998 - 0.00001256317546j


def random_points(rng, n):
    # kept 0.03 away from the logarithmic singularities at t +- s in Z
    t = rng.uniform(0.55, 0.9, 4 * n) + 1j * rng.uniform(-0.15, 0.15, 4 * n)
    s = rng.uniform(0.3, 0.7, 4 * n) + 1j * rng.uniform(-0.15, 0.15, 4 * n)
    ok = (np.abs(t - s) > 0.03) & (np.abs(t + s - 1) > 0.03)
    return t[ok][:n], s[ok][:n]


def test_potential_point():
    pt = PotentialPoint(0.25, 0.5)
    assert abs(pt.x - 1j) < 1e-15
    assert abs(pt.y + 1) < 1e-15
    assert FourierIndex() == FourierIndex(0, 0)


def test_V_example_point():
    val = 2 * math.pi * V(100, T100, S100)
    assert abs(val - (3.6636144 - 1043.809608j)) < 1e-5


def test_gradient_vanishes_at_example_point():
    g = grad_V(100, T100, S100)
    # the quoted point carries ten digits; the gradient scales like (4p+2) pi
    assert max(abs(g[0]), abs(g[1])) < 1e-6 * (4 * 100 + 2) * math.pi


def test_real_part_is_v_on_real_points():
    assert abs(V(6, 0.75, 0.5).real - v_function(0.75, 0.5)) < 1e-14
    t = np.linspace(0.55, 0.95, 9)
    s = np.linspace(0.1, 0.5, 9)
    assert np.allclose(V(6, t, s).real, v_function(t, s), atol=1e-13)


def test_V_mn_index_zero_and_shift():
    t, s = 0.7 + 0.05j, 0.45 - 0.02j
    assert V_mn(6, t, s, 0, 0) == V(6, t, s)
    shift = V_mn(6, t, s, 2, -3) - V(6, t, s)
    assert abs(shift - (-2j * np.pi * (2 * t - 3 * s))) < 1e-12
    # real t contributes only an imaginary shift
    assert abs(V_mn(6, 0.7, 0.4, -1, 0).real - V(6, 0.7, 0.4).real) < 1e-14


@settings(max_examples=60, deadline=None)
@given(
    st.floats(0.55, 0.9),
    st.floats(0.25, 0.75),
    st.integers(-3, 3),
    st.integers(-4, 4),
)
def test_V_mn_reflection_symmetry(t, s, m, n):
    lhs = V_mn(6, t, 1 - s, m, n) - V_mn(6, t, s, m, -n - 2) + 2j * np.pi * (n + 1)
    assert abs(lhs) < 1e-11


def test_V_N_full_matches_jones_summand():
    from twistjones.jones import KnotSpec, g_term, jones_terms

    spec = KnotSpec(6, 10)
    logmag, phase = jones_terms(spec)
    k_idx, l_idx = np.tril_indices(10)
    i = int(np.nonzero((k_idx == 5) & (l_idx == 3))[0][0])
    exact = np.exp(logmag[i]) * phase[i]
    assert abs(g_term(spec, 5, 3) - exact) <= 1e-10 * abs(exact)


def test_V_N_full_index_shift():
    t, s = 0.7, 0.45
    d = V_N_full(12, 6, t, s, 1, -2) - V_N_full(12, 6, t, s)
    assert abs(d - (-2j * np.pi * (t - 2 * s))) < 1e-12


def test_V_N_full_domain_error_names_argument():
    with pytest.raises(DomainError, match="shifted argument"):
        V_N_full(5, 6, 0.05, 0.5)


def test_V_N_converges_like_one_over_N():
    t, s = np.meshgrid(np.linspace(0.52, 0.9, 20), np.linspace(0.25, 0.75, 20))
    keep = region_contains(RegionSpec("Dprime0"), t, s)
    t, s = t[keep], s[keep]
    x, y = np.exp(2j * np.pi * t), np.exp(2j * np.pi * s)
    scaled, remainders = [], []
    for N in (20, 40, 80):
        M = 2 * N + 1
        diff = V_N_full(N, 6, t, s) - V(6, t, s)
        scaled.append(np.abs(diff).max() * M)
        first = (np.log(1 - x * y) + np.log(1 - x / y) - 4j * np.pi * t) / M
        remainders.append(np.abs(diff + first).max() * M * M)
    # C/(2N+1) with a fixed C, and a bounded second-order remainder
    assert max(scaled) < 1.1 * min(scaled)
    assert max(remainders) < 1.05 * min(remainders)


def test_gradient_finite_difference_example():
    t, s, h = 0.7 + 0.1j, 0.55 - 0.05j, 1e-6
    gt, gs = grad_V(6, t, s)
    fdt = (V(6, t + h, s) - V(6, t - h, s)) / (2 * h)
    fds = (V(6, t, s + h) - V(6, t, s - h)) / (2 * h)
    assert abs(gt - fdt) < 1e-8 * max(1, abs(gt))
    assert abs(gs - fds) < 1e-8 * max(1, abs(gs))


def _richardson(f, z, h):
    """Extrapolated central difference and a flag for stencils crossing a cut."""
    d = lambda k: (f(z + k) - f(z - k)) / (2 * k)
    coarse, fine = d(h), d(h / 2)
    # a branch cut inside the stencil shows up as a jump of size ~ 1/h
    smooth = np.abs(coarse - fine) < 1.0
    return (4 * fine - coarse) / 3, smooth


def test_gradient_and_hessian_finite_differences_random():
    rng = np.random.default_rng(11)
    t, s = random_points(rng, 100)
    gt, gs = grad_V(6, t, s)
    for g, (fd, smooth) in (
        (gt, _richardson(lambda z: V(6, z, s), t, 1e-3)),
        (gs, _richardson(lambda z: V(6, t, z), s, 1e-3)),
    ):
        assert smooth.mean() > 0.9
        assert np.max(np.abs(g - fd)[smooth] / np.maximum(1, np.abs(g[smooth]))) < 1e-8
    checked = 0
    for tt, ss in zip(t[:30], s[:30]):
        H = hess_V(6, tt, ss)
        d_t, ok_t = _richardson(lambda z, ss=ss: np.array(grad_V(6, z, ss)), tt, 2e-4)
        d_s, ok_s = _richardson(lambda z, tt=tt: np.array(grad_V(6, tt, z)), ss, 2e-4)
        if ok_t.all() and ok_s.all():
            checked += 1
            fd = np.column_stack([d_t, d_s])
            assert np.max(np.abs(H - fd)) < 1e-8 * np.max(np.abs(H))
    assert checked >= 20


def test_gradient_singular_locus():
    with pytest.raises(DomainError):
        grad_V(6, 0.0, 0.3)


def test_ds_mirror_real_part():
    # at s = 1/2 with real t the two log terms are conjugate, so Re dV/ds = 0
    for t in (0.6, 0.8, 0.9):
        assert abs(grad_V(6, t, 0.5)[1].real) < 1e-13


def test_hessian_determinant_identity():
    rng = np.random.default_rng(5)
    t, s = random_points(rng, 100)
    for tt, ss in zip(t, s):
        H = hess_V(6, tt, ss)
        det = H[0, 0] * H[1, 1] - H[0, 1] ** 2
        ref = (2j * np.pi) ** 2 * H_factor(6, np.exp(2j * np.pi * tt), np.exp(2j * np.pi * ss))
        assert abs(det - ref) <= 1e-10 * abs(det)


def test_f_real_origin_and_decay():
    assert f_real(6, 0.7, 0.0, 0.4, 0.0, 0, 1) == pytest.approx(V_mn(6, 0.7, 0.4, 0, 1).real)
    # m = -1, large X > 0 at real c: f -> 0
    vals = [abs(f_real(6, 0.7, X, 0.6, 0.0, -1, 2)) for X in (2.0, 5.0, 10.0)]
    assert vals[0] > vals[1] > vals[2] and vals[2] < 1e-20


def test_f_hessian_closed_form():
    rng = np.random.default_rng(2)
    h = 1e-4
    for _ in range(20):
        t, s = rng.uniform(0.55, 0.9), rng.uniform(0.3, 0.7)
        X, Y = rng.uniform(-0.2, 0.2, 2)
        f = lambda a, b, t=t, s=s: f_real(6, t, a, s, b)
        fxx = (f(X + h, Y) - 2 * f(X, Y) + f(X - h, Y)) / h**2
        fyy = (f(X, Y + h) - 2 * f(X, Y) + f(X, Y - h)) / h**2
        fxy = (f(X + h, Y + h) - f(X + h, Y - h) - f(X - h, Y + h) + f(X - h, Y - h)) / (4 * h * h)
        ref = f_hessian_XY(6, t, X, s, Y)
        fd = np.array([[fxx, fxy], [fxy, fyy]])
        assert np.max(np.abs(fd - ref)) < 1e-6 * max(1, np.max(np.abs(ref)))


def test_real_hessian_determinant_bridge():
    rng = np.random.default_rng(9)
    for _ in range(30):
        t, s = rng.uniform(0.55, 0.9), rng.uniform(0.3, 0.7)
        X, Y = rng.uniform(-0.2, 0.2, 2)
        H4 = real_hessian_4x4(6, t, X, s, Y)
        Hc = hess_V(6, t + 1j * X, s + 1j * Y)
        detc = Hc[0, 0] * Hc[1, 1] - Hc[0, 1] ** 2
        assert abs(np.linalg.det(H4) - abs(detc) ** 2) <= 1e-8 * abs(detc) ** 2
        # the (X, Y) block is the closed-form f-Hessian
        assert np.allclose(H4[np.ix_([1, 3], [1, 3])], f_hessian_XY(6, t, X, s, Y), atol=1e-9)


def test_f_hessian_positive_definite_on_DH():
    t, s = np.meshgrid(np.linspace(0.5, 1, 81)[1:-1], np.linspace(0, 1, 161)[1:-1])
    keep = region_contains(RegionSpec("D_H"), t, s)
    worst = np.inf
    for tt, ss in zip(t[keep], s[keep]):
        worst = min(worst, np.linalg.eigvalsh(f_hessian_XY(6, tt, 0.0, ss, 0.0)).min())
    assert worst > 0


def test_F_bound_cases():
    assert F_bound(6, 0.7, 0.4, 0.0, 0.0) == 0.0
    for Y in (0.5, 3.0):
        assert F_bound(6, 0.7, 0.4, Y, Y, -1, 2) == pytest.approx((6 + 1.5 + 2 - 13 * 0.4) * Y)


@pytest.mark.parametrize("t, s", [(0.75, 0.5), (0.7, 0.4), (0.85, 0.6), (0.6, 0.45)])
def test_F_bound_sandwich(t, s):
    consts = []
    for R in (10, 25, 50):
        X, Y = np.meshgrid(np.linspace(-R, R, 201), np.linspace(-R, R, 201))
        d = f_real(6, t, X, s, Y) - 2 * np.pi * F_bound(6, t, s, X, Y)
        consts.append(np.abs(d).max())
    # the gap does not grow with the radius
    assert consts[-1] <= consts[0] * (1 + 1e-9)


def test_v_function_example():
    assert abs(2 * np.pi * v_function(0.909, 0.5) - 3.4589) < 5e-5


def test_v_lattice_limit():
    # Taylor expansion in h = 1/(2N+1): Lambda' = -log|2 sin pi t|, Lambda'' = -pi cot pi t
    h = 1 / 201
    expected = -h * math.log(2) - 2 * math.pi * h * h
    assert abs(v_lattice(100, 0.75, 0.5) - v_function(0.75, 0.5) - expected) < 2e-6
    t, s = np.meshgrid(np.linspace(0.55, 0.95, 15), np.linspace(0.05, 0.5, 15))
    gaps = [np.abs(v_lattice(N, t, s) - v_function(t, s)).max() for N in (50, 100, 200)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert np.isfinite(v_lattice(10, 0.0, 0.0))


def test_v_reflection():
    t = np.linspace(0.55, 0.95, 9)
    s = np.linspace(0.05, 0.45, 9)
    # v(t, 1 - s) = v(t, -s) = v(t, s) by period and oddness of Lambda
    assert np.allclose(v_function(t, 1 - s), v_function(t, s), atol=1e-13)
    assert np.allclose(
        v_function(t, s), lobachevsky(t + s) + lobachevsky(t - s) - 3 * lobachevsky(t)
    )


# ------------------------------------------------------------------ regions


def test_region_spec_validation():
    with pytest.raises(DomainError):
        RegionSpec("E")
    with pytest.raises(DomainError):
        RegionSpec("U")


def test_region_membership():
    assert region_contains(RegionSpec("Dprime0"), 0.75, 0.5)
    assert not region_contains(RegionSpec("Dprime0"), 0.95, 0.5)
    assert region_contains(RegionSpec("D"), 0.75, 0.5)
    assert not region_contains(RegionSpec("D_H"), 0.75, 0.8)


def test_dprime0_polygon_exact():
    verts = set(region_polygon(RegionSpec("Dprime0")))
    assert (Fraction("0.909"), Fraction("0.5")) not in verts
    for t, s in verts:
        assert Fraction("0.5") <= t <= Fraction("0.909")
        assert Fraction("0.2") <= s <= Fraction("0.8")


def test_c0_values():
    assert abs(float(c0(6)) - 0.5871) < 1e-4
    assert c0(100) == Fraction(7, 800) + Fraction(1, 2)


def test_u_vertices_on_two_lines():
    for p in range(6, 21):
        for n in (-2, 0, 3):
            assert all(len(v) == 2 for v in u_vertex_lines(p, n))
    top, bottom = u_vertices(6)
    assert top == (Fraction(16, 23), Fraction(1, 2) + Fraction(5, 46))
    assert bottom == (Fraction(18, 23), Fraction(1, 2) + Fraction(3, 46))


def test_u_empty_for_large_n():
    t, s = np.meshgrid(np.linspace(0.5, 0.909, 200), np.linspace(0.2, 0.8, 200))
    dp = region_contains(RegionSpec("Dprime0"), t, s)
    for p in (6, 9):
        for n in (p - 1, p + 2, -(p + 1), -(p + 3)):
            U = region_contains(RegionSpec("U", p=p, n=n), t, s)
            assert not np.any(U & dp)


def test_u_inclusions_large_p():
    for p in range(10, 21):
        assert polygon_inside(RegionSpec("U", p=p), RegionSpec("Ddoubleprime0", p=p))
        assert polygon_inside(RegionSpec("Ddoubleprime0", p=p), RegionSpec("D_H"))


def test_high_region_sweep_small_grid():
    n_in, n_high, bad = high_region_sweep(400)
    assert n_in > 0 and n_high > 0 and bad == 0
    assert HIGH_REGION_THRESHOLD == pytest.approx(3.509 / (2 * np.pi))


# ------------------------------------------------------------------ bump


def test_bump_values():
    assert bump_psi(0.75, 0.5) == 1.0
    assert bump_psi(0.95, 0.5) == 0.0
    assert bump_psi(0.75, 0.5, eps=0.03) == 1.0
    mid = bump_psi(0.75, 0.73 - 0.5e-5)
    assert 0 < mid < 1
    with pytest.raises(DomainError):
        bump_psi(0.7, 0.5, eps=0)


@given(st.floats(0.4, 1.0), st.floats(0.0, 1.0), st.sampled_from([1e-5, 1e-3, 0.03]))
def test_bump_symmetry_and_range(t, s, eps):
    a = bump_psi(t, s, eps)
    assert a == bump_psi(t, 1 - s, eps) or abs(a - bump_psi(t, 1 - s, eps)) < 1e-15
    assert 0.0 <= a <= 1.0
    inside = region_contains(RegionSpec("Dprime0"), t, s)
    if not inside:
        assert a == 0.0


def test_bump_equals_one_on_shrunken_region():
    eps = 1e-3
    t, s = np.meshgrid(np.linspace(0.5, 0.909, 120), np.linspace(0.2, 0.8, 120))
    inner = region_contains(RegionSpec("DprimeEps", eps=1.0001 * eps), t, s)
    assert np.all(bump_psi(t[inner], s[inner], eps) == 1.0)
