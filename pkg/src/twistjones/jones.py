"""Normalized colored Jones polynomial of twist knots at exp(2 pi i / (N + 1/2)).

Two routes are provided. :func:`jones_exact` sums the cyclotomic double sum
with bracket factorials, keeping magnitudes in log space and phases exact.
:func:`g_sum` sums the same terms rewritten through the finite-level
potential, which is how the asymptotic analysis sees them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from .numerics import DomainError, PrecisionError, default_config
from .polylog import RootOfUnity
from .potential import V_N_full, v_lattice

__all__ = [
    "JonesValue",
    "KnotSpec",
    "delta_region",
    "g_sum",
    "g_term",
    "g_terms",
    "jones_exact",
    "jones_terms",
    "v_lattice_bound",
]

_LOG_MAX = 700.0


@dataclass(frozen=True)
class KnotSpec:
    """Twist knot K_p (2p crossings in the twist region) and colour index N."""

    p: int
    N: int

    def __post_init__(self):
        if int(self.p) != self.p or self.p == 0:
            raise DomainError("p must be a nonzero integer")
        if int(self.N) != self.N or self.N < 1:
            raise DomainError("N must be a positive integer")

    @property
    def root(self):
        return RootOfUnity(self.N)


@dataclass(frozen=True)
class JonesValue:
    value: complex
    log_abs: float
    term_count: int
    precision: str = "machine-double"
    arg: float = 0.0


def _sine_table(N):
    """Real factors S_j = 2 sin(2 pi j / (2N+1)), j = 0..2N, as log|S| and sign."""
    M = 2 * N + 1
    j = np.arange(2 * N + 1)
    S = 2 * np.sin(2 * np.pi * j / M)
    with np.errstate(divide="ignore"):
        logS = np.log(np.abs(S))
    sign = np.sign(S)
    return logS, sign


def jones_terms(spec):
    """Summands of the double sum in (k, l) order, as (log magnitude, unit phase).

    The (k, l) term equals i^k (-1)^l exp(i pi P / (2N+1)) times a real
    product of sines, where P = k(k+3) + 4 p l(l+1) is reduced mod 2(2N+1).
    """
    p, N = spec.p, spec.N
    logS, sign = _sine_table(N)
    k, l = np.tril_indices(N)
    M = 2 * N + 1
    P = (k * (k + 3) + 4 * p * l * (l + 1)) % (2 * M)
    C = np.concatenate([[0.0], np.cumsum(logS[1:])])
    Csign = np.concatenate([[1.0], np.cumprod(sign[1:])])
    i_idx = np.arange(1, N)
    pair = logS[N + i_idx] + logS[N - i_idx]
    pair_sign = sign[N + i_idx] * sign[N - i_idx]
    D = np.concatenate([[0.0], np.cumsum(pair)])
    Dsign = np.concatenate([[1.0], np.cumprod(pair_sign)])
    logmag = C[k] - C[k + l + 1] - C[k - l] + logS[2 * l + 1] + D[k]
    sgn = Csign[k] * Csign[k + l + 1] * Csign[k - l] * sign[2 * l + 1] * Dsign[k]
    phase = np.exp(1j * np.pi * P / M) * (1j ** (k % 4)) * np.where(l % 2, -1.0, 1.0)
    return logmag, sgn * phase


def _jones_double(spec):
    logmag, ph = jones_terms(spec)
    top = float(logmag.max())
    w = np.exp(logmag - top) * ph
    # deterministic order: k ascending, then l ascending
    re = math.fsum(w.real.tolist())
    im = math.fsum(w.imag.tolist())
    s = complex(re, im)
    if s == 0:
        return JonesValue(0j, -math.inf, len(logmag))
    log_abs = top + math.log(abs(s))
    if log_abs > _LOG_MAX:
        raise PrecisionError(
            f"|J_N| = exp({log_abs:.1f}) overflows machine doubles; use extended precision"
        )
    return JonesValue(s * math.exp(top), log_abs, len(logmag), "machine-double", math.atan2(s.imag, s.real))


def _jones_extended(spec, dps):
    p, N = spec.p, spec.N
    M = 2 * N + 1
    with mp.workdps(dps):
        S = [mp.mpf(0)] + [2 * mp.sinpi(mp.mpf(2 * j) / M) for j in range(1, 2 * N + 1)]
        fact = [mp.mpf(1)]
        for j in range(1, 2 * N + 1):
            fact.append(fact[-1] * S[j])
        pair = [mp.mpf(1)]
        for i in range(1, N):
            pair.append(pair[-1] * S[N + i] * S[N - i])
        phase = [mp.expjpi(mp.mpf(a) / M) for a in range(2 * M)]
        ik = [mp.mpc(1), mp.mpc(0, 1), mp.mpc(-1), mp.mpc(0, -1)]
        total = mp.mpc(0)
        for k in range(N):
            row = mp.mpc(0)
            base = fact[k] * pair[k]
            for l in range(k + 1):
                mag = base * S[2 * l + 1] / (fact[k + l + 1] * fact[k - l])
                P = (k * (k + 3) + 4 * p * l * (l + 1)) % (2 * M)
                term = mag * phase[P]
                row += -term if l % 2 else term
            total += ik[k % 4] * row
        log_abs = float(mp.log(abs(total)))
        arg = float(mp.arg(total))
        value = complex(total) if log_abs < _LOG_MAX else complex(math.nan, math.nan)
    return JonesValue(value, log_abs, N * (N + 1) // 2, "extended", arg)


def jones_exact(spec, precision=None, dps=None):
    """J_N(K_p; exp(2 pi i/(N+1/2))) from the exact double sum.

    ``precision`` is ``"machine-double"`` or ``"extended"``; the default comes
    from the environment (see :func:`twistjones.numerics.default_config`).
    """
    cfg = default_config()
    mode = precision or cfg.precision_mode
    if mode == "extended":
        return _jones_extended(spec, dps or cfg.extended_dps)
    if mode != "machine-double":
        raise DomainError(f"unknown precision mode {mode!r}")
    return _jones_double(spec)


def delta_region(t, s):
    """Multiplicity factor: 2 when 0 < t+s <= 1, 1 when 1 < t+s < 2.

    The diagonal t = s is allowed since lattice points with k = l lie on it.
    """
    if not (0 < t < 1 and 0 <= t - s < 1):
        raise DomainError(f"({t}, {s}) outside 0 < t < 1, 0 <= t - s < 1")
    if 0 < t + s <= 1:
        return 2
    if 1 < t + s < 2:
        return 1
    raise DomainError(f"t + s = {t + s} outside (0, 2)")


def _lattice(spec):
    k, l = np.tril_indices(spec.N)
    M = 2 * spec.N + 1
    return k, l, (2 * k + 1) / M, (2 * l + 1) / M


def g_terms(spec, k=None, l=None):
    """Potential-form summands at lattice points (all of them by default)."""
    p, N = spec.p, spec.N
    M = 2 * N + 1
    nu = N + 0.5
    if k is None:
        k, l, t, s = _lattice(spec)
    else:
        k, l = np.asarray(k), np.asarray(l)
        if np.any((l < 0) | (l > k) | (k > N - 1)):
            raise DomainError("lattice index outside 0 <= l <= k <= N-1")
        t, s = (2 * k + 1) / M, (2 * l + 1) / M
    # (2k+1) + (2l+1) = 2N+1 is impossible by parity, so t + s != 1
    assert np.all(2 * k + 2 * l + 2 != M)
    delta = np.where(t + s < 1, 2.0, 1.0)
    pref = (-1) ** p * np.exp(1j * np.pi / 4) / (math.sqrt(nu) * math.sin(math.pi / M))
    VN = V_N_full(N, p, t, s)
    return pref * np.sin(2 * np.pi * (2 * l + 1) / M) * delta * np.exp(nu * VN)


def g_term(spec, k, l):
    """Single potential-form summand g_N(k, l)."""
    return complex(np.asarray(g_terms(spec, np.array([k]), np.array([l])))[0])


def g_sum(spec):
    """Sum of all potential-form summands; equals :func:`jones_exact`."""
    g = g_terms(spec)
    return complex(math.fsum(g.real.tolist()), math.fsum(g.imag.tolist()))


def v_lattice_bound(N, t, s):
    """v_N(t, s), the exponential growth rate of |g_N| at a lattice point."""
    return v_lattice(N, t, s)
