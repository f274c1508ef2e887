"""Leading-order asymptotics of J_N(K_p) and fitted higher-order corrections.

The approximant is

    A_N = (-1)^(p+1) 4 pi e^(i pi/4) nu^(1/2) / sin(pi/(2N+1)) * omega(p)
          * exp(nu zeta(p)) * (1 + sum_i kappa_i u^i),   u = 2 pi i / nu,

with nu = N + 1/2. Values are carried as (log modulus, argument) pairs so
that large N never overflows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .critical import solve_critical
from .jones import KnotSpec, jones_exact
from .numerics import DomainError, FittingError

__all__ = [
    "AsymptoticModel",
    "LogComplex",
    "approximant",
    "convergence_experiment",
    "exact_log",
    "fit_kappas",
    "ratio",
]

#: above this N the exact sum is evaluated in extended precision
EXTENDED_ABOVE = 100


@dataclass(frozen=True)
class LogComplex:
    """A complex number stored as log modulus and argument (unreduced)."""

    log_abs: float
    arg: float

    def __truediv__(self, other):
        return LogComplex(self.log_abs - other.log_abs, self.arg - other.arg)

    def to_complex(self):
        return complex(math.exp(self.log_abs) * complex(math.cos(self.arg), math.sin(self.arg)))


def exact_log(p, N):
    """Exact J_N as a :class:`LogComplex`."""
    mode = "extended" if N > EXTENDED_ABOVE else "machine-double"
    J = jones_exact(KnotSpec(p, N), precision=mode)
    return LogComplex(J.log_abs, J.arg)


def _leading_log(crit, N):
    p = crit.p
    nu = N + 0.5
    log_abs = (
        math.log(4 * math.pi)
        + 0.5 * math.log(nu)
        - math.log(math.sin(math.pi / (2 * N + 1)))
        + math.log(abs(crit.omega))
        + nu * crit.zeta.real
    )
    arg = math.pi * (p + 1) + math.pi / 4 + math.atan2(crit.omega.imag, crit.omega.real)
    arg += nu * crit.zeta.imag
    return LogComplex(log_abs, arg)


def _series(kappas, N):
    u = 2j * math.pi / (N + 0.5)
    return 1 + sum(k * u ** (i + 1) for i, k in enumerate(kappas))


class AsymptoticModel(BaseEstimator):
    """Estimator for the large-N expansion of J_N(K_p).

    ``fit`` takes sample colours ``N`` (and optionally exact values ``y``)
    and fits ``degree`` correction coefficients in ``u = 2 pi i/(N+1/2)``.
    ``predict`` returns the approximant, as complex numbers.

    Parameters
    ----------
    p : int
        Twist parameter, at least 6.
    degree : int
        Number of fitted corrections kappa_1..kappa_degree.
    max_condition : float
        Largest tolerated condition number of the design matrix.
    """

    def __init__(self, p=6, degree=1, max_condition=1e12):
        self.p = p
        self.degree = degree
        self.max_condition = max_condition

    def _check_params(self):
        if int(self.p) != self.p or self.p < 6:
            raise DomainError("asymptotic model requires integer p >= 6")
        if int(self.degree) != self.degree or self.degree < 0:
            raise DomainError("degree must be a non-negative integer")

    @property
    def crit_(self):
        return solve_critical(int(self.p))

    def fit(self, N, y=None):
        """Fit the correction coefficients from exact values at colours ``N``.

        ``y`` may hold precomputed exact ratios ``J_N / A_N`` (kappa-free);
        otherwise they are computed.
        """
        self._check_params()
        N = np.asarray(N, dtype=int).ravel()
        if len(set(N.tolist())) != N.size:
            raise DomainError("sample colours must be distinct")
        if N.size < self.degree + 2:
            raise DomainError("need at least degree + 2 samples")
        if np.any(N < 1):
            raise DomainError("colours must be positive")
        if y is None:
            y = np.array([ratio(self.p, int(n)) for n in N])
        y = np.asarray(y, dtype=complex)
        if self.degree == 0:
            kappas = np.zeros(0, dtype=complex)
        else:
            u = 2j * np.pi / (N + 0.5)
            A = np.stack([u ** (i + 1) for i in range(self.degree)], axis=1)
            cond = np.linalg.cond(A)
            if cond > self.max_condition:
                raise FittingError(
                    f"design matrix condition {cond:.2e}; use fewer terms or a wider N spread"
                )
            kappas, *_ = np.linalg.lstsq(A, y - 1, rcond=None)
        self.kappas_ = kappas
        self.N_fit_ = N
        self.fit_residual_ = float(np.max(np.abs(np.array([_series(kappas, n) for n in N]) - y)))
        return self

    def _check_fitted(self):
        if not hasattr(self, "kappas_"):
            raise NotFittedError("AsymptoticModel is not fitted yet; call fit first")

    def predict_log(self, N):
        """Approximant at each colour as :class:`LogComplex`."""
        self._check_fitted()
        out = []
        for n in np.atleast_1d(np.asarray(N, dtype=int)):
            base = _leading_log(self.crit_, int(n))
            corr = _series(self.kappas_, int(n))
            out.append(LogComplex(base.log_abs + math.log(abs(corr)),
                                  base.arg + math.atan2(corr.imag, corr.real)))
        return out

    def predict(self, N):
        """Approximant values (complex); may overflow for very large N."""
        return np.array([v.to_complex() for v in self.predict_log(N)])

    def residual(self, N):
        """|J_N / A_N - 1| using the fitted corrections."""
        out = []
        for n, a in zip(np.atleast_1d(N), self.predict_log(N)):
            out.append(abs((exact_log(self.p, int(n)) / a).to_complex() - 1))
        return np.array(out)


def approximant(model, N):
    """Approximant A_N for ``model`` (kappa terms included if fitted)."""
    if not hasattr(model, "kappas_"):
        model = AsymptoticModel(model.p, degree=0).fit([1, 2], y=[1, 1])
    return complex(model.predict([N])[0])


def ratio(p, N):
    """r_N = J_N / A_N with the kappa-free approximant."""
    lead = _leading_log(solve_critical(p), N)
    return (exact_log(p, N) / lead).to_complex()


def fit_kappas(p, N_samples, d):
    """Fit kappa_1..kappa_d from exact ratios at ``N_samples``."""
    return AsymptoticModel(p=p, degree=d).fit(N_samples)


def convergence_experiment(p, N_list):
    """Rows ``(N, (2 pi/nu) log|J_N|, 2 pi zeta_R(p), gap)``."""
    target = 2 * math.pi * solve_critical(p).zeta_R
    rows = []
    for N in N_list:
        scaled = 2 * math.pi * exact_log(p, N).log_abs / (N + 0.5)
        rows.append((int(N), scaled, target, scaled - target))
    return rows
