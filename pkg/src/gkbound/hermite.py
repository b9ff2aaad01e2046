"""Orthonormal probabilist Hermite polynomials and Fourier-Hermite
coefficients of the catalog functions.

H_n here always carries the 1/sqrt(n!) factor, so that the H_n are
orthonormal for the standard Gaussian measure.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Sequence

import numpy as np
from numpy.polynomial.hermite_e import hermegauss

from .errors import DimensionMismatch, DomainError
from .specialfn import double_factorial, std_normal_cdf, std_normal_pdf

__all__ = [
    "hermite_eval",
    "hermite_zero",
    "fh_sign",
    "fh_indicator",
    "fh_phi",
    "fh_kappa",
    "complex_hermite",
    "gauss_hermite",
]


def hermite_eval(n: int, x):
    """H_n(x), scalar or array, by the normalized three-term recurrence."""
    if n < 0:
        raise DomainError("Hermite degree must be >= 0")
    scalar = np.isscalar(x)
    x = np.asarray(x, dtype=float)
    h_prev, h = np.ones_like(x), x.copy()
    if n == 0:
        h = h_prev
    else:
        for j in range(1, n):
            h_prev, h = h, (x * h - math.sqrt(j) * h_prev) / math.sqrt(j + 1)
    return float(h) if scalar else h


def hermite_zero(n: int) -> float:
    """H_n(0): zero for odd n, (-1)^l sqrt((2l-1)!!/(2l)!!) for n = 2l."""
    if n < 0:
        raise DomainError("Hermite degree must be >= 0")
    if n % 2:
        return 0.0
    l = n // 2
    return (-1) ** l * math.sqrt(double_factorial(2 * l - 1) / double_factorial(2 * l))


def fh_sign(n: int) -> float:
    """<sign, H_n> under the standard Gaussian."""
    if n < 0:
        raise DomainError("index must be >= 0")
    if n % 2 == 0:
        return 0.0
    l = (n - 1) // 2
    # (2l-1)!!/sqrt((2l+1)!) = sqrt(C(2l,l)/(4^l (2l+1)))
    return (-1) ** l * math.sqrt(2.0 / math.pi) * math.sqrt(
        math.comb(2 * l, l) / (4.0**l * (2 * l + 1))
    )


def _edge_factor(m: int, t: float, side: str) -> float:
    if m == 0:
        return 1.0 - std_normal_cdf(t) if side == "upper" else std_normal_cdf(t)
    return std_normal_pdf(t) * hermite_eval(m - 1, t) / math.sqrt(m)


def fh_indicator(bounds: Sequence[float], m: Sequence[int], side: str = "upper") -> float:
    """<1_I, H_m> for an orthant I.

    ``side="upper"`` means I = prod [a_i, inf); ``side="lower"`` means
    I = prod (-inf, b_i].  The lower case picks up (-1)^{#nonzero m_i}.
    """
    bounds, m = list(bounds), list(m)
    if len(bounds) != len(m):
        raise DimensionMismatch(f"{len(bounds)} thresholds for a {len(m)}-index")
    if side not in ("upper", "lower"):
        raise DomainError("side must be 'upper' or 'lower'")
    if any(mi < 0 for mi in m):
        raise DomainError("multi-index entries must be >= 0")
    out = 1.0
    for t, mi in zip(bounds, m):
        out *= _edge_factor(mi, float(t), side)
    if side == "lower" and sum(1 for mi in m if mi) % 2:
        out = -out
    return out


def fh_phi(n: int) -> float:
    """<Phi, H_n>: 1/2 at n = 0, zero for other even n."""
    if n < 0:
        raise DomainError("index must be >= 0")
    if n == 0:
        return 0.5
    if n % 2 == 0:
        return 0.0
    l = (n - 1) // 2
    return (-1) ** l * math.sqrt(1.0 / (2.0 * math.pi)) * math.sqrt(
        math.comb(2 * l, l) / (4.0**l * (2 * l + 1))
    ) * math.sqrt(0.5 ** (2 * l + 1))


def fh_kappa(n: int) -> float:
    """<kappa, H_n> for kappa = sqrt(3)(2 Phi - 1)."""
    if n == 0 or n % 2 == 0:
        return 0.0
    return 2.0 * math.sqrt(3.0) * fh_phi(n)


def complex_hermite(m: int, n: int, z, w):
    """H_{m,n}(z, w); pass w = conj(z) for the usual complex Hermite polynomial."""
    if m < 0 or n < 0:
        raise DomainError("indices must be >= 0")
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    total = np.zeros(np.broadcast(z, w).shape, dtype=complex)
    for j in range(min(m, n) + 1):
        coef = (-1) ** j * math.factorial(j) * math.comb(m, j) * math.comb(n, j)
        total = total + coef * z ** (m - j) * w ** (n - j)
    out = total / math.sqrt(math.factorial(m) * math.factorial(n))
    return complex(out) if out.ndim == 0 else out


@lru_cache(maxsize=None)
def _gh(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = hermegauss(order)
    w = w / w.sum()
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_hermite(order: int = 64) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for E[f(X)], X ~ N(0,1); cached and read-only."""
    if order < 1:
        raise DomainError("quadrature order must be >= 1")
    return _gh(int(order))
