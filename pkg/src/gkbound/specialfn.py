"""Scalar special functions: double factorials, Gamma at half-integers,
Gauss hypergeometric 2F1 on [-1, 1], the constants c_k, Catalan numbers
and the standard normal law.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import Sequence

import numpy as np
from scipy.special import ndtr

from .errors import DivergentAtBoundary, DomainError, ParameterPole

__all__ = [
    "HalfInt",
    "double_factorial",
    "gamma_half",
    "hyp2f1",
    "c_k",
    "catalan",
    "std_normal",
    "std_normal_pdf",
    "std_normal_cdf",
    "std_normal_inv",
    "gaussian_norm_moment",
    "hyp_pfq_partial",
    "sphere_correlation_power",
]

HYP_TOL = 1e-15
HYP_TERM_CAP = 1_000_000

_SQRT_PI_HALF = math.sqrt(math.pi / 2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class HalfInt:
    """The number ``twice_value / 2``."""

    twice_value: int

    @classmethod
    def of(cls, x) -> "HalfInt":
        if isinstance(x, HalfInt):
            return x
        t = Fraction(x) * 2
        if t.denominator != 1:
            raise DomainError(f"{x!r} is not a multiple of 1/2")
        return cls(int(t))

    @property
    def value(self) -> Fraction:
        return Fraction(self.twice_value, 2)

    def __float__(self) -> float:
        return self.twice_value / 2.0


def double_factorial(n: int) -> int:
    """n!! with the convention (-1)!! = 0!! = 1."""
    n = int(n)
    if n < -1:
        raise DomainError(f"double factorial undefined for n={n}")
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def _b(n: int) -> float:
    return 1.0 if n % 2 == 0 else _SQRT_PI_HALF


def gamma_half(h) -> float:
    """Gamma(n/2) for a positive integer n, from (n-2)!! and b_n."""
    n = HalfInt.of(h).twice_value
    if n < 1:
        raise DomainError(f"gamma_half needs a positive argument, got {n}/2")
    # 2^{-(n-2)/2} = 2^{-ceil((n-2)/2)} * (sqrt 2 when n is odd)
    e = n - 2
    val = float(Fraction(double_factorial(e), 2 ** ((e + 1) // 2))) * _b(n)
    return val * math.sqrt(2.0) if e % 2 else val


def _gamma_any(x: float) -> float:
    t = 2.0 * x
    if t == int(t) and t > 0:
        return gamma_half(HalfInt(int(t)))
    return math.gamma(x)


def _is_nonpos_int(x: float) -> bool:
    return x <= 0 and float(x).is_integer()


def hyp2f1(a, b, c, x: float, *, tol: float = HYP_TOL, cap: int = HYP_TERM_CAP) -> float:
    """Gauss hypergeometric function for real |x| <= 1.

    Uses the Gauss summation closed form at x = 1, the Pfaff transformation
    for x < 0 and the defining series otherwise. The series stops once the estimated remainder drops below
    ``tol`` relative to the partial sum; reaching ``cap`` terms emits a
    RuntimeWarning carrying the last increment.
    """
    a, b, c = float(HalfInt.of(a).value if isinstance(a, HalfInt) else a), float(
        HalfInt.of(b).value if isinstance(b, HalfInt) else b
    ), float(HalfInt.of(c).value if isinstance(c, HalfInt) else c)
    x = float(x)
    if _is_nonpos_int(c):
        raise ParameterPole(f"c = {c} is a non-positive integer")
    if abs(x) > 1.0:
        raise DomainError(f"|x| = {abs(x)} > 1")
    if abs(x) == 1.0 and c <= a + b:
        raise DivergentAtBoundary(f"c = {c} <= a + b = {a + b} at |x| = 1")
    if x == 1.0:
        return (_gamma_any(c) * _gamma_any(c - a - b)) / (_gamma_any(c - a) * _gamma_any(c - b))
    if x < 0.0:
        # Pfaff: maps [-1, 0) into [0, 1/2), where the series converges geometrically
        return (1.0 - x) ** (-a) * hyp2f1(a, c - b, c, x / (x - 1.0), tol=tol, cap=cap)

    total = 1.0
    term = 1.0
    for n in range(cap):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * x
        total += term
        if term == 0.0:
            return total
        if abs(term) * x / (1.0 - x) <= tol * abs(total):
            return total
    warnings.warn(
        f"hyp2f1 hit the {cap}-term cap; last increment {abs(term):.3e}",
        RuntimeWarning,
        stacklevel=2,
    )
    return total


def c_k(k: int) -> float:
    """c_k = sqrt(2/k) Gamma((k+1)/2) / Gamma(k/2)."""
    k = int(k)
    if k < 1:
        raise DomainError("c_k needs k >= 1")
    # Gamma ratio as an exact double-factorial quotient to avoid overflow
    ratio = Fraction(double_factorial(k - 1), double_factorial(k - 2))
    val = float(ratio) / math.sqrt(2.0) * (_b(k + 1) / _b(k))
    return math.sqrt(2.0 / k) * val


def catalan(n: int) -> int:
    if n < 0:
        raise DomainError("catalan needs n >= 0")
    return math.comb(2 * n, n) // (n + 1)


def std_normal_pdf(x):
    if isinstance(x, Real):
        return _INV_SQRT_2PI * math.exp(-0.5 * float(x) * float(x))
    x = np.asarray(x, dtype=float)
    return _INV_SQRT_2PI * np.exp(-0.5 * x * x)


def std_normal_cdf(x):
    if isinstance(x, Real):
        return 0.5 * math.erfc(-float(x) / math.sqrt(2.0))
    return ndtr(np.asarray(x, dtype=float))


def std_normal(x):
    """(phi(x), Phi(x))."""
    return std_normal_pdf(x), std_normal_cdf(x)


def std_normal_inv(p: float, *, tol: float = 1e-14) -> float:
    """Phi^{-1}(p): bisection to a bracket, then Newton polishing."""
    p = float(p)
    if not 0.0 < p < 1.0:
        if p == 0.0:
            return -math.inf
        if p == 1.0:
            return math.inf
        raise DomainError(f"p = {p} outside [0, 1]")
    if p > 0.5:
        # 1 - p is exact here, and the lower tail keeps full relative precision
        return -std_normal_inv(1.0 - p, tol=tol)
    lo, hi = -40.0, 0.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if std_normal_cdf(mid) < p:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-3:
            break
    x = 0.5 * (lo + hi)
    for _ in range(50):
        step = (std_normal_cdf(x) - p) / max(std_normal_pdf(x), 1e-300)
        x -= step
        if abs(step) < tol * max(1.0, abs(x)):
            break
    return x


def gaussian_norm_moment(n: int, m: int, field: str = "real") -> float:
    """E||X||^m for a standard Gaussian vector in R^n or C^n, integer m >= 0.

    Complex vectors are normalized so that E|Z_i|^2 = 1.
    """
    n, m = int(n), int(m)
    if n < 1 or m < 0:
        raise DomainError("need n >= 1 and m >= 0")
    if field == "real":
        dim, scale = n, 1.0
    elif field == "complex":
        dim, scale = 2 * n, 2.0 ** (-m / 2.0)
    else:
        raise DomainError(f"unknown field {field!r}")
    toggle = _b(dim + m) / _b(dim)
    ratio = Fraction(double_factorial(dim - 2 + m), double_factorial(dim - 2))
    return toggle * float(ratio) * scale


def hyp_pfq_partial(a: Sequence[float], b: Sequence[float], x: float, terms: int) -> float:
    """Finite partial sum of pFq(a; b; x) with ``terms`` terms."""
    total, term = 0.0, 1.0
    for n in range(terms):
        total += term
        num = math.prod(ai + n for ai in a)
        den = math.prod(bi + n for bi in b) * (n + 1)
        term *= num / den * x
    return total


def sphere_correlation_power(m: int, n: int, rho: float, terms: int = 2000) -> float:
    """E[<X/|X|, Y/|Y|>^m] for Sigma_2n(rho)-correlated X, Y in R^n, via a 3F2 partial sum."""
    if abs(rho) >= 1:
        raise DomainError("need |rho| < 1")

    def g(t: int) -> float:  # Gamma(t/2)
        return gamma_half(HalfInt(t))

    if m % 2:
        c = m / math.sqrt(math.pi) * g(n + 1) ** 2 * g(m) / (g(n) * g(m + n + 1))
        f = hyp_pfq_partial([(n + 1) / 2, (n + 1) / 2, (m + 2) / 2], [1.5, (m + n + 1) / 2], rho * rho, terms)
        return c * rho * (1 - rho * rho) ** (n / 2) * f
    c = g(n) * g(m + 1) / (math.sqrt(math.pi) * g(m + n))
    f = hyp_pfq_partial([n / 2, n / 2, (m + 1) / 2], [0.5, (m + n) / 2], rho * rho, terms)
    return c * (1 - rho * rho) ** (n / 2) * f
