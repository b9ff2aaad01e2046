"""Upper-bound pipeline for Grothendieck-type constants from CCP functions.

A catalog descriptor supplies the Maclaurin coefficients p_nu of
h(rho) = E[f(X) f(Y)].  The pipeline reverts h (exactly, on the
standardized coefficients p_nu / p_1), takes absolute values of the
inverse coefficients, and locates the root c* of (h^{-1})_abs = 1.
All reported bounds are order-N estimates, not certified constants.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .bell import invert_standardized
from .errors import DomainError, NoRootInRange, SignConditionUnverified
from .hermite import fh_indicator
from .series import TruncatedSeries, abs_transform, eval_series
from .specialfn import c_k, double_factorial, hyp2f1, std_normal_cdf

__all__ = [
    "CcpDescriptor",
    "BoundReport",
    "CcpCheckReport",
    "catalog",
    "custom_descriptor",
    "CATALOG_NAMES",
    "h_series",
    "standardized_coeffs",
    "ccp_check",
    "inverse_sign_condition",
    "hyp_transform_sign_route",
    "alternating_boundary_value",
    "abs_inverse",
    "find_cstar",
    "psi_hyp",
    "bound",
    "haagerup_eval",
    "gaussian_df_series",
    "DEFAULT_ORDER",
    "BACKENDS",
]

DEFAULT_ORDER = 41
BACKENDS = ("bell", "det", "oracle", "odd")
CSTAR_TOL = 1e-13
CSTAR_MAX_ITER = 200
CATALOG_NAMES = ("grothendieck", "haagerup", "fk", "kappa")


@dataclass(frozen=True)
class CcpDescriptor:
    """A generating function f with its norms and Maclaurin coefficients of h_{f,f}.

    ``leading`` is p_1.  ``ratio(nu)`` returns p_nu / p_1 exactly (a
    Fraction) when the descriptor knows it; ``floats(N)`` gives p_0..p_N.
    ``sampler`` and ``k`` describe a real function on R^k whose
    correlation function is the series, for Monte-Carlo checks.
    """

    name: str
    l2_norm_sq: float
    sup_norm_sq: float
    leading: float
    ratio: Callable[[int], Fraction]
    floats: Callable[[int], np.ndarray]
    parity: str = "odd"
    field: str = "real"
    k: int = 1
    sampler: Callable | None = None
    closed_form: Callable[[float], float] | None = None
    flags: tuple[str, ...] = ()

    def coeff(self, nu: int) -> float:
        return float(self.floats(nu)[nu])


@dataclass(frozen=True)
class BoundReport:
    name: str
    order: int
    backend: str
    route: str
    c_star: float
    bound: float
    abs_inverse_at_r: float
    tail_indicator: float
    notes: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "order": self.order,
            "backend": self.backend,
            "route": self.route,
            "c_star": self.c_star,
            "bound": self.bound,
            "abs_inverse_at_r": self.abs_inverse_at_r,
            "tail_indicator": self.tail_indicator,
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, obj: dict) -> "BoundReport":
        return cls(**{**obj, "notes": tuple(obj.get("notes", ()))})


# catalog -----------------------------------------------------------------------------

def _hyp_odd_family(leading: float, c: Fraction, z: Fraction):
    """p_{2l+1} = leading * ((1/2)_l)^2 / ((c)_l l!) * z^l, even terms zero."""
    half = Fraction(1, 2)

    def ratio(nu: int) -> Fraction:
        if nu % 2 == 0:
            return Fraction(0)
        out = Fraction(1)
        for j in range((nu - 1) // 2):
            out *= (half + j) ** 2 / ((c + j) * (j + 1)) * z
        return out

    def floats(N: int) -> np.ndarray:
        out = np.zeros(N + 1)
        L = (N - 1) // 2
        if N >= 1:
            j = np.arange(L, dtype=float)
            steps = (j + 0.5) ** 2 / ((float(c) + j) * (j + 1.0)) * float(z)
            out[1::2] = leading * np.concatenate([[1.0], np.cumprod(steps)])[: len(out[1::2])]
        return out

    return ratio, floats


def _haagerup_parts():
    lead = math.pi / 4.0

    def ratio(nu: int) -> Fraction:
        if nu % 2 == 0:
            return Fraction(0)
        # alpha_nu / alpha_1 with alpha_nu = (pi/2)((nu-2)!!)^2 / (((nu-1)!!)^2 (nu+1))
        return Fraction(2 * double_factorial(nu - 2) ** 2, double_factorial(nu - 1) ** 2 * (nu + 1))

    def floats(N: int) -> np.ndarray:
        out = np.zeros(N + 1)
        if N >= 1:
            nu = np.arange(1, N - 1, 2, dtype=float)
            steps = nu * nu / ((nu + 1.0) * (nu + 3.0))
            out[1::2] = lead * np.concatenate([[1.0], np.cumprod(steps)])[: len(out[1::2])]
        return out

    return ratio, floats


def _unit_coordinate(k: int):
    def f(x):
        if k == 1:
            return np.sign(x)
        return math.sqrt(k) * x[:, 0] / np.linalg.norm(x, axis=1)

    return f


def _kappa_fn(x):
    return math.sqrt(3.0) * (2.0 * std_normal_cdf(x) - 1.0)


def parse_name(name: str) -> tuple[str, int | None]:
    text = name.strip().lower()
    for sep in ("(", ":", "="):
        if sep in text:
            head, tail = text.split(sep, 1)
            return head, int(tail.strip(") "))
    if text.startswith("fk") and text[2:].isdigit():
        return "fk", int(text[2:])
    return text, None


def catalog(name: str, k: int | None = None) -> CcpDescriptor:
    """Named descriptors: grothendieck, haagerup, fk(k), kappa."""
    base, parsed_k = parse_name(name)
    k = parsed_k if k is None else k
    if base == "grothendieck":
        ratio, floats = _hyp_odd_family(2.0 / math.pi, Fraction(3, 2), Fraction(1))
        return CcpDescriptor("grothendieck", 1.0, 1.0, 2.0 / math.pi, ratio, floats,
                             sampler=np.sign, closed_form=lambda r: 2.0 / math.pi * math.asin(r))
    if base == "haagerup":
        ratio, floats = _haagerup_parts()
        return CcpDescriptor("haagerup", 1.0, 1.0, math.pi / 4.0, ratio, floats, field="complex",
                             k=2, sampler=_unit_coordinate(2),
                             closed_form=lambda r: math.copysign(1.0, r) * math.pi / 4.0 * abs(r)
                             * hyp2f1(0.5, 0.5, 2, r * r) if r else 0.0)
    if base == "fk":
        if k is None or k < 1:
            raise DomainError("fk needs a dimension k >= 1, e.g. 'fk(3)'")
        lead = c_k(k) ** 2
        ratio, floats = _hyp_odd_family(lead, Fraction(k + 2, 2), Fraction(1))
        flags = ("assumption CRA unverified",) if k >= 3 else ()
        return CcpDescriptor(f"fk({k})", 1.0, float(k), lead, ratio, floats, k=k,
                             sampler=_unit_coordinate(k), flags=flags,
                             closed_form=lambda r, k=k, lead=lead: lead * r * hyp2f1(0.5, 0.5, (k + 2) / 2, r * r))
    if base == "kappa":
        ratio, floats = _hyp_odd_family(3.0 / math.pi, Fraction(3, 2), Fraction(1, 4))
        return CcpDescriptor("kappa", 1.0, 3.0, 3.0 / math.pi, ratio, floats, sampler=_kappa_fn,
                             closed_form=lambda r: 6.0 / math.pi * math.asin(r / 2.0))
    raise DomainError(f"unknown catalog function {name!r}")


def custom_descriptor(series: TruncatedSeries, l2_norm_sq: float, sup_norm_sq: float,
                      name: str = "custom") -> CcpDescriptor:
    """Descriptor from a given coefficient series (exact binary ratios for float input)."""
    if series.order < 1 or series.coeffs[1] == 0:
        raise DomainError("custom series needs a nonzero linear coefficient")
    exact = [Fraction(c) for c in series.coeffs]
    lead = float(series.coeffs[1])
    order = series.order

    def ratio(nu: int) -> Fraction:
        if nu > order:
            raise DomainError(f"custom series only known through degree {order}")
        return exact[nu] / exact[1]

    def floats(N: int) -> np.ndarray:
        if N > order:
            raise DomainError(f"custom series only known through degree {order}")
        return np.array([float(c) for c in series.coeffs[: N + 1]])

    return CcpDescriptor(name, float(l2_norm_sq), float(sup_norm_sq), lead, ratio, floats,
                         parity=series.parity)


def h_series(d: CcpDescriptor, N: int) -> TruncatedSeries:
    """Float coefficients p_0..p_N of h_{f,f}."""
    if N < 1:
        raise DomainError("order must be >= 1")
    return TruncatedSeries([float(c) for c in d.floats(N)], d.parity, 1.0)


def standardized_coeffs(d: CcpDescriptor, N: int) -> list[Fraction]:
    """[p_1/p_1, p_2/p_1, ..., p_N/p_1] as exact rationals."""
    return [d.ratio(nu) for nu in range(1, N + 1)]


# checks --------------------------------------------------------------------------------

@dataclass(frozen=True)
class CcpCheckReport:
    passed: bool
    first_violation: int | None
    partial_sum: float
    tail_bound: float
    message: str


def _tail_estimate(coeffs: Sequence[float]) -> float:
    """Heuristic remainder bound for a nonnegative, power-law-decaying series.

    Fits a_n ~ C n^{-p} on the last two nonzero coefficients and doubles the
    integral tail a_N N/(p-1); geometric decay gives a smaller value.
    """
    nz = [(n, c) for n, c in enumerate(coeffs) if c > 0 and n > 0]
    if len(nz) < 2:
        return 0.0
    (n1, c1), (n2, c2) = nz[-2], nz[-1]
    p = math.log(c1 / c2) / math.log(n2 / n1)
    step = n2 - n1
    if p <= 1.0:
        return math.inf
    return 2.0 * c2 * n2 / ((p - 1.0) * step)


def ccp_check(s: TruncatedSeries, r: float = 1.0, tol: float = 1e-12,
              tail_bound: float | None = None) -> CcpCheckReport:
    """Nonnegative coefficients summing to r, up to the truncation tail.

    With ``tail_bound=None`` a power-law tail estimate is used (see
    ``_tail_estimate``); pass an explicit bound to override it.
    """
    coeffs = [float(c) for c in s.coeffs]
    for n, c in enumerate(coeffs):
        if c < -tol:
            return CcpCheckReport(False, n, sum(coeffs[:n]), math.nan, f"negative coefficient at degree {n}")
    total = math.fsum(coeffs)
    tail = _tail_estimate(coeffs) if tail_bound is None else float(tail_bound)
    if total > r + tol:
        partial = 0.0
        for n, c in enumerate(coeffs):
            partial += c
            if partial > r + tol:
                return CcpCheckReport(False, n, total, tail, f"partial sum exceeds r at degree {n}")
    if r - total > tail + tol:
        return CcpCheckReport(False, s.order, total, tail, "partial sum falls short of r by more than the tail")
    return CcpCheckReport(True, None, total, tail, "ok")


def inverse_sign_condition(beta_x: Sequence) -> int | None:
    """First odd degree 2n+1 where sign(beta) != (-1)^n, or None if it holds."""
    for deg in range(1, len(beta_x), 2):
        want = 1 if ((deg - 1) // 2) % 2 == 0 else -1
        b = beta_x[deg]
        if b == 0 or (b > 0) != (want > 0):
            return deg
    return None


def _beta_standardized(d: CcpDescriptor, N: int, backend: str) -> list[Fraction]:
    if backend not in BACKENDS:
        raise DomainError(f"backend must be one of {BACKENDS}")
    if backend == "odd" and d.parity != "odd":
        raise DomainError("odd backend needs an odd descriptor")
    return invert_standardized(standardized_coeffs(d, N), N, backend)


def alternating_boundary_value(coeffs: np.ndarray, levels: int = 8) -> float:
    """Value at x = 1 of an odd alternating series, by repeated averaging
    of the last partial sums (Euler-type acceleration)."""
    odd = np.asarray(coeffs, dtype=float)[1::2]
    partial = np.cumsum(odd)
    tail = list(partial[-(levels + 1):])
    while len(tail) > 1:
        tail = [(a + b) / 2.0 for a, b in zip(tail, tail[1:])]
    return float(tail[0])


def hyp_transform_sign_route(s: TruncatedSeries, check_order: int | None = None,
                             descriptor: CcpDescriptor | None = None) -> TruncatedSeries:
    """psi^hyp from the alternating-sign copy of an odd series.

    The inverse of ``s`` (or of ``descriptor``, exactly) is computed
    through ``check_order`` and must have sign (-1)^n at degree 2n+1.
    """
    if s.parity != "odd":
        raise DomainError("the hyperbolic transform route needs an odd series")
    N = min(s.order, DEFAULT_ORDER) if check_order is None else int(check_order)
    if descriptor is not None:
        beta_x = _beta_standardized(descriptor, N, "odd")
    else:
        coeffs = [Fraction(c) for c in s.coeffs[: N + 1]]
        beta_x = invert_standardized([c / coeffs[1] for c in coeffs[1:]], N, "odd")
    bad = inverse_sign_condition(beta_x)
    if bad is not None:
        raise SignConditionUnverified(
            f"inverse coefficient of degree {bad} has sign {_sgn(beta_x[bad])}, "
            f"expected {(-1) ** ((bad - 1) // 2)}"
        )
    alt = [c if n % 4 == 1 else -c for n, c in enumerate(s.coeffs)]
    alt = [c if n % 2 else s.zero() for n, c in enumerate(alt)]
    return TruncatedSeries(alt, "odd", s.radius)


def _sgn(x) -> int:
    return (x > 0) - (x < 0)


def find_cstar(beta_abs: TruncatedSeries, r: float = 1.0) -> float:
    """Root of beta_abs(c) = 1 on (0, r] by bisection."""
    return psi_hyp(beta_abs, 1.0, r)


def psi_hyp(beta_abs: TruncatedSeries, y: float, r: float = 1.0) -> float:
    """The x in [0, r] with beta_abs(x) = y (odd extension for y < 0)."""
    if y < 0:
        return -psi_hyp(beta_abs, -y, r)
    s = beta_abs.to_float() if beta_abs.exact else beta_abs
    if any(c < 0 for c in s.coeffs):
        raise DomainError("beta_abs must have nonnegative coefficients")
    if y == 0:
        return 0.0
    top = eval_series(s, r)
    if top < y:
        raise NoRootInRange(f"abs-inverse reaches only {top:.6g} < {y} at r = {r}")
    lo, hi = 0.0, float(r)
    mid = hi
    for _ in range(CSTAR_MAX_ITER):
        mid = 0.5 * (lo + hi)
        val = eval_series(s, mid)
        if abs(val - y) < CSTAR_TOL:
            break
        if val < y:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4e-16 * max(hi, 1e-300):
            break
    return mid


# the pipeline ---------------------------------------------------------------------------

def _abs_from_standardized(d: CcpDescriptor, beta_x: list[Fraction]) -> TruncatedSeries:
    a1 = d.leading
    beta = [0.0] + [float(b) / a1**n for n, b in enumerate(beta_x) if n >= 1]
    return abs_transform(TruncatedSeries(beta, d.parity if d.parity == "odd" else "none", d.l2_norm_sq))


def abs_inverse(name: str | CcpDescriptor, order: int = DEFAULT_ORDER, backend: str = "bell") -> TruncatedSeries:
    """(h^{-1})_abs through degree ``order``, from the exact standardized inverse."""
    d = catalog(name) if isinstance(name, str) else name
    return _abs_from_standardized(d, _beta_standardized(d, order, backend))


def bound(name: str | CcpDescriptor, order: int = DEFAULT_ORDER, backend: str = "bell") -> BoundReport:
    """catalog -> h_series -> exact inversion -> abs -> c* root -> report."""
    d = catalog(name) if isinstance(name, str) else name
    if order < 1:
        raise DomainError("order must be >= 1")
    r = d.l2_norm_sq
    beta_x = _beta_standardized(d, order, backend)
    beta_abs = _abs_from_standardized(d, beta_x)
    c_star = find_cstar(beta_abs, r)
    at_r = float(eval_series(beta_abs, r))
    route = "invert-abs-root"
    if d.parity == "odd" and inverse_sign_condition(beta_x) is None:
        route = "sign-condition-hyp"
    value = d.sup_norm_sq / c_star
    if d.sup_norm_sq == d.l2_norm_sq:
        value = min(value, at_r)
    last = next((abs(c) for c in reversed(beta_abs.coeffs) if c != 0), 0.0)
    notes = (f"order-{order} estimate, not certified",) + d.flags
    return BoundReport(d.name, order, backend, route, c_star, value, at_r, last, notes)


def haagerup_eval(zeta: complex, order: int | None = None) -> complex:
    """sign(zeta) (pi/4) |zeta| 2F1(1/2, 1/2; 2; |zeta|^2), optionally truncated."""
    zeta = complex(zeta)
    r = abs(zeta)
    if r > 1.0 + 1e-15:
        raise DomainError("zeta must lie in the closed unit disk")
    if r == 0:
        return 0j
    r = min(r, 1.0)
    if order is None:
        real = math.pi / 4.0 * r * hyp2f1(0.5, 0.5, 2, r * r)
    else:
        real = float(eval_series(h_series(catalog("haagerup"), order), r))
    return zeta / abs(zeta) * real


def gaussian_df_series(rho: float, a: Sequence[float], b: Sequence[float], k: int | None = None,
                       N: int = 60) -> float:
    """P(X <= a, Y <= b) for Sigma_2k(rho)-correlated standard normal X, Y in R^k.

    Sums Phi(a)Phi(b) + sum_nu d_nu rho^nu, where d_nu collects products
    of lower-orthant Fourier-Hermite coefficients over |m| = nu.
    """
    a = [float(t) for t in np.atleast_1d(a)]
    b = [float(t) for t in np.atleast_1d(b)]
    k = len(a) if k is None else int(k)
    if len(a) != k or len(b) != k:
        raise DomainError("thresholds must have length k")
    if abs(rho) > 1:
        raise DomainError("|rho| must be <= 1")
    # d(t) = prod_i sum_m u_i(m) t^m; the |m| = nu coefficient is d_nu
    poly = np.zeros(N + 1)
    poly[0] = 1.0
    for ai, bi in zip(a, b):
        u = np.array([fh_indicator([ai], [m], "lower") * fh_indicator([bi], [m], "lower")
                      for m in range(N + 1)])
        poly = np.convolve(poly, u)[: N + 1]
    return float(np.polynomial.polynomial.polyval(rho, poly))
