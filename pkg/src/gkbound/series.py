"""Truncated Maclaurin series with exact (Fraction) or float coefficients.

A series is immutable.  Binary operations truncate to the shorter operand,
and the two scalar backends are never mixed inside one series.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DomainError, NormalizationDegenerate, NotInvertibleAtZero

__all__ = [
    "TruncatedSeries",
    "eval_series",
    "abs_transform",
    "scale_argument",
    "cauchy_product",
    "compose",
    "revert_oracle",
    "power_table",
]

PARITIES = ("none", "odd", "even")


def _normalize(coeffs: Iterable) -> tuple[tuple, bool]:
    raw = list(coeffs)
    if not raw:
        raise DomainError("a series needs at least the constant coefficient")
    has_float = any(isinstance(c, float) for c in raw)
    has_frac = any(isinstance(c, Fraction) for c in raw)
    if has_float and has_frac:
        raise DomainError("mixed Fraction and float coefficients; pick one backend")
    if has_float:
        out = tuple(float(c) for c in raw)
        if not all(math.isfinite(c) for c in out):
            raise DomainError("coefficients must be finite")
        return out, False
    try:
        return tuple(Fraction(c) for c in raw), True
    except TypeError:
        out = tuple(float(c) for c in raw)
        if not all(math.isfinite(c) for c in out):
            raise DomainError("coefficients must be finite") from None
        return out, False


@dataclass(frozen=True, init=False)
class TruncatedSeries:
    """Coefficients a_0..a_N of a one-variable power series.

    ``radius`` is carried along for the caller and never enforced.
    """

    coeffs: tuple
    parity: str = "none"
    radius: float = 1.0
    exact: bool = field(default=True, compare=False)

    def __init__(self, coeffs: Iterable, parity: str = "none", radius: float = 1.0):
        values, exact = _normalize(coeffs)
        if parity not in PARITIES:
            raise DomainError(f"parity must be one of {PARITIES}")
        if parity != "none":
            bad = 0 if parity == "odd" else 1
            for n in range(bad, len(values), 2):
                if values[n] != 0:
                    raise DomainError(f"{parity} series has nonzero coefficient at degree {n}")
        if not radius > 0:
            raise DomainError("radius must be positive")
        object.__setattr__(self, "coeffs", values)
        object.__setattr__(self, "parity", parity)
        object.__setattr__(self, "radius", radius)
        object.__setattr__(self, "exact", exact)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int):
        return self.coeffs[n]

    def __len__(self) -> int:
        return len(self.coeffs)

    def __call__(self, x):
        return eval_series(self, x)

    def zero(self):
        return Fraction(0) if self.exact else 0.0

    def truncate(self, n: int) -> "TruncatedSeries":
        if n > self.order:
            raise DomainError(f"cannot extend a series of order {self.order} to {n}")
        return TruncatedSeries(self.coeffs[: n + 1], self.parity, self.radius)

    def to_float(self) -> "TruncatedSeries":
        return TruncatedSeries([float(c) for c in self.coeffs], self.parity, self.radius)

    def to_exact(self) -> "TruncatedSeries":
        """Exact binary value of each coefficient (no rounding)."""
        return TruncatedSeries([Fraction(c) for c in self.coeffs], self.parity, self.radius)

    @classmethod
    def from_coeffs(cls, coeffs: Sequence, radius: float = 1.0) -> "TruncatedSeries":
        """Build a series and infer its parity from the zero pattern."""
        s = cls(coeffs, radius=radius)
        return cls(s.coeffs, detect_parity(s.coeffs), radius)

    # serialization
    def to_dict(self) -> dict:
        coeffs = [str(c) if self.exact else c for c in self.coeffs]
        return {"order": self.order, "parity": self.parity, "coeffs": coeffs}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, obj: dict, radius: float = 1.0) -> "TruncatedSeries":
        coeffs = [_parse_scalar(c) for c in obj["coeffs"]]
        if "order" in obj and int(obj["order"]) != len(coeffs) - 1:
            raise DomainError("order does not match the number of coefficients")
        return cls(coeffs, obj.get("parity", "none"), radius)

    @classmethod
    def from_json(cls, text: str, radius: float = 1.0) -> "TruncatedSeries":
        return cls.from_dict(json.loads(text), radius)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["degree", "coefficient"])
        for n, c in enumerate(self.coeffs):
            w.writerow([n, str(c) if self.exact else repr(c)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, parity: str | None = None, radius: float = 1.0) -> "TruncatedSeries":
        rows = list(csv.reader(io.StringIO(text)))
        if rows and rows[0] and rows[0][0].strip().lower() == "degree":
            rows = rows[1:]
        table = {int(r[0]): _parse_scalar(r[1].strip()) for r in rows if r}
        n = max(table) if table else 0
        zero = 0.0 if any(isinstance(v, float) for v in table.values()) else 0
        coeffs = [table.get(i, zero) for i in range(n + 1)]
        if parity is None:
            return cls.from_coeffs(coeffs, radius)
        return cls(coeffs, parity, radius)


def _parse_scalar(c):
    if isinstance(c, (int, float, Fraction)):
        return c
    text = str(c).strip()
    try:
        return Fraction(text) if ("/" in text or text.lstrip("-+").isdigit()) else float(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"cannot parse coefficient {c!r}") from exc


def detect_parity(coeffs: Sequence) -> str:
    if all(c == 0 for c in coeffs[0::2]):
        return "odd"
    if all(c == 0 for c in coeffs[1::2]):
        return "even"
    return "none"


def eval_series(s: TruncatedSeries, x):
    """Horner evaluation of the partial sum (also works for complex x)."""
    acc = s.zero()
    for c in reversed(s.coeffs):
        acc = acc * x + c
    return acc


def abs_transform(s: TruncatedSeries) -> TruncatedSeries:
    return TruncatedSeries([abs(c) for c in s.coeffs], s.parity, s.radius)


def scale_argument(s: TruncatedSeries, c, normalize: bool = False) -> TruncatedSeries:
    """Coefficients a_n c^n, optionally divided by the abs-series at c."""
    out = []
    p = Fraction(1) if s.exact and not isinstance(c, float) else 1.0
    for a in s.coeffs:
        out.append(a * p)
        p = p * c
    if normalize:
        denom = eval_series(abs_transform(s), abs(c))
        if denom == 0:
            raise NormalizationDegenerate("abs-series vanishes at c (zero series)")
        out = [a / denom for a in out]
    return TruncatedSeries(out, s.parity, s.radius)


_PRODUCT_PARITY = {
    ("odd", "odd"): "even",
    ("even", "even"): "even",
    ("odd", "even"): "odd",
    ("even", "odd"): "odd",
}


def _check_backend(s: TruncatedSeries, t: TruncatedSeries) -> None:
    if s.exact != t.exact:
        raise DomainError("operands use different scalar backends")


def cauchy_product(s: TruncatedSeries, t: TruncatedSeries) -> TruncatedSeries:
    _check_backend(s, t)
    n = min(s.order, t.order)
    a, b = s.coeffs, t.coeffs
    out = [sum((a[k] * b[m - k] for k in range(m + 1)), s.zero()) for m in range(n + 1)]
    parity = _PRODUCT_PARITY.get((s.parity, t.parity), "none")
    return TruncatedSeries(out, parity, min(s.radius, t.radius))


def power_table(g: Sequence, kmax: int, n: int, zero) -> list[list]:
    """pw[k][j] = [y^j] g(y)^k for 0 <= k <= kmax, 0 <= j <= n, assuming g_0 = 0."""
    pw = [[zero] * (n + 1) for _ in range(kmax + 1)]
    pw[0][0] = zero + 1
    for k in range(1, kmax + 1):
        prev, cur = pw[k - 1], pw[k]
        for j in range(k, n + 1):
            cur[j] = sum((g[i] * prev[j - i] for i in range(1, j - k + 2)), zero)
    return pw


def compose(s: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    """s(g(y)) through the shorter order; g must have no constant term."""
    _check_backend(s, g)
    if g.coeffs[0] != 0:
        raise DomainError("inner series must vanish at zero")
    n = min(s.order, g.order)
    pw = power_table(g.coeffs, n, n, s.zero())
    out = [sum((s.coeffs[k] * pw[k][j] for k in range(j + 1)), s.zero()) for j in range(n + 1)]
    parity = "odd" if (s.parity == "odd" and g.parity == "odd") else "none"
    if parity == "none":
        parity = detect_parity(out) if s.exact else "none"
    return TruncatedSeries(out, parity, s.radius)


def revert_oracle(s: TruncatedSeries, N: int | None = None, check_tol: float | None = 1e-9) -> TruncatedSeries:
    """Compositional inverse g with s(g(y)) = y through degree N.

    Solves for g_n one degree at a time: the y^n coefficient of s(g) is
    a_1 g_n plus terms in g_1..g_{n-1}.  The result is verified by
    composing back, exactly for Fraction input and to ``check_tol``
    (relative to the magnitude of the summed terms) for float input.
    """
    N = s.order if N is None else int(N)
    if N > s.order:
        raise DomainError(f"requested order {N} exceeds the series order {s.order}")
    a = s.coeffs
    if a[0] != 0:
        raise NotInvertibleAtZero("a_0 must vanish")
    if N < 1 or a[1] == 0:
        raise NotInvertibleAtZero("a_1 must be nonzero")
    zero = s.zero()
    g = [zero] * (N + 1)
    pw = [[zero] * (N + 1) for _ in range(N + 1)]
    pw[0][0] = zero + 1
    for n in range(1, N + 1):
        # pw[k][n] for k >= 2 only involves g_1..g_{n-1}
        rest = zero
        for k in range(2, n + 1):
            prev = pw[k - 1]
            v = sum((g[i] * prev[n - i] for i in range(1, n - k + 2)), zero)
            pw[k][n] = v
            rest += a[k] * v
        g[n] = ((1 if n == 1 else 0) - rest) / a[1]
        pw[1][n] = g[n]
    parity = "odd" if s.parity == "odd" else "none"
    if parity == "odd" and not s.exact:
        g = [0.0 if n % 2 == 0 else v for n, v in enumerate(g)]
    out = TruncatedSeries(g, parity, s.radius)
    _verify_reversion(s.truncate(N), out, check_tol)
    return out


def _verify_reversion(s: TruncatedSeries, g: TruncatedSeries, tol: float | None) -> None:
    back = compose(s, g).coeffs
    ident = [0] * len(back)
    ident[1] = 1
    if s.exact:
        if list(back) != ident:
            raise ArithmeticError("exact reversion failed to compose to the identity")
        return
    if tol is None:
        return
    mags = compose(abs_transform(s), abs_transform(g)).coeffs
    for n, (b, e, m) in enumerate(zip(back, ident, mags)):
        if abs(b - e) > tol * (1.0 + m):
            raise ArithmeticError(f"float reversion residual {abs(b - e):.3e} at degree {n}")
