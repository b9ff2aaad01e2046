"""Ordinary partial Bell polynomials and three exact series-reversion routes.

All reversion routes work on the standardized coefficients
alpha_n^x = alpha_n / alpha_1 in exact rational arithmetic.  Float input
is converted to the exact binary value of each coefficient, reverted
exactly, and rounded once at the end; the alternating sums below lose
all significant digits in float64 beyond order 15 or so.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from .errors import ArityError, DomainError, NotInvertibleAtZero, ParityError, SizeGuard
from .series import TruncatedSeries

__all__ = [
    "MAX_ORDER",
    "bell_conv",
    "bell_table",
    "bell_partition_oracle",
    "partitions_nk",
    "det_b2m1",
    "det_bn_matrix",
    "det_bn_recurrence",
    "invert_standardized",
    "invert_series_bell",
    "invert_series_det",
    "invert_series_odd",
    "invert_series",
    "standardize",
]

MAX_ORDER = 64
PARTITION_GUARD = 30


def bell_table(nmax: int, xs: Sequence, kmax: int | None = None) -> list[list]:
    """T[n][k] = B°_{n,k}(xs) for 0 <= k <= min(n, kmax), n <= nmax.

    One table per call: the entries depend on the whole xs vector.  Entries
    needing more than len(xs) arguments are left as None.
    """
    kmax = nmax if kmax is None else kmax
    zero = xs[0] * 0 if len(xs) else 0
    T = [[zero] * (kmax + 1) for _ in range(nmax + 1)]
    T[0][0] = zero + 1
    for k in range(1, kmax + 1):
        for n in range(k, nmax + 1):
            if n - k + 1 > len(xs):
                T[n][k] = None
                continue
            acc = zero
            for i in range(1, n - k + 2):
                acc += xs[i - 1] * T[n - i][k - 1]
            T[n][k] = acc
    return T


def bell_conv(n: int, k: int, xs: Sequence):
    """B°_{n,k}(x_1, ..., x_{n-k+1}) by the convolution recursion."""
    if not 0 <= k <= n:
        raise DomainError(f"need 0 <= k <= n, got n={n}, k={k}")
    if k == 0:
        return 1 if n == 0 else 0
    if len(xs) < n - k + 1:
        raise ArityError(f"B°_{{{n},{k}}} needs {n - k + 1} arguments, got {len(xs)}")
    xs = list(xs[: n - k + 1])
    return bell_table(n, xs, k)[n][k]


def partitions_nk(n: int, k: int):
    """Multiplicity vectors nu (length n-k+1) with sum nu = k, sum i*nu_i = n."""
    width = n - k + 1

    def rec(part_max, remaining_n, remaining_k, nu):
        if remaining_k == 0:
            if remaining_n == 0:
                yield tuple(nu)
            return
        for size in range(min(part_max, remaining_n - remaining_k + 1), 0, -1):
            # largest part first; at most remaining_k parts of this size
            for cnt in range(min(remaining_k, remaining_n // size), 0, -1):
                nu[size - 1] += cnt
                yield from rec(size - 1, remaining_n - cnt * size, remaining_k - cnt, nu)
                nu[size - 1] -= cnt

    if k == 0:
        if n == 0:
            yield ()
        return
    yield from rec(width, n, k, [0] * width)


def bell_partition_oracle(n: int, k: int, xs: Sequence):
    """B°_{n,k} by brute-force partition enumeration (n <= 30)."""
    if not 0 <= k <= n:
        raise DomainError(f"need 0 <= k <= n, got n={n}, k={k}")
    if n > PARTITION_GUARD:
        raise SizeGuard(f"partition enumeration refused for n={n} > {PARTITION_GUARD}")
    if k == 0:
        return 1 if n == 0 else 0
    if len(xs) < n - k + 1:
        raise ArityError(f"B°_{{{n},{k}}} needs {n - k + 1} arguments, got {len(xs)}")
    total = 0
    kf = math.factorial(k)
    for nu in partitions_nk(n, k):
        mult = kf
        for v in nu:
            mult //= math.factorial(v) if v > 1 else 1
        term = mult
        for i, v in enumerate(nu):
            if v:
                term = term * xs[i] ** v
        total = total + term
    return total


def det_bn_matrix(n: int, p: int, xs: Sequence) -> list[list]:
    """The p x p matrix B_n[p](x_1..x_p) as nested lists."""
    zero = xs[0] * 0 if xs else 0
    M = [[zero] * p for _ in range(p)]
    for i in range(1, p + 1):
        for j in range(1, p + 1):
            if j == i + 1:
                M[i - 1][j - 1] = zero + i
            elif j <= i:
                M[i - 1][j - 1] = ((i - j + 1) * n + j - 1) * xs[i - j]
    return M


def det_bn_recurrence(n: int, p: int, xs: Sequence) -> list:
    """[det B_n[0], ..., det B_n[p]] via the lower-Hessenberg recurrence."""
    one = (xs[0] * 0 + 1) if xs else 1
    D = [one]
    for q in range(1, p + 1):
        acc = one * 0
        for k in range(1, q + 1):
            c = Fraction(q * n - (k - 1) * (n - 1), math.factorial(k - 1))
            term = c * xs[q - k] * D[k - 1]
            acc = acc + term if (q - k) % 2 == 0 else acc - term
        D.append(acc * math.factorial(q - 1))
    return D


def det_b2m1(m: int, r: int, xs: Sequence):
    """det B_{2m+1}[2r](0, x_1, 0, x_2, ..., 0, x_r) by the odd recurrence."""
    return _odd_dets(m, r, xs)[r]


def _odd_dets(m: int, r: int, xs: Sequence) -> list:
    if not 1 <= r <= m:
        raise DomainError(f"need 1 <= r <= m, got m={m}, r={r}")
    if len(xs) < r:
        raise ArityError(f"need {r} arguments, got {len(xs)}")
    one = xs[0] * 0 + 1
    D = [one]
    for q in range(1, r + 1):
        acc = (2 * m + 1) * q * xs[q - 1]
        for k in range(1, q):
            acc = acc + Fraction(2 * m * (q - k) + q, math.factorial(2 * k)) * D[k] * xs[q - k - 1]
        D.append(-2 * math.factorial(2 * q - 1) * acc)
    return D


def _guard(N: int) -> None:
    if N > MAX_ORDER:
        raise SizeGuard(f"order {N} exceeds the factorial guard {MAX_ORDER}")


def standardize(alphas: TruncatedSeries) -> tuple[object, list[Fraction]]:
    """(alpha_1, [alpha_1^x, alpha_2^x, ...]) with the ratios in exact arithmetic."""
    a = alphas.coeffs
    if a[0] != 0:
        raise NotInvertibleAtZero("alpha_0 must vanish")
    if len(a) < 2 or a[1] == 0:
        raise NotInvertibleAtZero("alpha_1 must be nonzero")
    exact = [Fraction(c) for c in a]
    return a[1], [c / exact[1] for c in exact[1:]]


def _beta_bell(xs: list[Fraction], N: int, stats: dict | None) -> list[Fraction]:
    # xs[0] = alpha_1^x = 1; the Bell arguments are alpha_2^x, alpha_3^x, ...
    args = xs[1:N] if N > 1 else []
    T = bell_table(N - 1, args) if N > 1 else [[Fraction(1)]]
    if stats is not None:
        stats["bell_entries"] = sum(len(row) for row in T)
    out = [Fraction(0), Fraction(1)]
    for n in range(2, N + 1):
        acc = Fraction(0)
        for k in range(1, n):
            term = math.comb(n - 1 + k, k) * T[n - 1][k]
            acc += term if k % 2 == 0 else -term
        out.append(acc / n)
    return out


def _beta_det(xs: list[Fraction], N: int) -> list[Fraction]:
    out = [Fraction(0), Fraction(1)]
    for n in range(2, N + 1):
        D = det_bn_recurrence(n, n - 1, xs[1:n])
        sign = 1 if (n - 1) % 2 == 0 else -1
        out.append(sign * D[n - 1] / math.factorial(n))
    return out


def _beta_odd(xs: list[Fraction], N: int, stats: dict | None) -> list[Fraction]:
    M = (N - 1) // 2
    odd_args = [xs[2 * j] for j in range(1, M + 1)]  # alpha_3^x, alpha_5^x, ...
    T = bell_table(M, odd_args) if M else [[Fraction(1)]]
    if stats is not None:
        stats["bell_entries"] = sum(len(row) for row in T)
    out = [Fraction(0)] * (N + 1)
    out[1] = Fraction(1)
    for m in range(1, M + 1):
        acc = Fraction(0)
        for r in range(1, m + 1):
            term = Fraction(math.factorial(2 * m + r), math.factorial(r)) * T[m][r]
            acc += term if r % 2 == 0 else -term
        out[2 * m + 1] = acc / math.factorial(2 * m + 1)
    return out


def _beta_oracle(xs: list[Fraction], N: int) -> list[Fraction]:
    from .series import revert_oracle

    s = TruncatedSeries([Fraction(0)] + list(xs[:N]))
    return list(revert_oracle(s, N).coeffs)


def invert_standardized(xs: Sequence, N: int, backend: str = "bell", stats: dict | None = None) -> list[Fraction]:
    """Exact beta_n alpha_1^n, n = 0..N, from xs = (1, alpha_2^x, ..., alpha_N^x)."""
    _guard(N)
    xs = [Fraction(x) for x in xs]
    if len(xs) < N:
        raise ArityError(f"need {N} standardized coefficients, got {len(xs)}")
    if xs[0] != 1:
        raise DomainError("standardized series must have alpha_1^x = 1")
    if N < 1:
        raise DomainError("order must be at least 1")
    if backend == "bell":
        return _beta_bell(xs, N, stats)
    if backend == "det":
        return _beta_det(xs, N)
    if backend == "odd":
        if any(xs[j] != 0 for j in range(1, N, 2)):
            raise ParityError("odd backend needs vanishing even coefficients")
        return _beta_odd(xs, N, stats)
    if backend == "oracle":
        return _beta_oracle(xs, N)
    raise DomainError(f"unknown backend {backend!r}")


def _rescale(beta_x: list[Fraction], a1, exact: bool, parity: str, radius: float) -> TruncatedSeries:
    if exact:
        a1 = Fraction(a1)
        coeffs = [b / a1**n if n else b for n, b in enumerate(beta_x)]
    else:
        a1 = float(a1)
        coeffs = [float(b) / a1**n if n else 0.0 for n, b in enumerate(beta_x)]
    return TruncatedSeries(coeffs, parity, radius)


def invert_series(alphas: TruncatedSeries, N: int | None = None, backend: str = "bell",
                  stats: dict | None = None) -> TruncatedSeries:
    """Inverse-series coefficients beta_0..beta_N by the chosen backend."""
    N = alphas.order if N is None else int(N)
    if N > alphas.order:
        raise DomainError(f"requested order {N} exceeds the series order {alphas.order}")
    _guard(N)
    a1, xs = standardize(alphas)
    if backend == "odd" and alphas.parity != "odd":
        raise ParityError("the odd backend needs an odd-parity series")
    beta_x = invert_standardized(xs, N, backend, stats)
    parity = "odd" if alphas.parity == "odd" else "none"
    return _rescale(beta_x, a1, alphas.exact, parity, alphas.radius)


def invert_series_bell(alphas: TruncatedSeries, N: int | None = None) -> TruncatedSeries:
    return invert_series(alphas, N, "bell")


def invert_series_det(alphas: TruncatedSeries, N: int | None = None) -> TruncatedSeries:
    return invert_series(alphas, N, "det")


def invert_series_odd(alphas: TruncatedSeries, M: int | None = None) -> TruncatedSeries:
    """Odd inverse through degree 2M+1 (default: the input order)."""
    N = alphas.order if M is None else 2 * int(M) + 1
    return invert_series(alphas, N, "odd")
