"""Matrix calculus for correlation matrices and Grothendieck-type norms.

Indices in the index-map helpers (``r_n``, ``f_n``, ``psi_n``, ``wht_sign``)
are 1-based to match the usual matrix notation; everything that touches
numpy is 0-based.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import DomainError, ShapeMismatch, SizeGuard
from .series import TruncatedSeries, eval_series

__all__ = [
    "DenseMatrix",
    "r_n", "f_n", "psi_n", "lambda_n",
    "hadamard", "kronecker", "kronecker_blocks", "vec", "mat", "commutation",
    "wht_sign", "wht_entry", "wht", "wht_op", "wht_complex", "wht_sign_matrix",
    "a_had", "a_had_norm_exact",
    "NormResult", "norm_inf1_real", "norm_inf1_complex_estimate",
    "psd_check", "corr_check",
    "sigma", "sigma_inverse",
    "entrywise_apply", "delta", "delta_pairing", "gram",
    "bell_witness", "werner_state",
    "read_matrix", "write_matrix",
    "ENUM_GUARD",
]

ENUM_GUARD = 2**24


@dataclass(frozen=True, init=False)
class DenseMatrix:
    """Immutable real or complex matrix backed by a read-only ndarray."""

    data: np.ndarray

    def __init__(self, data):
        a = np.array(data.data if isinstance(data, DenseMatrix) else data)
        if a.ndim == 1:
            a = a.reshape(1, -1)
        if a.ndim != 2 or a.size == 0:
            raise ShapeMismatch("a matrix needs two non-empty dimensions")
        if np.iscomplexobj(a):
            a = a.astype(complex)
        elif a.dtype.kind in "iub":
            a = a.astype(np.int64)
        else:
            a = a.astype(float)
        if not np.all(np.isfinite(a)):
            raise DomainError("matrix entries must be finite")
        a.setflags(write=False)
        object.__setattr__(self, "data", a)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.data)

    @property
    def entries(self) -> tuple:
        return tuple(self.data.ravel().tolist())

    def entry(self, i: int, j: int):
        """1-based entry access."""
        return self.data[i - 1, j - 1].item()

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DenseMatrix):
            return NotImplemented
        return self.data.shape == other.data.shape and bool(np.array_equal(self.data, other.data))

    def __hash__(self) -> int:
        return hash((self.data.shape, self.data.tobytes()))


def _arr(A) -> np.ndarray:
    return A.data if isinstance(A, DenseMatrix) else np.asarray(A)


# index maps -----------------------------------------------------------------

def r_n(n: int, nu: int) -> int:
    """Remainder in [1, n]: n when n divides nu."""
    r = nu % n
    return n if r == 0 else r


def f_n(n: int, nu: int) -> int:
    return (nu - r_n(n, nu)) // n + 1


def psi_n(n: int, i: int, j: int) -> int:
    return (i - 1) * n + j


def lambda_n(n: int, nu: int) -> tuple[int, int]:
    return f_n(n, nu), r_n(n, nu)


# products and vectorization --------------------------------------------------

def hadamard(A, B) -> DenseMatrix:
    a, b = _arr(A), _arr(B)
    if a.shape != b.shape:
        raise ShapeMismatch(f"shapes {a.shape} and {b.shape} differ")
    return DenseMatrix(a * b)


def kronecker(A, B) -> DenseMatrix:
    """Entrywise Kronecker product through the index maps."""
    a, b = _arr(A), _arr(B)
    (m, n), (p, q) = a.shape, b.shape
    alpha = np.arange(1, m * p + 1)
    beta = np.arange(1, n * q + 1)
    ra, fa = _rf(p, alpha)
    rb, fb = _rf(q, beta)
    return DenseMatrix(a[np.ix_(fa - 1, fb - 1)] * b[np.ix_(ra - 1, rb - 1)])


def _rf(n: int, nu: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    r = nu % n
    r = np.where(r == 0, n, r)
    return r, (nu - r) // n + 1


def kronecker_blocks(A, B) -> DenseMatrix:
    """Block-copy Kronecker product (independent construction for tests)."""
    a, b = _arr(A), _arr(B)
    (m, n), (p, q) = a.shape, b.shape
    out = np.zeros((m * p, n * q), dtype=np.result_type(a, b))
    for i in range(m):
        for j in range(n):
            out[i * p:(i + 1) * p, j * q:(j + 1) * q] = a[i, j] * b
    return DenseMatrix(out)


def vec(A) -> np.ndarray:
    """Column-stacking vector: vec(A)_gamma = a_{r_m(gamma), f_m(gamma)}."""
    a = _arr(A)
    m, n = a.shape
    g = np.arange(1, m * n + 1)
    r, f = _rf(m, g)
    return a[r - 1, f - 1].copy()


def mat(x, m: int, n: int) -> DenseMatrix:
    x = np.asarray(x)
    if x.shape != (m * n,):
        raise ShapeMismatch(f"vector of length {x.size} cannot be an {m}x{n} matrix")
    i = np.arange(1, m + 1)[:, None]
    j = np.arange(1, n + 1)[None, :]
    return DenseMatrix(x[(j - 1) * m + i - 1])


def commutation(m: int, n: int) -> DenseMatrix:
    """K_{m,n} with vec_n(A^T) = K_{m,n} vec_m(A) for A of shape m x n."""
    K = np.zeros((m * n, m * n), dtype=np.int64)
    nu = np.arange(1, m * n + 1)
    r, f = _rf(n, nu)
    K[nu - 1, (r - 1) * m + f - 1] = 1
    return DenseMatrix(K)


# Walsh-Hadamard ----------------------------------------------------------------

def _b1(nu: int) -> int:
    return 1 if nu % 2 == 0 else 0


def _f2(nu: int) -> int:
    return (nu + 1) // 2


def wht_count(m: int, nu: int, mu: int) -> int:
    """N_m(nu, mu) = sum_i b_i(nu) b_i(mu), computed in m steps."""
    total = 0
    for _ in range(m):
        total += _b1(nu) * _b1(mu)
        nu, mu = _f2(nu), _f2(mu)
    return total


def wht_sign(m: int, nu: int, mu: int) -> int:
    """(-1)^{N_m(nu, mu)} for 1 <= nu, mu <= 2^m."""
    if m < 1 or not (1 <= nu <= 2**m and 1 <= mu <= 2**m):
        raise DomainError(f"index ({nu}, {mu}) outside [1, 2^{m}]")
    return -1 if wht_count(m, nu, mu) % 2 else 1


def wht_entry(m: int, nu: int, mu: int) -> float:
    return wht_sign(m, nu, mu) / math.sqrt(2.0**m)


def wht_sign_matrix(m: int) -> DenseMatrix:
    """Integer matrix sqrt(2)^m H_m."""
    if m < 1:
        raise DomainError("m must be >= 1")
    size = 2**m
    idx = np.arange(size)
    # b_i(nu) is bit (i-1) of nu-1, so N_m counts shared set bits
    shared = np.bitwise_and(idx[:, None], idx[None, :])
    parity = np.zeros_like(shared)
    for bit in range(m):
        parity ^= (shared >> bit) & 1
    return DenseMatrix(1 - 2 * parity)


_H1_OP = np.array([[-1.0, 1.0], [1.0, 1.0]]) / math.sqrt(2.0)


def wht(m: int) -> DenseMatrix:
    return DenseMatrix(wht_sign_matrix(m).data / math.sqrt(2.0**m))


def wht_op(m: int) -> DenseMatrix:
    """H_m^op = H_{m-1} (x) H_1^op, with H_1^op = R_2(i) H_1."""
    if m < 1:
        raise DomainError("m must be >= 1")
    if m == 1:
        return DenseMatrix(_H1_OP)
    return kronecker(wht(m - 1), _H1_OP)


def wht_complex(m: int) -> DenseMatrix:
    return DenseMatrix(wht(m).data + 1j * wht_op(m).data)


def a_had(m: int) -> DenseMatrix:
    """A^Had_m = H_m / sqrt(2)^{3m-2}."""
    return DenseMatrix(wht_sign_matrix(m).data / 2.0 ** (2 * m - 1))


# the (infinity, 1) norm ---------------------------------------------------------

@dataclass(frozen=True)
class NormResult:
    value: float | int | Fraction
    p: tuple
    q: tuple
    exact: bool = True
    note: str = ""

    def to_dict(self) -> dict:
        v = self.value
        return {
            "value": str(v) if isinstance(v, Fraction) else v,
            "value_float": float(v),
            "p": [_jsonable(x) for x in self.p],
            "q": [_jsonable(x) for x in self.q],
            "exact": self.exact,
            "note": self.note,
        }


def _jsonable(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("GKBOUND_THREADS", "1")))
    except ValueError:
        return 1


def _gray_scan(a: np.ndarray, low_bits: int, high_bits: int, start: int, count: int):
    """Max of ||a q||_1 over q whose high-bit Gray codes run through [start, start+count).

    Columns 0..low_bits-1 are enumerated as one matrix product; the
    remaining columns (except the last, fixed to +1) follow Gray-code order
    with a single rank-one update per step.
    """
    m, n = a.shape
    lows = ((np.arange(2**low_bits)[:, None] >> np.arange(low_bits)) & 1) if low_bits else np.zeros((1, 0), int)
    low_signs = 1 - 2 * lows  # (2^L, L)
    low_part = a[:, :low_bits] @ low_signs.T if low_bits else np.zeros((m, 1), a.dtype)
    high_cols = a[:, low_bits:n - 1]
    last = a[:, n - 1]
    gray0 = start ^ (start >> 1)
    hs = 1 - 2 * ((gray0 >> np.arange(high_bits)) & 1) if high_bits else np.zeros(0, int)
    hs = hs.astype(a.dtype)
    v = last + (high_cols @ hs if high_bits else 0)
    best, best_low, best_high = None, 0, hs.copy()
    for step in range(count):
        if step:
            g = start + step
            bit = (g & -g).bit_length() - 1  # Gray code flips the lowest set bit of g
            v = v - 2 * hs[bit] * high_cols[:, bit]
            hs[bit] = -hs[bit]
        vals = np.abs(v[:, None] + low_part).sum(axis=0)
        k = int(np.argmax(vals))
        if best is None or vals[k] > best:
            best, best_low, best_high = vals[k], k, hs.copy()
    q = np.concatenate([low_signs[best_low] if low_bits else np.zeros(0, int), best_high, [1]]).astype(int)
    return best, q


def norm_inf1_real(A, guard: int = ENUM_GUARD) -> NormResult:
    """Exact max over sign vectors q of ||A q||_1, with witnesses (p, q).

    The side with fewer columns is enumerated (2^{n-1} vectors, the last
    sign fixed by symmetry).  Integer and Fraction-free real inputs give an
    exact integer value for integer matrices.
    """
    a = _arr(A)
    if np.iscomplexobj(a):
        raise DomainError("use norm_inf1_complex_estimate for complex matrices")
    transposed = a.shape[1] > a.shape[0]
    work = a.T if transposed else a
    m, n = work.shape
    if 2 ** (n - 1) > guard:
        raise SizeGuard(f"enumeration of 2^{n - 1} sign vectors exceeds the guard {guard}")
    integer = work.dtype.kind == "i"
    work = work.astype(np.int64 if integer else float)
    low_bits = min(n - 1, 12)
    high_bits = n - 1 - low_bits
    total = 2**high_bits
    workers = min(_threads(), total)
    chunk = -(-total // workers)
    ranges = [(s, min(chunk, total - s)) for s in range(0, total, chunk)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            results = list(ex.map(lambda r: _gray_scan(work, low_bits, high_bits, *r), ranges))
    else:
        results = [_gray_scan(work, low_bits, high_bits, *r) for r in ranges]
    best, q = max(results, key=lambda t: t[0])
    v = work @ q
    p = np.where(v >= 0, 1, -1)
    value = int(best) if integer else float(best)
    p, q = tuple(int(x) for x in p), tuple(int(x) for x in q)
    if transposed:
        p, q = q, p
    return NormResult(value, p, q, exact=True)


def a_had_norm_exact(m: int) -> NormResult:
    """||A^Had_m||_{inf,1} as an exact Fraction via the integer sign matrix."""
    res = norm_inf1_real(wht_sign_matrix(m))
    return NormResult(Fraction(res.value, 2 ** (2 * m - 1)), res.p, res.q, exact=True)


def norm_inf1_complex_estimate(A, grid: int = 8, restarts: int = 64, seed: int = 0) -> NormResult:
    """Lower estimate of the complex (inf, 1) norm.

    Starts from unimodular vectors with phases on a ``grid``-point circle
    (all of them when small, random draws otherwise) and refines by
    alternating maximization.  The value is attained, hence a lower bound.
    """
    a = _arr(A).astype(complex)
    m, n = a.shape
    rng = np.random.default_rng(seed)
    phases = np.exp(2j * np.pi * np.arange(grid) / grid)
    if grid ** (n - 1) <= restarts:
        starts = [np.concatenate([[1.0], c]) for c in _product(phases, n - 1)]
    else:
        starts = [np.concatenate([[1.0], rng.choice(phases, n - 1)]) for _ in range(restarts)]
    best, bp, bq = -1.0, None, None
    for q in starts:
        q = np.asarray(q, dtype=complex)
        val = -1.0
        for _ in range(200):
            v = a @ q
            p = _unimodular(v)
            q = _unimodular(a.conj().T @ p)
            new = float(np.abs(a @ q).sum())
            if new <= val + 1e-15:
                break
            val = new
        if val > best:
            best, bq = val, q
            bp = _unimodular(a @ q)
    return NormResult(best, tuple(complex(x) for x in bp), tuple(complex(x) for x in bq), exact=False,
                      note=f"lower estimate; {grid}-point phase grid, alternating refinement")


def _unimodular(v: np.ndarray) -> np.ndarray:
    mag = np.abs(v)
    return np.where(mag > 0, v / np.where(mag > 0, mag, 1.0), 1.0)


def _product(values, k):
    if k == 0:
        yield []
        return
    for head in values:
        for tail in _product(values, k - 1):
            yield [head] + tail


# positivity ----------------------------------------------------------------------

def psd_check(A, tol: float = 1e-10) -> bool:
    """Hermitian (to tol relative) with smallest eigenvalue >= -tol*||A||."""
    a = _arr(A).astype(complex if np.iscomplexobj(_arr(A)) else float)
    if a.shape[0] != a.shape[1]:
        return False
    scale = max(np.linalg.norm(a, 2), 1e-300)
    if np.linalg.norm(a - a.conj().T, 2) > tol * scale:
        return False
    h = 0.5 * (a + a.conj().T)
    return bool(np.linalg.eigvalsh(h).min() >= -tol * scale)


def corr_check(A, tol: float = 1e-10) -> bool:
    a = _arr(A)
    if a.shape[0] != a.shape[1]:
        return False
    if np.max(np.abs(np.diag(a) - 1.0)) > tol:
        return False
    return psd_check(a, tol)


def sigma(n: int, zeta) -> DenseMatrix:
    """Sigma_{2n}(zeta) = [[I, zeta I], [conj(zeta) I, I]]."""
    if abs(zeta) > 1:
        raise DomainError("|zeta| must be <= 1")
    eye = np.eye(n)
    cplx = isinstance(zeta, complex) and zeta.imag != 0
    z = complex(zeta) if cplx else float(np.real(zeta))
    top = np.hstack([eye, z * eye])
    bottom = np.hstack([np.conj(z) * eye, eye])
    return DenseMatrix(np.vstack([top, bottom]))


def sigma_inverse(n: int, zeta) -> DenseMatrix:
    if abs(zeta) >= 1:
        raise DomainError("Sigma_2n(zeta) is singular for |zeta| = 1")
    return DenseMatrix(sigma(n, -zeta).data / (1.0 - abs(zeta) ** 2))


# functional calculus and pairings -----------------------------------------------

def entrywise_apply(fn: TruncatedSeries | Callable, A) -> DenseMatrix:
    a = _arr(A)
    if isinstance(fn, TruncatedSeries):
        s = fn.to_float() if fn.exact else fn
        return DenseMatrix(eval_series(s, a.astype(complex if np.iscomplexobj(a) else float)))
    return DenseMatrix(np.vectorize(fn, otypes=[a.dtype if np.iscomplexobj(a) else float])(a))


def delta(A) -> DenseMatrix:
    """Delta(A) = (1/2) [[0, A], [A*, 0]]."""
    a = _arr(A)
    m, n = a.shape
    top = np.hstack([np.zeros((m, m), dtype=a.dtype), a])
    bottom = np.hstack([a.conj().T, np.zeros((n, n), dtype=a.dtype)])
    return DenseMatrix(0.5 * np.vstack([top, bottom]))


def delta_pairing(A, S):
    """tr(Delta(A) S) for an (m+n)-square S; equals Re tr(A S_21) for Hermitian S."""
    d = delta(A).data
    s = _arr(S)
    if s.shape != d.shape:
        raise ShapeMismatch(f"pairing needs a {d.shape} matrix, got {s.shape}")
    val = np.trace(d @ s)
    return float(val.real) if abs(val.imag) <= 1e-12 * max(1.0, abs(val)) else complex(val)


def gram(U, V) -> DenseMatrix:
    """Gamma(u, v) = U* V for column families U, V."""
    u, v = _arr(U), _arr(V)
    if u.ndim == 1:
        u = u.reshape(1, -1)
    if v.ndim == 1:
        v = v.reshape(1, -1)
    if u.shape[0] != v.shape[0]:
        raise ShapeMismatch("column vectors must live in the same space")
    return DenseMatrix(u.conj().T @ v)


def bell_witness() -> dict:
    """Quantum value tr(A^Had_1 H_1) against the classical (inf, 1) maximum."""
    A = a_had(1)
    H = wht(1)
    quantum = float(np.trace(A.data @ H.data))
    classical = a_had_norm_exact(1)
    U = np.array([[0.0, 1.0], [1.0, 0.0]])  # columns u_1 = (0,1), u_2 = (1,0)
    V = np.array([[1.0, -1.0], [1.0, 1.0]]) / math.sqrt(2.0)
    G = gram(U, V)
    return {
        "quantum_value": quantum,
        "classical_max": float(classical.value),
        "classical_max_exact": str(classical.value),
        "ratio": quantum / float(classical.value),
        "classical_witness": {"p": list(classical.p), "q": list(classical.q)},
        "certificate": {
            "u": U.T.tolist(),
            "v": V.T.tolist(),
            "gram_error": float(np.max(np.abs(G.data - H.data))),
        },
    }


def werner_state(p: float) -> DenseMatrix:
    """Two-qubit Werner state; PSD exactly for p in [-1/3, 1]."""
    return DenseMatrix(np.array([
        [1 - p, 0, 0, 0],
        [0, 1 + p, -2 * p, 0],
        [0, -2 * p, 1 + p, 0],
        [0, 0, 0, 1 - p],
    ], dtype=float) / 4.0)


# text format -------------------------------------------------------------------

def write_matrix(A) -> str:
    a = _arr(A)
    kind = "complex" if np.iscomplexobj(a) else "real"
    lines = [f"{a.shape[0]} {a.shape[1]} {kind}"]
    for row in a:
        if kind == "complex":
            lines.append(" ".join(repr(complex(x)).strip("()") for x in row))
        else:
            lines.append(" ".join(repr(x.item()) for x in row))
    return "\n".join(lines) + "\n"


def read_matrix(text: str) -> DenseMatrix:
    tokens = text.split()
    if len(tokens) < 2:
        raise DomainError("matrix file needs a 'rows cols [real|complex]' header")
    rows, cols = int(tokens[0]), int(tokens[1])
    kind = "real"
    body = tokens[2:]
    if body and body[0] in ("real", "complex"):
        kind, body = body[0], body[1:]
    if len(body) != rows * cols:
        raise ShapeMismatch(f"expected {rows * cols} entries, found {len(body)}")
    if kind == "complex":
        vals = [complex(t.replace("i", "j")) for t in body]
        return DenseMatrix(np.array(vals, dtype=complex).reshape(rows, cols))
    try:
        vals = [int(t) for t in body]
        return DenseMatrix(np.array(vals, dtype=np.int64).reshape(rows, cols))
    except ValueError:
        return DenseMatrix(np.array([float(t) for t in body]).reshape(rows, cols))
