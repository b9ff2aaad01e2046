"""Gaussian Monte-Carlo and quadrature oracles.

Randomness comes from numpy's counter-based Philox bit generator.  Normal
variates are produced by the Marsaglia polar method from Philox uniforms,
so the whole path is under this module's control.  A sample budget is cut
into fixed-size streams keyed by (seed, stream index); streams may run on
several threads (GKBOUND_THREADS) and are merged in index order, so an
estimate never depends on the worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import BoundaryRho, DomainError
from .specialfn import HalfInt, gamma_half

__all__ = [
    "McEstimate",
    "CorrelationSpec",
    "STREAM_SIZE",
    "standard_normals",
    "sample_pair",
    "sample_complex",
    "mehler_quad",
    "half_range_gauss",
    "sphere_moment",
    "sphere_moment_exact",
    "sphere_correlation_mc",
    "stein_check",
    "SteinResult",
    "complex_sign",
    "unit_vector",
]

STREAM_SIZE = 1 << 17


@dataclass(frozen=True)
class McEstimate:
    mean: float | complex
    stderr: float
    samples: int
    seed: int

    def to_dict(self) -> dict:
        m = self.mean
        mean = [m.real, m.imag] if isinstance(m, complex) else m
        return {"mean": mean, "stderr": self.stderr, "samples": self.samples, "seed": self.seed}

    def within(self, target, sigmas: float = 3.0, slack: float = 0.0) -> bool:
        return abs(self.mean - target) <= sigmas * self.stderr + slack


@dataclass(frozen=True)
class CorrelationSpec:
    k: int
    rho_or_zeta: float | complex

    def __post_init__(self):
        if self.k < 1:
            raise DomainError("dimension k must be >= 1")
        if abs(self.rho_or_zeta) > 1 + 1e-15:
            raise DomainError("correlation must lie in the closed unit disk")


# random streams ------------------------------------------------------------------

def _generator(seed: int, stream: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=(int(stream),))
    return np.random.Generator(np.random.Philox(ss))


def standard_normals(rng: np.random.Generator, size: int) -> np.ndarray:
    """Marsaglia polar method: accepted (u, v) in the unit disk give two normals."""
    out = np.empty(size)
    filled = 0
    while filled < size:
        need = size - filled
        batch = int(need / 2 / 0.785) + 16
        u = rng.random(batch) * 2.0 - 1.0
        v = rng.random(batch) * 2.0 - 1.0
        s = u * u + v * v
        ok = (s > 0.0) & (s < 1.0)
        u, v, s = u[ok], v[ok], s[ok]
        f = np.sqrt(-2.0 * np.log(s) / s)
        pairs = np.empty(2 * u.size)
        pairs[0::2] = u * f
        pairs[1::2] = v * f
        take = min(need, pairs.size)
        out[filled:filled + take] = pairs[:take]
        filled += take
    return out


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("GKBOUND_THREADS", "1")))
    except ValueError:
        return 1


def _moments(values: np.ndarray) -> tuple[int, complex | float, float]:
    n = values.size
    mean = values.mean()
    dev = values - mean
    m2 = float(np.sum((dev * np.conj(dev)).real))
    return n, mean, m2


def _merge(parts) -> tuple[int, complex | float, float]:
    n, mean, m2 = 0, 0.0, 0.0
    for nb, mb, m2b in parts:
        if n == 0:
            n, mean, m2 = nb, mb, m2b
            continue
        tot = n + nb
        delta = mb - mean
        mean = mean + delta * nb / tot
        m2 = m2 + m2b + abs(delta) ** 2 * n * nb / tot
        n = tot
    return n, mean, m2


def _run_streams(n: int, seed: int, kernel: Callable[[np.random.Generator, int], np.ndarray]) -> McEstimate:
    if n < 1:
        raise DomainError("need at least one sample")
    sizes = [min(STREAM_SIZE, n - s) for s in range(0, n, STREAM_SIZE)]

    def job(idx: int):
        return _moments(kernel(_generator(seed, idx), sizes[idx]))

    workers = min(_threads(), len(sizes))
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(job, range(len(sizes))))
    else:
        parts = [job(i) for i in range(len(sizes))]
    total, mean, m2 = _merge(parts)
    var = m2 / (total - 1) if total > 1 else 0.0
    mean = complex(mean) if np.iscomplexobj(mean) else float(mean)
    return McEstimate(mean, math.sqrt(var / total), total, int(seed))


def _shape(z: np.ndarray, k: int) -> np.ndarray:
    return z if k > 1 else z[:, 0]


# sampling oracles ---------------------------------------------------------------

def sample_pair(spec: CorrelationSpec, f: Callable, g: Callable | None = None,
                n: int = 10**6, seed: int = 0) -> McEstimate:
    """Estimate E[f(X) g(Y)] with Y = rho X + sqrt(1 - rho^2) Z.

    f and g receive an array of shape (count,) when k = 1 and
    (count, k) otherwise, and return one value per row.
    """
    g = f if g is None else g
    rho = float(np.real(spec.rho_or_zeta))
    k = spec.k
    s = math.sqrt(max(0.0, 1.0 - rho * rho))

    def kernel(rng, count):
        w = standard_normals(rng, 2 * k * count).reshape(count, 2 * k)
        x, z = w[:, :k], w[:, k:]
        y = rho * x + s * z
        return np.asarray(f(_shape(x, k)), dtype=float) * np.asarray(g(_shape(y, k)), dtype=float)

    return _run_streams(n, seed, kernel)


def sample_complex(spec: CorrelationSpec, b: Callable, n: int = 10**6, seed: int = 0,
                   b2: Callable | None = None) -> McEstimate:
    """Estimate E[b(Z) conj(b2(W))] for complex Gaussians with E[Z conj(W)] = zeta.

    A real 4k-vector with covariance Sigma_4k(|zeta|) is sampled and mapped
    to (Z', W) in C^k x C^k; Z = sign(zeta) Z' then carries the phase.
    """
    b2 = b if b2 is None else b2
    zeta = complex(spec.rho_or_zeta)
    k = spec.k
    r = abs(zeta)
    phase = zeta / r if r > 0 else 1.0
    s = math.sqrt(max(0.0, 1.0 - r * r))

    def kernel(rng, count):
        w = standard_normals(rng, 4 * k * count).reshape(count, 4 * k)
        x, z = w[:, :2 * k], w[:, 2 * k:]
        y = r * x + s * z
        zc = (x[:, :k] + 1j * x[:, k:]) / math.sqrt(2.0) * phase
        wc = (y[:, :k] + 1j * y[:, k:]) / math.sqrt(2.0)
        return np.asarray(b(_shape(zc, k)), dtype=complex) * np.conj(np.asarray(b2(_shape(wc, k)), dtype=complex))

    return _run_streams(n, seed, kernel)


def complex_sign(z):
    z = np.asarray(z, dtype=complex)
    mag = np.abs(z)
    return np.where(mag > 0, z / np.where(mag > 0, mag, 1.0), 0.0)


def unit_vector(x):
    """x / ||x|| row-wise (zero rows stay zero)."""
    x = np.asarray(x)
    if x.ndim == 1:
        return np.sign(x)
    nrm = np.linalg.norm(x, axis=1, keepdims=True)
    return np.where(nrm > 0, x / np.where(nrm > 0, nrm, 1.0), 0.0)


# quadrature -----------------------------------------------------------------------

@lru_cache(maxsize=None)
def half_range_gauss(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss rule for the weight phi(x) on [0, inf); weights sum to 1/2.

    Recurrence coefficients come from the discretized Stieltjes procedure
    on a fine Gauss-Legendre grid over [0, 14].
    """
    t, wt = np.polynomial.legendre.leggauss(4000)
    x = 7.0 * (t + 1.0)
    w = 7.0 * wt * np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
    alpha = np.zeros(order)
    beta = np.zeros(order)
    p_prev = np.zeros_like(x)
    p = np.ones_like(x)
    norm_prev = 1.0
    for j in range(order):
        norm = np.sum(w * p * p)
        alpha[j] = np.sum(w * x * p * p) / norm
        beta[j] = norm / norm_prev if j else norm
        p_prev, p = p, (x - alpha[j]) * p - (beta[j] if j else 0.0) * p_prev
        norm_prev = norm
    J = np.diag(alpha) + np.diag(np.sqrt(beta[1:]), 1) + np.diag(np.sqrt(beta[1:]), -1)
    nodes, vecs = np.linalg.eigh(J)
    weights = beta[0] * vecs[0, :] ** 2
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def mehler_quad(f: Callable, g: Callable, rho: float, order: int = 64) -> float:
    """Deterministic E[f(X) g(Y)] for k = 1.

    Integrates f(x) g(y) against the Mehler kernel, i.e. the density of
    (X, Y) relative to the product of standard normals, with a tensor
    rule of ``order`` nodes per axis (half on each side of zero, so jumps
    at the origin are integrated exactly).
    """
    rho = float(rho)
    if abs(rho) >= 1.0:
        raise BoundaryRho("the Mehler kernel degenerates at |rho| = 1")
    h, wh = half_range_gauss(order // 2)
    nodes = np.concatenate([-h[::-1], h])
    weights = np.concatenate([wh[::-1], wh])
    X, Y = np.meshgrid(nodes, nodes, indexing="ij")
    q = 1.0 - rho * rho
    kernel = np.exp(-(rho * rho * (X * X + Y * Y) - 2.0 * rho * X * Y) / (2.0 * q)) / math.sqrt(q)
    fx = np.asarray(f(nodes), dtype=float)
    gy = np.asarray(g(nodes), dtype=float)
    return float(np.einsum("i,j,i,j,ij->", weights, weights, fx, gy, kernel))


# spheres and Stein identities ---------------------------------------------------------

def sphere_moment_exact(n: int, m: int) -> float:
    """Integral of (x^T u)^m over the unit sphere in R^n (normalized measure)."""
    if m % 2:
        return 0.0
    return gamma_half(HalfInt(m + 1)) * gamma_half(HalfInt(n)) / (math.sqrt(math.pi) * gamma_half(HalfInt(m + n)))


def sphere_moment(n: int, m: int, samples: int = 10**6, seed: int = 0) -> McEstimate:
    """MC estimate of E[U_1^m] for U uniform on the unit sphere of R^n."""

    def kernel(rng, count):
        x = standard_normals(rng, n * count).reshape(count, n)
        u = x[:, 0] / np.linalg.norm(x, axis=1)
        return u**m

    return _run_streams(samples, seed, kernel)


def sphere_correlation_mc(m: int, n: int, rho: float, samples: int = 10**6, seed: int = 0) -> McEstimate:
    """MC estimate of E[<X/|X|, Y/|Y|>^m] with Y = rho X + sqrt(1-rho^2) Z in R^n."""
    if abs(rho) > 1:
        raise DomainError("need |rho| <= 1")
    s = math.sqrt(1.0 - rho * rho)

    def kernel(rng, count):
        w = standard_normals(rng, 2 * n * count).reshape(count, 2 * n)
        x, z = w[:, :n], w[:, n:]
        y = rho * x + s * z
        ip = np.sum(unit_vector(x) * unit_vector(y), axis=1)
        return ip**m

    return _run_streams(samples, seed, kernel)


@dataclass(frozen=True)
class SteinResult:
    lhs: McEstimate
    rhs: McEstimate
    difference: float
    joint_stderr: float

    def consistent(self, sigmas: float = 3.0) -> bool:
        return abs(self.difference) <= sigmas * self.joint_stderr


def stein_check(f: Callable, rho: float, n: int = 10**6, seed: int = 0,
                df: Callable | None = None) -> SteinResult:
    """Compare E[f(X) Y] with rho E[f'(X)] on independent streams.

    Without ``df`` the derivative is a central difference with step 1e-5.
    """
    if df is None:
        def df(x, _h=1e-5):
            return (f(x + _h) - f(x - _h)) / (2 * _h)

    lhs = sample_pair(CorrelationSpec(1, rho), f, lambda y: y, n, seed)
    rhs_raw = sample_pair(CorrelationSpec(1, 0.0), df, lambda y: np.ones_like(y), n, seed + 1)
    rhs = McEstimate(rho * rhs_raw.mean, abs(rho) * rhs_raw.stderr, rhs_raw.samples, rhs_raw.seed)
    return SteinResult(lhs, rhs, lhs.mean - rhs.mean, math.hypot(lhs.stderr, rhs.stderr))
