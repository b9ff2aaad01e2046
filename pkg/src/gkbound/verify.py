"""Self-check suites behind ``gkbound verify``.

Each check reports a margin: tolerance minus observed error, so a
positive margin passes.  Checks are independent and deterministic given
the seed.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import ccp, matgt
from .bell import invert_standardized
from .errors import SignConditionUnverified
from .gaussmc import CorrelationSpec, complex_sign, sample_complex, sample_pair
from .series import TruncatedSeries, eval_series, revert_oracle
from .specialfn import c_k, hyp2f1

SUITES = ("series", "mc", "matrix")
MC_RHOS = (-0.9, -0.5, 0.1, 0.5, 0.9)
MC_ZETAS = (0.5j, -0.7, 0.3 + 0.4j)
MC_CATALOG = ("grothendieck", "haagerup", "fk(3)", "kappa")


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    margin: float
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "margin": self.margin, "detail": self.detail}


def _within(name: str, value, target, tol: float, detail: str = "") -> Check:
    err = abs(value - target)
    return Check(name, bool(err <= tol), float(tol - err), detail or f"value={value!r} target={target!r}")


def _flag(name: str, ok: bool, detail: str = "") -> Check:
    return Check(name, bool(ok), 1.0 if ok else -1.0, detail)


# series -------------------------------------------------------------------------------

def _random_rational(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-9, 9), rng.randint(1, 9))


def series_suite(seed: int) -> list[Check]:
    rng = random.Random(seed)
    out = []

    catalan = [Fraction((-1) ** (n - 1) * math.comb(2 * n - 2, n - 1), n) for n in range(1, 13)]
    for backend in ("bell", "det", "oracle"):
        beta = invert_standardized([Fraction(1), Fraction(1)] + [Fraction(0)] * 10, 12, backend)
        out.append(_flag(f"series.catalan.{backend}", beta[1:] == catalan))

    agree = True
    for _ in range(20):
        xs = [Fraction(1)] + [_random_rational(rng) for _ in range(8)]
        ref = invert_standardized(xs, 9, "oracle")
        agree &= all(invert_standardized(xs, 9, b) == ref for b in ("bell", "det"))
        odd = [Fraction(1) if n == 0 else (_random_rational(rng) if n % 2 == 0 else Fraction(0)) for n in range(9)]
        agree &= invert_standardized(odd, 9, "odd") == invert_standardized(odd, 9, "oracle")
    out.append(_flag("series.backends_agree_exact", agree, "20 random rational vectors, N = 9"))

    s = TruncatedSeries([Fraction(0), Fraction(1), Fraction(1)] + [Fraction(0)] * 6)
    g = revert_oracle(s, 8)
    out.append(_flag("series.oracle_catalan", list(g.coeffs[1:]) == catalan[:8]))

    kriv = ccp.bound("grothendieck", 41)
    out.append(_within("series.bound.grothendieck", kriv.bound, math.pi / (2 * math.log1p(math.sqrt(2))), 1e-6))
    out.append(_within("series.abs_inverse.grothendieck", kriv.abs_inverse_at_r, math.sinh(math.pi / 2), 1e-4))
    haag = ccp.bound("haagerup", 7)
    out.append(_within("series.abs_inverse.haagerup_deg7", haag.abs_inverse_at_r,
                       4 / math.pi + 8 / math.pi**3 + 16 / math.pi**7, 1e-12))
    kap = ccp.bound("kappa", 41)
    out.append(_within("series.bound.kappa", kap.bound, math.pi / (2 * math.log((1 + math.sqrt(5)) / 2)), 1e-6))

    for name, ref in (("grothendieck", kriv), ("kappa", kap)):
        d = ccp.catalog(name)
        hyp = ccp.hyp_transform_sign_route(ccp.h_series(d, 100001), descriptor=d)
        val = ccp.alternating_boundary_value(hyp.coeffs)
        out.append(_within(f"series.hyp_consistency.{name}", val, ref.c_star, 1e-10))
    try:
        ccp.hyp_transform_sign_route(ccp.h_series(ccp.catalog("haagerup"), 7))
        out.append(_flag("series.sign_condition.haagerup_rejected", False))
    except SignConditionUnverified:
        out.append(_flag("series.sign_condition.haagerup_rejected", True))

    grid = np.linspace(0.01, 0.99, 99)
    for name in ("grothendieck", "haagerup", "fk(2)", "fk(3)", "kappa"):
        d = ccp.catalog(name)
        h = ccp.h_series(d, 41)
        gap = float(np.min(grid - np.array([eval_series(h, x) for x in grid])))
        out.append(Check(f"series.schwarz.{d.name}", gap > 0 and d.leading < 1, gap, "min rho - h(rho) on (0,1)"))
        ceiling = 2 / math.pi * (2.0 if d.field == "complex" else d.sup_norm_sq)
        out.append(Check(f"series.derivative_ceiling.{d.name}", d.leading <= ceiling, ceiling - d.leading,
                         "complex entries use their real f_2 realization (sup^2 = 2)" if d.field == "complex" else ""))
        rep = ccp.ccp_check(h, d.l2_norm_sq)
        out.append(_flag(f"series.ccp_check.{d.name}", rep.passed, rep.message))
    for name, ref in (("grothendieck", kriv), ("kappa", kap)):
        d = ccp.catalog(name)
        out.append(Check(f"series.psi_hyp_below_derivative.{name}", ref.c_star <= d.leading < 1,
                         d.leading - ref.c_star))

    fk2, haa = ccp.catalog("fk(2)"), ccp.catalog("haagerup")
    out.append(_flag("series.fk2_equals_haagerup", all(fk2.ratio(n) == haa.ratio(n) for n in range(60))))
    out.append(_within("series.little_gt.real", hyp2f1(0.5, 0.5, 1.5, 1.0), math.pi / 2, 1e-12))
    out.append(_within("series.little_gt.complex", hyp2f1(0.5, 0.5, 2.0, 1.0), 4 / math.pi, 1e-12))
    out.append(_within("series.c1_squared", c_k(1) ** 2, 2 / math.pi, 1e-14))
    out.append(_within("series.c2_squared", c_k(2) ** 2, math.pi / 4, 1e-14))
    return out


# Monte Carlo -------------------------------------------------------------------------

def _tail(d: ccp.CcpDescriptor, h: TruncatedSeries, rho: float) -> float:
    # nonnegative coefficients summing to r: the dropped part is at most (r - S) |rho|^(N+1)
    return max(0.0, d.l2_norm_sq - math.fsum(h.coeffs)) * abs(rho) ** (h.order + 1)


def mc_suite(seed: int, samples: int = 10**6) -> list[Check]:
    out = []
    stream = 0
    for name in MC_CATALOG:
        d = ccp.catalog(name)
        h = ccp.h_series(d, 41)
        for rho in MC_RHOS:
            est = sample_pair(CorrelationSpec(d.k, rho), d.sampler, n=samples, seed=seed + stream)
            stream += 1
            target = eval_series(h, rho)
            tol = 3 * est.stderr + _tail(d, h, rho)
            out.append(_within(f"mc.h.{d.name}.rho={rho:+.1f}", est.mean, target, tol,
                               f"mc={est.mean:.6f} stderr={est.stderr:.2e} series={target:.6f}"))
    for zeta in MC_ZETAS:
        est = sample_complex(CorrelationSpec(1, zeta), complex_sign, n=samples, seed=seed + stream)
        stream += 1
        target = ccp.haagerup_eval(zeta)
        out.append(_within(f"mc.haagerup_complex.zeta={zeta}", est.mean, target, 3 * est.stderr,
                           f"mc={est.mean:.6f} stderr={est.stderr:.2e}"))
    rng = np.random.default_rng(seed)
    for i in range(4):
        k = 1 + i % 2
        a, b = rng.uniform(-1, 1, k), rng.uniform(-1, 1, k)
        rho = float(rng.uniform(-0.8, 0.8))
        est = sample_pair(CorrelationSpec(k, rho), _lower_orthant(a), _lower_orthant(b), n=samples,
                          seed=seed + stream)
        stream += 1
        target = ccp.gaussian_df_series(rho, a, b, k)
        out.append(_within(f"mc.gaussian_df.case{i}", est.mean, target, 3 * est.stderr,
                           f"k={k} rho={rho:.3f} mc={est.mean:.6f} series={target:.6f}"))
    return out


def _lower_orthant(t: np.ndarray) -> Callable:
    t = np.asarray(t, dtype=float)

    def f(x):
        x = np.asarray(x)
        return np.all(x.reshape(len(x), -1) <= t, axis=1).astype(float)

    return f


# matrices ----------------------------------------------------------------------------

def _random_correlation(rng: np.random.Generator, n: int) -> np.ndarray:
    u = rng.standard_normal((n, n + 2))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    c = np.clip(u @ u.T, -1.0, 1.0)
    np.fill_diagonal(c, 1.0)
    return c


def matrix_suite(seed: int) -> list[Check]:
    out = []
    worst = max(float(np.max(np.abs(matgt.wht(m).data @ matgt.wht(m).data.T - np.eye(2**m)))) for m in range(1, 9))
    out.append(_within("matrix.wht_orthogonal", worst, 0.0, 1e-12, "m <= 8"))
    out.append(_within("matrix.wht_entry_6_4", matgt.wht_entry(3, 6, 4), -1 / math.sqrt(8), 1e-15))
    out.append(_within("matrix.wht_entry_7_3", matgt.wht_entry(3, 7, 3), -1 / math.sqrt(8), 1e-15))
    for m in (1, 2):
        res = matgt.a_had_norm_exact(m)
        out.append(_flag(f"matrix.a_had_norm.m={m}", res.value == 1, f"value={res.value}"))
    w = matgt.bell_witness()
    out.append(_within("matrix.bell_witness.quantum", w["quantum_value"], math.sqrt(2), 1e-12))
    out.append(_flag("matrix.bell_witness.classical", w["classical_max_exact"] == "1"))

    rng = np.random.default_rng(seed)
    worst = math.inf
    for _ in range(200):
        n = int(rng.integers(2, 7))
        a, b = rng.standard_normal((n, n)), rng.standard_normal((n, n))
        prod = matgt.hadamard(a @ a.T, b @ b.T).data
        worst = min(worst, float(np.linalg.eigvalsh(prod)[0] / max(1.0, np.abs(prod).max())))
    out.append(Check("matrix.schur_product_psd", worst >= -1e-10, worst + 1e-10, "200 random pairs, n <= 6"))

    worst = math.inf
    for name in ("grothendieck", "haagerup", "kappa"):
        h = ccp.h_series(ccp.catalog(name), 41)
        for _ in range(30):
            c = _random_correlation(rng, int(rng.integers(2, 7)))
            img = matgt.entrywise_apply(lambda x, d=ccp.catalog(name): d.closed_form(x), c).data
            worst = min(worst, float(np.linalg.eigvalsh(img)[0]))
            # truncated series images keep PSD but have diagonal h_N(1) < 1 until rescaled
            worst = min(worst, float(np.linalg.eigvalsh(matgt.entrywise_apply(h, c).data)[0]))
    out.append(Check("matrix.ccp_images_psd", worst >= -1e-10, worst + 1e-10, "catalog images of correlation matrices"))
    return out


def run(suite: str, seed: int, samples: int = 10**6) -> list[Check]:
    if suite not in SUITES + ("all",):
        raise ValueError(f"unknown suite {suite!r}")
    jobs: dict[str, Callable[[], list[Check]]] = {
        "series": lambda: series_suite(seed),
        "mc": lambda: mc_suite(seed, samples),
        "matrix": lambda: matrix_suite(seed),
    }
    names = SUITES if suite == "all" else (suite,)
    with ThreadPoolExecutor(len(names)) as ex:
        results = list(ex.map(lambda n: jobs[n](), names))
    return sorted((c for r in results for c in r), key=lambda c: c.name)
