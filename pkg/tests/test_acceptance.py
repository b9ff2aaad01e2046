"""Acceptance criteria, one PASS/FAIL line each.

Run ``pytest tests/test_acceptance.py -v`` (lines are written straight to
the terminal) or ``python tests/test_acceptance.py``.
"""

import contextlib
import io
import json
import math
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from _oracles import bell_by_compositions, beta_table, bn_matrix, frac_det  # noqa: E402
from gkbound import ccp, matgt, verify  # noqa: E402
from gkbound.bell import (  # noqa: E402
    bell_conv,
    bell_partition_oracle,
    det_b2m1,
    invert_series_bell,
    invert_series_det,
    invert_series_odd,
)
from gkbound.cli import main  # noqa: E402
from gkbound.gaussmc import CorrelationSpec, sample_pair  # noqa: E402
from gkbound.series import TruncatedSeries, revert_oracle  # noqa: E402
from gkbound.specialfn import c_k, gaussian_norm_moment, hyp2f1  # noqa: E402

LINES: list[str] = []


def _say(line: str, capsys=None) -> None:
    LINES.append(line)
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line, end="")


def report(capsys, tag: str, ok: bool, detail: str, elapsed: float, limit: float | None = None) -> bool:
    if limit is not None:
        ok = ok and elapsed < limit
        detail += f" | {elapsed:.2f}s (< {limit:g}s)"
    else:
        detail += f" | {elapsed:.2f}s"
    _say(f"{'PASS' if ok else 'FAIL'} {tag}: {detail}", capsys)
    return ok


def _cli_json(*argv) -> dict:
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        assert main(list(argv)) == 0
    return json.loads(buf.getvalue())


def rand_q(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-9, 9), rng.randint(1, 9))


def test_c01_krivine(capsys):
    t = time.perf_counter()
    rep = _cli_json("bound", "--function", "grothendieck", "--order", "41")
    dt = time.perf_counter() - t
    kriv = math.pi / (2 * math.log(1 + math.sqrt(2)))
    e1 = abs(rep["bound"] - 1.7822139)
    e2 = abs(rep["abs_inverse_at_r"] - math.sinh(math.pi / 2))
    ok = e1 < 1e-6 and e2 < 1e-4 and abs(rep["bound"] - kriv) < 1e-6
    assert report(capsys, "C1 Krivine bound", ok,
                  f"bound={rep['bound']:.10f} (|d|={e1:.1e}), abs_inv(1)={rep['abs_inverse_at_r']:.7f} (|d|={e2:.1e})",
                  dt, 1.0)


def test_c02_haagerup_abs_inverse(capsys):
    t = time.perf_counter()
    rep = ccp.bound("haagerup", 7)
    dt = time.perf_counter() - t
    err = abs(rep.abs_inverse_at_r - 1.53655)
    assert report(capsys, "C2a Haagerup degree-7 abs-inverse at 1", err < 5e-5,
                  f"{rep.abs_inverse_at_r:.7f} vs 1.53655 (|d|={err:.1e})", dt, 1.0)


@pytest.mark.xfail(strict=True, reason="1.40449 is not the root of the order-7 polynomial; "
                   "the exact root is 1.4046904 (see the decisions ledger)")
def test_c02_haagerup_root(capsys):
    t = time.perf_counter()
    rep = ccp.bound("haagerup", 7)
    dt = time.perf_counter() - t
    inv = 1 / rep.c_star
    err = abs(inv - 1.40449)
    ok = report(capsys, "C2b Haagerup order-7 1/c*", err < 5e-5,
                f"{inv:.7f} vs 1.40449 (|d|={err:.1e}); expected FAIL, target unattainable", dt, 1.0)
    assert ok


def test_c03_kappa(capsys):
    t = time.perf_counter()
    rep = ccp.bound("kappa", 41)
    dt = time.perf_counter() - t
    closed = math.pi / (2 * math.log((1 + math.sqrt(5)) / 2))
    err = abs(rep.bound - 3.26425)
    ok = err < 1e-5 and abs(rep.bound - closed) < 1e-5
    assert report(capsys, "C3 kappa bound", ok, f"{rep.bound:.8f} vs 3.26425 (|d|={err:.1e})", dt, 1.0)


def test_c04_beta_table(capsys):
    t = time.perf_counter()
    rng = random.Random(2024)
    bad = 0
    for _ in range(50):
        a1 = rand_q(rng) or Fraction(5, 3)
        general = [Fraction(0), a1] + [rand_q(rng) for _ in range(6)]
        odd = [Fraction(0), a1] + [rand_q(rng) if n % 2 else Fraction(0) for n in range(2, 8)]
        for alphas, backends in ((general, (invert_series_bell, invert_series_det)),
                                 (odd, (invert_series_bell, invert_series_det, invert_series_odd))):
            table = beta_table([a / a1 for a in alphas[2:]])
            parity = "odd" if alphas is odd else "none"
            s = TruncatedSeries(alphas, parity)
            results = [fn(s) for fn in backends] + [revert_oracle(s)]
            for inv in results:
                bad += [inv[n] * a1**n for n in range(1, 8)] != table
    cat = invert_series_bell(TruncatedSeries([Fraction(0), Fraction(1), Fraction(1)] + [Fraction(0)] * 10))
    catalan_ok = list(cat.coeffs[1:]) == [(-1) ** (n - 1) * math.comb(2 * n - 2, n - 1) // n for n in range(1, 13)]
    dt = time.perf_counter() - t
    assert report(capsys, "C4 beta table", bad == 0 and catalan_ok,
                  f"50 general + 50 odd vectors, {bad} mismatches; signed Catalan through beta_12: {catalan_ok}",
                  dt, 10.0)


def _interleave(xs, r):
    out = []
    for x in xs[:r]:
        out += [Fraction(0), x]
    return out


def test_c05_bell_identities(capsys):
    t = time.perf_counter()
    rng = random.Random(5)
    failures = 0
    for m in range(1, 7):
        xs = [rand_q(rng) for _ in range(m)]
        for r in range(1, m + 1):
            direct = frac_det(bn_matrix(2 * m + 1, 2 * r, _interleave(xs, r)))
            bell_side = math.factorial(2 * r) * sum(
                (-1) ** l * math.comb(2 * m + l, l) * bell_partition_oracle(r, l, xs) for l in range(1, r + 1))
            failures += not (det_b2m1(m, r, xs) == direct == bell_side)
        if m >= 2:
            lhs = sum(Fraction(2 * (m - r) + 1, math.factorial(2 * r)) * xs[m - r - 1]
                      * frac_det(bn_matrix(2 * m + 1, 2 * r, _interleave(xs, r))) for r in range(1, m))
            rhs = Fraction(1, math.factorial(2 * m)) * sum(
                (-1) ** (r - 1) * Fraction(math.factorial(2 * m + r), math.factorial(r)) * bell_partition_oracle(m, r, xs)
                for r in range(2, m + 1))
            failures += lhs != rhs
    for n in range(1, 13):
        xs = [rand_q(rng) for _ in range(n)]
        a, b = rand_q(rng) or Fraction(1), rand_q(rng) or Fraction(2)
        scaled = [a * b**i * x for i, x in enumerate(xs, start=1)]
        for k in range(1, n + 1):
            val = bell_conv(n, k, xs)
            failures += bell_conv(n, k, scaled) != a**k * b**n * val
            failures += val != sum(xs[i - 1] * bell_conv(n - i, k - 1, xs) for i in range(1, n - k + 2))
            failures += n * val != k * sum(i * xs[i - 1] * bell_conv(n - i, k - 1, xs) for i in range(1, n - k + 2))
            if n <= 9:
                failures += val != bell_by_compositions(n, k, xs)
    dt = time.perf_counter() - t
    assert report(capsys, "C5 Bell identities", failures == 0, f"{failures} failures (m <= 6, n <= 12)", dt, 10.0)


def test_c06_walsh_hadamard(capsys):
    t = time.perf_counter()
    e64, e73 = matgt.wht_entry(3, 6, 4), matgt.wht_entry(3, 7, 3)
    entries = e64 == e73 == -1 / math.sqrt(8) and matgt.wht_count(3, 6, 4) == 1 == matgt.wht_count(3, 7, 3)
    ortho = max(float(np.max(np.abs(matgt.wht(m).data @ matgt.wht(m).data.T - np.eye(2**m)))) for m in range(1, 9))
    n1, n2 = matgt.a_had_norm_exact(1).value, matgt.a_had_norm_exact(2).value
    # the published m = 2 witnesses; A^Had_2 = S_2 / 8 with S_2 the integer sign matrix
    p, q = np.array([1, 1, -1, 1]), np.array([1, -1, 1, 1])
    s2 = matgt.wht_sign_matrix(2).data
    witness2 = Fraction(int(q @ s2 @ p), 8)
    witness1 = Fraction(int(np.ones(2) @ matgt.wht_sign_matrix(1).data @ np.ones(2)), 2)
    dt = time.perf_counter() - t
    ok = entries and ortho < 1e-12 and n1 == n2 == 1 and witness1 == witness2 == 1
    assert report(capsys, "C6 Walsh-Hadamard", ok,
                  f"(H3)_64=(H3)_73={e64:.6f}, orthogonality err {ortho:.1e} (m <= 8), "
                  f"norms {n1}, {n2}, witness values {witness1}, {witness2}", dt, 5.0)


def test_c07_bell_violation(capsys):
    t = time.perf_counter()
    w = matgt.bell_witness()
    quantum = float(np.trace(matgt.a_had(1).data @ matgt.wht(1).data))
    classical = matgt.a_had_norm_exact(1).value
    dt = time.perf_counter() - t
    ok = abs(quantum - math.sqrt(2)) < 1e-12 and abs(w["quantum_value"] - math.sqrt(2)) < 1e-12 and classical == 1
    assert report(capsys, "C7 Bell violation", ok, f"tr(A1 H1)={quantum:.15f}, classical max={classical}", dt, 1.0)


def test_c08_special_values(capsys):
    t = time.perf_counter()
    errs = {
        "kR": (abs(hyp2f1(0.5, 0.5, 1.5, 1.0) - math.pi / 2), 1e-12),
        "kC": (abs(hyp2f1(0.5, 0.5, 2.0, 1.0) - 4 / math.pi), 1e-12),
        "c1^2": (abs(c_k(1) ** 2 - 2 / math.pi), 1e-14),
        "c2^2": (abs(c_k(2) ** 2 - math.pi / 4), 1e-14),
        "E|X|": (abs(gaussian_norm_moment(1, 1) - math.sqrt(2 / math.pi)), 1e-14),
        "E|Z|": (abs(gaussian_norm_moment(1, 1, "complex") - math.sqrt(math.pi) / 2), 1e-14),
    }
    dt = time.perf_counter() - t
    ok = all(e <= tol for e, tol in errs.values())
    assert report(capsys, "C8 special values", ok, ", ".join(f"{k} err {e:.1e}" for k, (e, _) in errs.items()), dt)


def test_c09_mc_equivalence(capsys):
    t = time.perf_counter()
    checks = [c for c in verify.mc_suite(seed=7, samples=10**6) if not c.name.startswith("mc.gaussian_df")]
    dt = time.perf_counter() - t
    failed = [c.name for c in checks if not c.passed]
    worst = min(c.margin for c in checks)
    assert report(capsys, "C9 MC equivalence", not failed,
                  f"{len(checks)} checks at n=1e6, failed={failed or 'none'}, smallest margin {worst:.1e}", dt, 60.0)


def test_c10_schur_suite(capsys):
    t = time.perf_counter()
    rng = np.random.default_rng(10)
    worst_prod = math.inf
    for _ in range(200):
        n = int(rng.integers(2, 7))
        a, b = rng.standard_normal((n, n)), rng.standard_normal((n, n))
        prod = matgt.hadamard(a @ a.T, b @ b.T).data
        worst_prod = min(worst_prod, float(np.linalg.eigvalsh(prod)[0] / max(1.0, np.abs(prod).max())))
    worst_img, corr_ok = math.inf, True
    for name in ("grothendieck", "haagerup", "fk(3)", "kappa"):
        d = ccp.catalog(name)
        for _ in range(50):
            n = int(rng.integers(2, 7))
            u = rng.standard_normal((n, n + 2))
            u /= np.linalg.norm(u, axis=1, keepdims=True)
            c = np.clip(u @ u.T, -1, 1)
            np.fill_diagonal(c, 1.0)
            img = matgt.entrywise_apply(d.closed_form, c).data
            worst_img = min(worst_img, float(np.linalg.eigvalsh(img)[0]))
            corr_ok &= matgt.corr_check(img)
    dt = time.perf_counter() - t
    ok = worst_prod >= -1e-10 and worst_img >= -1e-10 and corr_ok
    assert report(capsys, "C10 Schoenberg/Schur suite", ok,
                  f"200 products, min eig {worst_prod:.1e}; 200 CCP images, min eig {worst_img:.1e}, "
                  f"all correlation matrices: {corr_ok}", dt, 20.0)


def _orthant(t):
    t = np.asarray(t, dtype=float)
    return lambda x: np.all(np.asarray(x).reshape(len(x), -1) <= t, axis=1).astype(float)


def test_c11_gaussian_df(capsys):
    t = time.perf_counter()
    half = ccp.gaussian_df_series(0.5, [0.0], [0.0])
    rng = np.random.default_rng(11)
    worst, ok = math.inf, abs(half - 1 / 3) < 1e-10
    for i in range(6):
        k = 1 + i % 2
        a, b = rng.uniform(-1, 1, k), rng.uniform(-1, 1, k)
        rho = float(rng.uniform(-0.8, 0.8))
        est = sample_pair(CorrelationSpec(k, rho), _orthant(a), _orthant(b), n=10**6, seed=100 + i)
        err = abs(est.mean - ccp.gaussian_df_series(rho, a, b, k))
        worst = min(worst, 3 * est.stderr - err)
        ok &= err <= 3 * est.stderr
    dt = time.perf_counter() - t
    assert report(capsys, "C11 Gaussian-df series", ok,
                  f"k=1 a=b=0 rho=1/2: {half:.12f}; 6 random cases vs MC, smallest 3-sigma margin {worst:.1e}", dt)


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_c")]
    for fn in tests:
        try:
            fn(None)
        except AssertionError:
            pass
    print(f"{sum(line.startswith('PASS') for line in LINES)}/{len(LINES)} lines PASS")
