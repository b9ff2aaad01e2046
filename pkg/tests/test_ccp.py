import json
import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import special, stats
from scipy.optimize import brentq

from gkbound import ccp
from gkbound.errors import DomainError, NoRootInRange, SignConditionUnverified
from gkbound.series import TruncatedSeries, eval_series

KRIVINE = math.pi / (2 * math.log(1 + math.sqrt(2)))


def test_catalog_leading_coefficients():
    assert ccp.catalog("grothendieck").leading == pytest.approx(2 / math.pi, abs=1e-15)
    assert ccp.catalog("haagerup").leading == pytest.approx(math.pi / 4, abs=1e-15)
    assert ccp.catalog("kappa").leading == pytest.approx(3 / math.pi, abs=1e-15)
    assert ccp.catalog("fk(1)").leading == pytest.approx(2 / math.pi, abs=1e-15)


def test_name_parsing():
    for spelling in ("fk(3)", "fk:3", "fk3", " FK(3) "):
        assert ccp.catalog(spelling).name == "fk(3)"
    assert ccp.catalog("fk", k=4).sup_norm_sq == 4
    with pytest.raises(DomainError):
        ccp.catalog("fk")
    with pytest.raises(DomainError):
        ccp.catalog("nonsense")


@pytest.mark.parametrize("name,ref", [
    ("grothendieck", lambda x: 2 / math.pi * math.asin(x)),
    ("kappa", lambda x: 6 / math.pi * math.asin(x / 2)),
    ("haagerup", lambda x: math.pi / 4 * x * special.hyp2f1(0.5, 0.5, 2, x * x)),
    ("fk(3)", lambda x: 2 / 3 * (math.gamma(2) / math.gamma(1.5)) ** 2 * x * special.hyp2f1(0.5, 0.5, 2.5, x * x)),
])
def test_series_matches_closed_form(name, ref):
    h = ccp.h_series(ccp.catalog(name), 41)
    for x in (-0.6, 0.2, 0.5):
        assert eval_series(h, x) == pytest.approx(ref(x), abs=1e-12)
    assert ccp.catalog(name).closed_form(0.5) == pytest.approx(ref(0.5), abs=1e-12)


def test_grothendieck_maclaurin_against_arcsin_taylor():
    h = ccp.h_series(ccp.catalog("grothendieck"), 7)
    # arcsin x = x + x^3/6 + 3x^5/40 + 5x^7/112
    assert h.coeffs == pytest.approx([0, 2 / math.pi, 0, 1 / (3 * math.pi), 0, 3 / (20 * math.pi), 0, 5 / (56 * math.pi)])


def test_ratios_are_exact_and_consistent_with_floats():
    for name in ccp.CATALOG_NAMES[:2] + ("fk(3)", "kappa"):
        d = ccp.catalog(name)
        fl = d.floats(15)
        for nu in range(1, 16):
            assert isinstance(d.ratio(nu), Fraction)
            assert float(d.ratio(nu)) == pytest.approx(fl[nu] / d.leading, rel=1e-13, abs=1e-300)


def test_fk2_is_haagerup_on_the_real_line():
    a, b = ccp.catalog("fk(2)"), ccp.catalog("haagerup")
    assert all(a.ratio(nu) == b.ratio(nu) for nu in range(1, 30))
    assert a.leading == pytest.approx(b.leading, rel=1e-15)


def test_ccp_check_catalog():
    for name in ("grothendieck", "haagerup", "fk(2)", "fk(3)", "kappa"):
        rep = ccp.ccp_check(ccp.h_series(ccp.catalog(name), 41))
        assert rep.passed, (name, rep)


def test_ccp_check_rejects():
    neg = ccp.ccp_check(TruncatedSeries([0.0, 1.2, 0.0, -0.2]))
    assert not neg.passed and neg.first_violation == 3
    over = ccp.ccp_check(TruncatedSeries([0.0, 0.7, 0.5]))
    assert not over.passed and over.first_violation == 2
    short = ccp.ccp_check(TruncatedSeries([0.0, 0.5, 0.0]), tail_bound=0.1)
    assert not short.passed
    assert ccp.ccp_check(TruncatedSeries([0.0, 0.5, 0.5])).passed


def test_inverse_sign_condition():
    assert ccp.inverse_sign_condition([0, 1, 0, -1, 0, 1]) is None
    assert ccp.inverse_sign_condition([0, 1, 0, -1, 0, -1]) == 5
    assert ccp.inverse_sign_condition([0, 1, 0, 0]) == 3


def test_hyp_route_reproduces_cstar():
    for name, ref in (("grothendieck", 2 / math.pi * math.asinh(1)), ("kappa", 6 / math.pi * math.asinh(0.5))):
        d = ccp.catalog(name)
        psi = ccp.hyp_transform_sign_route(ccp.h_series(d, 200001), descriptor=d, check_order=41)
        assert ccp.alternating_boundary_value(np.array(psi.coeffs)) == pytest.approx(ref, abs=1e-12)


def test_hyp_route_rejects_haagerup():
    d = ccp.catalog("haagerup")
    with pytest.raises(SignConditionUnverified):
        ccp.hyp_transform_sign_route(ccp.h_series(d, 41), descriptor=d)
    with pytest.raises(DomainError):
        ccp.hyp_transform_sign_route(TruncatedSeries([0.0, 1.0, 1.0]))


def test_find_cstar_and_psi_hyp():
    lin = TruncatedSeries([0.0, 2.0])
    assert ccp.find_cstar(lin) == pytest.approx(0.5, abs=1e-13)
    sinh = ccp.abs_inverse("grothendieck", 41)
    for y in (0.3, 1.0, 2.0):
        assert ccp.psi_hyp(sinh, y) == pytest.approx(2 / math.pi * math.asinh(y), abs=1e-12)
    assert ccp.psi_hyp(sinh, -0.3) == -ccp.psi_hyp(sinh, 0.3)
    with pytest.raises(NoRootInRange):
        ccp.find_cstar(TruncatedSeries([0.0, 0.5]))
    with pytest.raises(DomainError):
        ccp.find_cstar(TruncatedSeries([0.0, 2.0, -1.0]))


@pytest.mark.parametrize("backend", ["bell", "det", "oracle", "odd"])
def test_krivine_bound_every_backend(backend):
    rep = ccp.bound("grothendieck", 41, backend)
    assert rep.bound == pytest.approx(KRIVINE, abs=1e-12)
    assert rep.abs_inverse_at_r == pytest.approx(math.sinh(math.pi / 2), abs=1e-12)
    assert rep.route == "sign-condition-hyp"
    assert rep.notes[0] == "order-41 estimate, not certified"


def test_kappa_bound():
    rep = ccp.bound("kappa")
    assert rep.bound == pytest.approx(math.pi / (2 * math.log((1 + math.sqrt(5)) / 2)), abs=1e-10)
    assert rep.c_star == pytest.approx(6 / math.pi * math.asinh(0.5), abs=1e-12)


def test_haagerup_bound_and_flags():
    rep = ccp.bound("haagerup", 7)
    assert rep.route == "invert-abs-root"
    # root of (4/pi)s + (8/pi^3)s^3 + (16/pi^7)s^7 = 1, solved independently
    root = brentq(lambda s: 4 / math.pi * s + 8 / math.pi**3 * s**3 + 16 / math.pi**7 * s**7 - 1, 0, 1, xtol=1e-15)
    assert rep.c_star == pytest.approx(root, abs=1e-12)
    assert rep.abs_inverse_at_r == pytest.approx(4 / math.pi + 8 / math.pi**3 + 16 / math.pi**7, abs=1e-14)
    assert "assumption CRA unverified" in ccp.bound("fk(3)", 9).notes
    with pytest.raises(DomainError):
        ccp.bound("haagerup", 7, "nope")
    with pytest.raises(DomainError):
        ccp.bound("grothendieck", 0)


def test_truncation_direction():
    # more terms of a nonnegative abs-inverse only push the root down
    cs = [ccp.bound("haagerup", n).c_star for n in (3, 7, 15, 31)]
    assert all(a >= b for a, b in zip(cs, cs[1:]))
    assert cs[-1] < cs[0]


def test_derivative_ceiling_and_schwarz():
    for name in ("grothendieck", "haagerup", "fk(2)", "fk(3)", "kappa"):
        d = ccp.catalog(name)
        sup = 2.0 if d.field == "complex" else d.sup_norm_sq
        assert d.leading <= 2 / math.pi * sup + 1e-15
        h = ccp.h_series(d, 41)
        for x in np.linspace(-1, 1, 21):
            assert abs(eval_series(h, x)) <= d.l2_norm_sq + 1e-12


def test_report_round_trip():
    rep = ccp.bound("fk(3)", 9)
    back = ccp.BoundReport.from_dict(json.loads(rep.to_json()))
    assert back == rep


def test_custom_descriptor_matches_catalog():
    d = ccp.catalog("grothendieck")
    exact = [d.ratio(nu) for nu in range(1, 10)]
    s = TruncatedSeries([Fraction(0)] + exact, "odd")
    custom = ccp.custom_descriptor(s, 1.0, 1.0)
    # h / p1 inverts to y -> h^{-1}(p1 y), so its root is c* / p1
    assert ccp.bound(custom, 9).c_star == pytest.approx(ccp.bound(d, 9).c_star * math.pi / 2, rel=1e-12)
    with pytest.raises(DomainError):
        ccp.custom_descriptor(TruncatedSeries([0.0, 0.0, 1.0]), 1, 1)
    with pytest.raises(DomainError):
        custom.ratio(12)


def test_haagerup_eval():
    assert ccp.haagerup_eval(1) == pytest.approx(1.0, abs=1e-12)
    assert ccp.haagerup_eval(0) == 0
    got = ccp.haagerup_eval(0.5j)
    assert got.real == 0
    assert got.imag == pytest.approx(math.pi / 8 * special.hyp2f1(0.5, 0.5, 2, 0.25), abs=1e-13)
    assert got.imag == pytest.approx(0.40630, abs=1e-5)
    assert ccp.haagerup_eval(0.3 + 0.4j, order=41) == pytest.approx(ccp.haagerup_eval(0.3 + 0.4j), abs=1e-12)
    with pytest.raises(DomainError):
        ccp.haagerup_eval(1.1)


def test_gaussian_df_orthant():
    assert ccp.gaussian_df_series(0.5, [0.0], [0.0]) == pytest.approx(1 / 3, abs=1e-10)
    a, b = 0.3, -0.4
    assert ccp.gaussian_df_series(0.0, [a], [b]) == pytest.approx(stats.norm.cdf(a) * stats.norm.cdf(b), abs=1e-14)


@pytest.mark.parametrize("rho,a,b", [
    (0.4, [0.2], [-0.5]),
    (-0.6, [0.7], [0.1]),
    (0.3, [0.1, -0.2], [0.4, 0.0]),
])
def test_gaussian_df_against_scipy(rho, a, b):
    k = len(a)
    cov = np.block([[np.eye(k), rho * np.eye(k)], [rho * np.eye(k), np.eye(k)]])
    ref = stats.multivariate_normal(np.zeros(2 * k), cov).cdf(np.array(a + b))
    assert ccp.gaussian_df_series(rho, a, b, N=80) == pytest.approx(ref, abs=2e-5)
    with pytest.raises(DomainError):
        ccp.gaussian_df_series(rho, a, b[:1] if k == 2 else b + [0.0], k=k)
