import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from incsmooth.errors import IndexOutOfTable, RhoUnavailable
from incsmooth.weights import (
    Rule,
    WeightFamily,
    alpha,
    decay_params,
    embedding_norm,
    estimate_rho,
    g_embedding_norm,
    gamma,
    log_gamma,
    scan_gamma,
    validate,
)


def poly_a2(r):
    return WeightFamily.polynomial("A2", r)


def test_alpha_examples():
    assert alpha(poly_a2(Rule.linear(0, 2)), 1, 1) == 4.0
    assert alpha(poly_a2(Rule.linear(0, 2)), 0, 5) == 1.0
    assert alpha(poly_a2(Rule.linear(0, 2)), 3, 0) == 1.0
    sub = WeightFamily.subexponential(2.0, 1.0, 1.0)
    assert alpha(sub, 3, 1) == pytest.approx(8.0, rel=1e-14)


def test_builtin_sequences():
    nu = np.arange(1, 9)
    np.testing.assert_array_equal(Rule.builtin_a2()(nu), 1 + (nu + 1) // 2)
    np.testing.assert_allclose(Rule.builtin_a1()(nu), 2 * np.pi * ((nu + 1) // 2))


def test_log_space_does_not_overflow():
    sub = WeightFamily.subexponential(10.0, 5.0, 1.0)
    la = sub.log_alpha(500, 1)
    assert la == pytest.approx(5 * 500 * math.log(10.0))
    assert np.isinf(sub.alpha(500, 1))


def test_gamma_closed_forms():
    fam = WeightFamily.polynomial("A2", Rule.values([2, 4]))
    assert gamma(fam, 2) == pytest.approx(0.25, rel=1e-12)
    assert gamma(fam, 1) == 1.0
    sub = WeightFamily.subexponential(3.0, Rule.values([1, 2]), 1.0)
    assert gamma(sub, 2) == pytest.approx(1 / 3, rel=1e-12)


def test_gamma_scan_matches_closed_form_over_a_million_nu():
    fam = WeightFamily.polynomial("A2", Rule.values([2, 4]))
    res = scan_gamma(fam, 2, 10**6)
    assert res.value == pytest.approx(0.25, rel=1e-12)
    assert res.argmax == 1 and res.conclusive


def test_validate_flags():
    bad = WeightFamily.polynomial("A2", Rule.values([0.5, 0.4]))
    rep = validate(bad)
    assert rep.r_monotone is False and not rep.ok
    assert any("non-decreasing" in p for p in rep.problems())

    good = poly_a2(Rule.linear(0, 1))
    rep = validate(good)
    assert rep.ok and rep.g5 is True and rep.rho == math.inf

    tab = WeightFamily.from_table([[1.0, 2.0], [2.0, 4.0]], extension="constant")
    rep = validate(tab)
    assert not rep.c2_ok and not rep.ok


def test_decay_params_examples():
    p = decay_params(poly_a2(Rule.log(3, 4)))
    assert (p.rho, p.decay_alpha_nu1) == (4.0, 3.0)
    assert p.decay_alpha_1j == pytest.approx(4 * math.log(2))
    assert p.decay_gamma == pytest.approx(4 * math.log(2))
    assert not p.rho_is_estimate

    sub = WeightFamily.subexponential(math.e, Rule.expr("2*log(j+1)"), 1.0)
    p = decay_params(sub)
    assert p.decay_alpha_nu1 == math.inf
    assert p.rho_is_estimate and p.rho == pytest.approx(2.0, rel=0.1)

    p = decay_params(poly_a2(3.0))
    assert p.rho == 0 and p.decay_alpha_1j == 0


def test_decay_alpha_1j_cross_checked_by_fit():
    from incsmooth.sequences import decay_fit

    fam = poly_a2(Rule.log(3, 4))
    j = np.arange(1, 10**4 + 1)
    inv = np.exp(-fam.log_alpha(1, j))
    assert decay_fit(inv, 10, 10**4).slope == pytest.approx(4 * math.log(2), rel=1e-6)


def test_rho_unavailable_for_tables():
    tab = WeightFamily.from_table([[2.0, 4.0], [3.0, 9.0]], extension="geometric")
    with pytest.raises(RhoUnavailable):
        decay_params(tab)


def test_estimate_rho_running_minimum():
    assert estimate_rho(Rule.expr("3 + 4*log(j)")) == pytest.approx(4.0, rel=0.2)


def test_table_extensions():
    tab = WeightFamily.from_table([[2.0, 4.0], [4.0, 8.0]], extension="geometric")
    assert tab.alpha(2, 3) == pytest.approx(16.0)
    assert tab.alpha(3, 2) == pytest.approx(16.0)
    none = WeightFamily.from_table([[2.0, 4.0], [4.0, 8.0]])
    with pytest.raises(IndexOutOfTable):
        none.alpha(3, 1)
    const = WeightFamily.from_table([[2.0, 4.0], [4.0, 8.0]], extension="constant")
    assert const.alpha(7, 9) == pytest.approx(8.0, rel=1e-14)


def test_embedding_norms():
    fam = poly_a2(Rule.linear(1, 1))
    assert embedding_norm(fam, 1, 2) == 1.0
    assert embedding_norm(fam, 3, 3) == 1.0
    assert embedding_norm(fam, 2, 1) == math.inf


def test_family_dict_roundtrip():
    fam = WeightFamily.subexponential(2.5, Rule.log(1, 2), Rule.constant(1.5), rho=2.0)
    assert WeightFamily.from_dict(fam.to_dict()) == fam


# ---------------------------------------------------------------------------
# properties
# ---------------------------------------------------------------------------

offsets = st.floats(0.5, 6.0)
slopes = st.floats(0.0, 8.0)


@st.composite
def parametric_families(draw):
    r = draw(st.sampled_from(["log", "linear"]))
    o, s = draw(offsets), draw(slopes)
    rule = Rule.log(o, s) if r == "log" else Rule.linear(o, s)
    if draw(st.booleans()):
        return WeightFamily.polynomial(draw(st.sampled_from(["A1", "A2"])), rule)
    return WeightFamily.subexponential(draw(st.floats(1.1, 5.0)), rule, Rule.constant(draw(st.floats(0.2, 2.0))))


@settings(max_examples=60, deadline=None)
@given(parametric_families())
def test_c1_c2_hold_for_parametric_families(fam):
    nu = np.arange(1, 40)[:, None]
    j = np.arange(1, 40)[None, :]
    la = fam.log_alpha(nu, j)
    assert np.all(la >= fam.log_alpha(nu, 1) - 1e-9)
    assert np.all(la >= fam.log_alpha(1, j) - 1e-9)
    assert fam.alpha(1, 1) > 1
    assert validate(fam, 32, 32).ok


@settings(max_examples=60, deadline=None)
@given(parametric_families(), st.integers(1, 200))
def test_gamma_in_unit_interval_and_scan_agrees(fam, j):
    lg = log_gamma(fam, j)
    assert np.isfinite(lg) and lg <= 0
    assert 0 <= gamma(fam, j) <= 1
    res = scan_gamma(fam, j, 2000)
    assert res.value == pytest.approx(gamma(fam, j), rel=1e-12, abs=1e-300)


@settings(max_examples=40, deadline=None)
@given(parametric_families(), st.integers(1, 100))
def test_g_embedding_has_norm_one(fam, j):
    assert abs(g_embedding_norm(fam, j, 2000) - 1.0) <= 1e-12
    assert embedding_norm(fam, 1, j) == 1.0
