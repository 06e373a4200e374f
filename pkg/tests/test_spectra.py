import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from incsmooth.errors import CoordinateHorizonExceeded, NonMonotoneWeights
from incsmooth.spectra import (
    CostModel,
    FactorWeights,
    SingularValueStream,
    active_variables,
    evaluate_cost,
    min_error_all,
    min_errors_all,
    predicted_decay_all,
    predicted_decay_std,
    singular_values,
    tie_key,
)
from incsmooth.sequences import decay_fit
from incsmooth.weights import DecayParams, Rule, WeightFamily

from oracles import box_spectrum, factor_log_weight


def a2(r):
    return WeightFamily.polynomial("A2", r)


def test_univariate_coordinate_stream():
    xi = singular_values(a2(2.0), 7, coordinate=1)
    np.testing.assert_allclose(xi, [1, 1 / 2, 1 / 2, 1 / 3, 1 / 3, 1 / 4, 1 / 4], rtol=1e-14)


def test_first_values_of_a_product():
    fam = a2(Rule.linear(0, 2))  # w(1,1) = w(2,1) = 4, w(3,1) = 9, w(1,2) = 16
    lw, idx = SingularValueStream(fam, max_coordinate=50).take(7)
    np.testing.assert_allclose(np.exp(lw), [1, 4, 4, 9, 9, 16, 16], rtol=1e-13)
    assert idx == [(), ((1, 1),), ((1, 2),), ((1, 3),), ((1, 4),), ((1, 5),), ((1, 6),)]
    lw, idx = SingularValueStream(fam, max_coordinate=50).take(12)
    assert ((2, 1),) in idx and ((1, 1), (2, 1)) not in idx


def test_ties_ordered_by_key():
    fam = a2(2.0)  # identical factors: (j, 1) all tie
    _, idx = SingularValueStream(fam, dimension=3).take(7)
    assert idx == [(), ((1, 1),), ((1, 2),), ((2, 1),), ((2, 2),), ((3, 1),), ((3, 2),)]
    lw, idx = SingularValueStream(fam, dimension=3).take(13)
    groups = {}
    for w, i in zip(lw, idx):
        groups.setdefault(round(w, 9), []).append(i)
    for g in groups.values():
        assert g == sorted(g, key=tie_key)


def test_finite_dimension_exhausts():
    stream = SingularValueStream(a2(2.0), variant="F", dimension=2)
    lw, idx = stream.take_certified(10)
    assert len(idx) == 4
    assert set(idx) == {(), ((1, 1),), ((2, 1),), ((1, 1), (2, 1))}


def test_horizon_raises():
    fam = a2(Rule.log(2, 1))
    stream = SingularValueStream(fam, max_coordinate=3)
    with pytest.raises(CoordinateHorizonExceeded):
        stream.take(10**4)
    assert stream.emitted > 0


def test_non_monotone_factor_detected():
    fam = WeightFamily.from_table([[4.0, 2.0], [16.0, 8.0]], extension="constant")
    with pytest.raises(NonMonotoneWeights):
        SingularValueStream(fam, dimension=2).take(4)


def test_g_and_f_weights():
    fam = a2(Rule.values([2, 4, 6]))
    g = FactorWeights(fam, "G")
    # gamma_2 = 2^(2-4): w_G(nu, 2) = alpha[nu, 1] * 4
    assert g(3, 2) == pytest.approx(math.log(9 * 4))
    f = FactorWeights(fam, "F")
    assert f(1, 3) == pytest.approx(6 * math.log(2)) and f(2, 3) == math.inf
    fc = FactorWeights(fam, "Fc", c=2.0)
    assert fc(1, 3) == pytest.approx(6 * math.log(2) - math.log(2))


def test_min_error_is_next_singular_value():
    fam = a2(Rule.linear(0, 2))
    errs = min_errors_all(fam, 9, max_coordinate=50)
    assert min_error_all(fam, 4, max_coordinate=50) == errs[4]
    assert np.all(np.diff(errs) <= 0)


def test_predicted_decay_all_closed_forms():
    p = DecayParams(rho=4.0, decay_alpha_nu1=3.0, decay_alpha_1j=2.77, decay_gamma=2.77, rho_is_estimate=False)
    assert predicted_decay_all(p, "H") == pytest.approx(1.385)
    assert predicted_decay_all(p, "F") == pytest.approx(1.385)
    assert predicted_decay_all(p, "ProductG") == pytest.approx(1.385)
    p = DecayParams(2.0, 1.0, 5.0, 5.0, False)
    assert predicted_decay_all(p, "H") == 0.5
    assert predicted_decay_all(p, "F") == 2.5


def test_predicted_decay_std():
    p = DecayParams(4.0, 3.0, 4 * math.log(2), 4 * math.log(2), False)
    iv = predicted_decay_std(p, univariate_dec=1.5, variant="G")
    assert iv.is_point and iv.lower == pytest.approx(0.5 * (4 * math.log(2) - 1))
    iv = predicted_decay_std(p, 0.5, "H")
    assert (iv.lower, iv.upper) == (0.5, 0.5)
    assert predicted_decay_std(p, 0.5, "F").lower == pytest.approx(0.5 * (4 * math.log(2) - 1))
    with pytest.raises(ValueError):
        predicted_decay_std(DecayParams(0.5, 3.0, 0.5, 0.5, False), 1.0, "G")


def test_cost_models():
    assert CostModel("linear")(0) == 1 and CostModel("linear")(5) == 5
    assert CostModel("fixed", value=3)(100) == 3
    assert CostModel("exponential", zeta=1.0)(2) == pytest.approx(math.e**2)
    assert active_variables({1: 0.3, 4: 0.0, 7: 0.9}) == 2
    assert active_variables([0.0, 0.5, 0.0, 0.25]) == 2
    assert evaluate_cost([[0.1, 0.2], [0.0], {3: 1.0}], CostModel("linear")) == 4
    with pytest.raises(ValueError):
        CostModel("fixed", value=0.5)


# ---------------------------------------------------------------------------
# against the box oracle
# ---------------------------------------------------------------------------


def _compare_with_box(fam, variant):
    ref_lw, ref_idx, _ = box_spectrum(fam, variant, V=32, J=12, budget=20_000)
    stream = SingularValueStream(fam, variant, max_coordinate=12)
    lw, idx = stream.take_certified(len(ref_idx))
    assert len(ref_idx) > 10 and len(idx) == len(ref_idx)
    np.testing.assert_allclose(lw, ref_lw, rtol=1e-12, atol=1e-12)
    assert idx == ref_idx


@pytest.mark.parametrize("variant", ["H", "G", "F"])
def test_matches_box_oracle(variant):
    _compare_with_box(a2(Rule.log(3, 4)), variant)


@settings(max_examples=15, deadline=None)
@given(
    st.sampled_from(["A1", "A2"]),
    st.floats(1.5, 4.0),
    st.floats(2.0, 8.0),
    st.sampled_from(["H", "G", "F"]),
)
def test_matches_box_oracle_random(a, r1, slope, variant):
    _compare_with_box(WeightFamily.polynomial(a, Rule.log(r1, slope)), variant)


@settings(max_examples=25, deadline=None)
@given(st.floats(1.5, 4.0), st.floats(0.5, 6.0), st.integers(20, 300))
def test_stream_monotone_and_matches_factor_oracle(r1, slope, k):
    fam = a2(Rule.linear(r1, slope))
    lw, idx = SingularValueStream(fam, "G", max_coordinate=10**4).take(k)
    assert np.all(np.diff(lw) >= -1e-12 * np.maximum(1, lw[1:]))
    for w, i in zip(lw[:20], idx[:20]):
        assert w == pytest.approx(sum(factor_log_weight(fam, "G", v, j) for j, v in i), rel=1e-12, abs=1e-12)
    assert len(set(idx)) == k


def test_fitted_decay_approaches_prediction():
    fam = a2(Rule.log(3, 8))
    errs = min_errors_all(fam, 10**4, max_coordinate=10**5)
    pred = predicted_decay_all(fam)
    gaps = [abs(decay_fit(errs[1:], 10, n).slope - pred) for n in (10**2, 10**3, 10**4)]
    assert gaps[2] < gaps[1] < gaps[0]


points = st.lists(st.lists(st.sampled_from([0.0, 0.25, 0.5]), max_size=5), max_size=6)


@settings(max_examples=50, deadline=None)
@given(points, points, st.sampled_from([CostModel("linear"), CostModel("fixed", value=2.0), CostModel("exponential", zeta=0.5)]))
def test_cost_additive(p, q, model):
    assert evaluate_cost(p + q, model) == pytest.approx(evaluate_cost(p, model) + evaluate_cost(q, model))
