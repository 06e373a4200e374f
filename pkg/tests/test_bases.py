import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import eval_jacobi

from incsmooth.bases import (
    BasisFamily,
    basis_matrix,
    eval_basis,
    haar_block,
    jacobi_log_norm,
    jacobi_polynomials,
    orthonormality_defect,
    rkhs_condition,
    sup_norm_sq,
)
from incsmooth.errors import DomainError
from incsmooth.weights import Rule, WeightFamily

from oracles import haar_function

ALL = [
    BasisFamily.trigonometric(),
    BasisFamily.walsh(),
    BasisFamily.haar(),
    BasisFamily.legendre(),
    BasisFamily.jacobi(1.0, 1.0),
    BasisFamily.jacobi(0.5, 0.0),
]


def walsh_paley(nu, x):
    out = 1.0
    for k in range(max(nu.bit_length(), 1)):
        if (nu >> k) & 1:
            digit = int(math.floor(x * 2 ** (k + 1))) % 2 if x < 1 else 1
            out *= -1.0 if digit else 1.0
    return out


def test_examples():
    assert eval_basis(BasisFamily.trigonometric(), 2, 0.25) == pytest.approx(1j)
    assert eval_basis(BasisFamily.trigonometric(), 1, 0.25) == pytest.approx(-1j)
    assert eval_basis(BasisFamily.legendre(), 3, 1.0) ** 2 == pytest.approx(7.0)
    assert eval_basis(BasisFamily.haar(), 3, 0.9) == pytest.approx(-math.sqrt(2))
    assert eval_basis(BasisFamily.haar(), 1, 1.0) == -1.0
    assert eval_basis(BasisFamily.walsh(), 3, 0.3) == -1.0


@pytest.mark.parametrize("basis", ALL, ids=lambda b: b.describe())
def test_orthonormal(basis):
    assert orthonormality_defect(basis, 64) < 1e-10


def test_jacobi_recurrence_matches_scipy():
    x = np.linspace(-1, 1, 41)
    for a, b in [(0.0, 0.0), (1.0, 1.0), (0.5, 0.0), (2.0, 0.3), (-0.5, -0.5)]:
        p = jacobi_polynomials(a, b, 20, x)
        ref = np.array([eval_jacobi(n, a, b, x) for n in range(21)])
        np.testing.assert_allclose(p, ref, rtol=1e-12, atol=1e-12)


def test_jacobi_norm_closed_form():
    # Legendre: c_nu = sqrt(2 nu + 1)
    np.testing.assert_allclose(np.exp(jacobi_log_norm(0.0, 0.0, np.arange(6))), np.sqrt(2 * np.arange(6) + 1))


def test_walsh_matches_rademacher_products():
    x = np.concatenate([np.linspace(0, 1, 97), [1.0]])
    E = basis_matrix(BasisFamily.walsh(), 31, x)
    ref = np.array([[walsh_paley(nu, xi) for nu in range(32)] for xi in x])
    np.testing.assert_array_equal(E, ref)


def test_haar_matches_oracle():
    x = np.linspace(0, 1, 129)
    E = basis_matrix(BasisFamily.haar(), 63, x)
    ref = np.stack([haar_function(nu, x) for nu in range(64)], axis=1)
    np.testing.assert_array_equal(E, ref)


def test_domain_and_index_errors():
    with pytest.raises(DomainError):
        eval_basis(BasisFamily.haar(), 1, 1.5)
    with pytest.raises(DomainError):
        eval_basis(BasisFamily.legendre(), 1, -1.01)
    with pytest.raises(ValueError):
        eval_basis(BasisFamily.walsh(), -1, 0.2)


def test_haar_blocks():
    assert list(haar_block(2)) == [4, 5, 6, 7]


@pytest.mark.parametrize("basis", ALL, ids=lambda b: b.describe())
def test_sup_norm_closed_form(basis):
    lo, hi = basis.domain
    x = np.linspace(lo, hi, 4001)
    E = basis_matrix(basis, 40, x)
    sampled = np.max(np.abs(E) ** 2, axis=0)
    closed = sup_norm_sq(basis, np.arange(41))
    assert np.all(sampled <= closed * (1 + 1e-9))
    if basis.kind != "Haar":
        np.testing.assert_allclose(sampled, closed, rtol=1e-6)


def test_sup_norm_growth_exponent():
    nu = np.array([1e4, 1e5])
    for basis in ALL[3:]:
        s = sup_norm_sq(basis, nu)
        slope = (math.log(s[1]) - math.log(s[0])) / math.log(10)
        assert slope == pytest.approx(2 * basis.sigma, abs=0.01)


@pytest.mark.parametrize(
    "basis, sigma",
    [(BasisFamily.trigonometric(), 0.0), (BasisFamily.legendre(), 0.5), (BasisFamily.jacobi(1.0, 1.0), 1.5)],
    ids=["trig", "legendre", "jacobi11"],
)
def test_rkhs_threshold(basis, sigma):
    edge = 1 + 2 * sigma
    below = WeightFamily.polynomial("A2", edge - 0.01)
    above = WeightFamily.polynomial("A2", edge + 0.01)
    assert rkhs_condition(basis, below).verdict is False
    assert rkhs_condition(basis, above).verdict is True


def test_rkhs_infinite_product():
    fam = WeightFamily.polynomial("A2", Rule.log(3, 4))
    rep = rkhs_condition(BasisFamily.trigonometric(), fam, "Infinite")
    assert rep.sufficient and rep.necessary and rep.verdict is True
    slow = WeightFamily.polynomial("A2", Rule.log(3, 0.5))
    rep = rkhs_condition(BasisFamily.trigonometric(), slow, "Infinite")
    assert rep.verdict is False


def test_rkhs_partial_sums_grow_when_diverging():
    rep = rkhs_condition(BasisFamily.legendre(), WeightFamily.polynomial("A2", 1.5))
    sums = [s for _, s in rep.partial_sums]
    assert sums[-1] > 3 * sums[0]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 200), st.floats(0, 1))
def test_real_bases_bounded_by_sup_norm(nu, x):
    for basis in (BasisFamily.walsh(), BasisFamily.haar(), BasisFamily.legendre()):
        xx = 2 * x - 1 if basis.kind == "Jacobi" else x
        v = eval_basis(basis, nu, xx)
        assert abs(v) ** 2 <= sup_norm_sq(basis, nu) * (1 + 1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100), st.floats(0, 1))
def test_trigonometric_unimodular(nu, x):
    assert abs(eval_basis(BasisFamily.trigonometric(), nu, x)) == pytest.approx(1.0)


def test_walsh_and_haar_blocks_span_the_same_space():
    x = (np.arange(1 << 7) + 0.5) / (1 << 7)
    W = basis_matrix(BasisFamily.walsh(), 127, x)
    H = basis_matrix(BasisFamily.haar(), 127, x)
    for level in range(7):
        block = list(haar_block(level))
        Pw = W[:, block] @ W[:, block].T / len(x)
        Ph = H[:, block] @ H[:, block].T / len(x)
        assert np.max(np.abs(Pw - Ph)) < 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 500), st.floats(0, 1))
def test_walsh_unimodular(nu, x):
    assert abs(eval_basis(BasisFamily.walsh(), nu, x)) == 1.0


def test_jacobi_grid_growth_within_factor_four():
    x = np.linspace(-1, 1, 20001)
    for basis in (BasisFamily.legendre(), BasisFamily.jacobi(1.0, 1.0)):
        E = basis_matrix(basis, 128, x)
        nu = np.arange(8, 129)
        ratio = np.max(np.abs(E[:, nu]), axis=0) / nu**basis.sigma
        assert ratio.max() / ratio.min() < 4
