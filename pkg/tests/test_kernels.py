import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from incsmooth.bases import BasisFamily, basis_matrix
from incsmooth.errors import NotRKHS
from incsmooth.kernels import (
    CoefVector,
    ProductCoefVector,
    SpaceSpec,
    gram_psd_check,
    inner,
    kernel_eval,
    kernel_section,
    norm,
    norm_chain,
    reproducing_residual,
    univariate_tail,
    verify_l200,
    verify_lw2,
)
from incsmooth.weights import Rule, WeightFamily

from oracles import kernel_direct

TRIG = BasisFamily.trigonometric()
FOUR = [BasisFamily.trigonometric(), BasisFamily.walsh(), BasisFamily.haar(), BasisFamily.legendre()]


def a2(r):
    return WeightFamily.polynomial("A2", r)


def test_trig_kernel_closed_form():
    # 1 + 2 sum_k (1 + k)^-2
    space = SpaceSpec(TRIG, a2(2.0), nu_max=4000)
    kv = kernel_eval(space, 0.0, 0.0)
    exact = math.pi**2 / 3 - 1
    assert kv.value.real == pytest.approx(exact, abs=1e-3)
    assert abs(kv.value - exact) <= kv.tail_bound
    assert kv.tail_bound < 2e-3


@pytest.mark.parametrize("basis", FOUR, ids=lambda b: b.describe())
def test_tail_bound_is_honest(basis):
    space = SpaceSpec(basis, a2(3.0), nu_max=32)
    lo = basis.domain[0]
    x = np.linspace(lo, basis.domain[1], 7)
    weights = np.r_[1.0, np.exp(space.weights().array(np.arange(1, 8193), np.ones(8192, dtype=int)))]
    for xi in x:
        row = basis_matrix(basis, 8192, [xi])[0]
        ref = kernel_direct(lambda nu, _: row[nu], weights, xi, xi)
        kv = kernel_eval(space, xi, xi)
        # the reference is itself truncated, so it may only sit below the true value
        assert ref.real >= kv.value.real - 1e-12
        assert abs(ref - kv.value) <= kv.tail_bound


def test_univariate_tail_shrinks():
    space = SpaceSpec(TRIG, a2(3.0))
    t = [univariate_tail(space, n) for n in (8, 16, 32, 64)]
    assert all(b < a for a, b in zip(t, t[1:]))


def test_not_rkhs_raises():
    with pytest.raises(NotRKHS):
        kernel_eval(SpaceSpec(BasisFamily.legendre(), a2(1.5)), 0.0, 0.0)


def test_anchored_kernel_not_materialised():
    with pytest.raises(NotImplementedError):
        kernel_eval(SpaceSpec(TRIG, a2(3.0), variant="Gc", c=0.5), 0.1, 0.2)


def test_product_f_kernel():
    fam = WeightFamily.polynomial("A2", Rule.linear(0, 2))  # alpha[1, j] = 4^j
    space = SpaceSpec(TRIG, fam, variant="ProductF", j_max=30)
    kv = kernel_eval(space, [0.0], [0.0])
    exact = math.prod(1 + 4.0**-j for j in range(1, 200))
    assert kv.value.real == pytest.approx(exact, rel=1e-12)
    assert kv.value.real == pytest.approx(1.35591, abs=1e-5)


def test_product_kernel_tail_covers_more_coordinates():
    fam = WeightFamily.polynomial("A2", Rule.linear(3, 2))
    space = SpaceSpec(TRIG, fam, variant="ProductH", nu_max=64, j_max=3)
    short = kernel_eval(space, [0.1, 0.7], [0.3, 0.2])
    long = kernel_eval(space.replace(j_max=8, nu_max=512), [0.1, 0.7], [0.3, 0.2])
    assert abs(short.value - long.value) <= short.tail_bound


@pytest.mark.parametrize("basis", FOUR, ids=lambda b: b.describe())
def test_gram_psd_and_reproducing(basis):
    space = SpaceSpec(basis, a2(3.0), nu_max=48)
    lo, hi = basis.domain
    pts = np.linspace(lo, hi, 12)
    lam, ok = gram_psd_check(space, pts)
    assert ok
    rng = np.random.default_rng(1)
    f = CoefVector(rng.standard_normal(20))
    assert reproducing_residual(space, f, pts) < 1e-10


def test_kernel_section_norm_is_diagonal_value():
    space = SpaceSpec(TRIG, a2(3.0), nu_max=40)
    k = kernel_section(space, 0.3)
    assert norm(space, k) ** 2 == pytest.approx(kernel_eval(space, 0.3, 0.3).value.real, rel=1e-12)


def test_norm_chain_ordering():
    fam = a2(Rule.log(3, 4))
    f = ProductCoefVector({((1, 1),): 1.0, ((2, 1), (3, 1)): 0.5, ((1, 3), (2, 2)): -0.25})
    g, h, fn = norm_chain(fam, TRIG, f)
    assert fn is None and g <= h
    on_f = ProductCoefVector({((1, 1),): 1.0, ((2, 1), (3, 1)): 0.5})
    g, h, fn = norm_chain(fam, TRIG, on_f)
    assert g <= h and fn == pytest.approx(h, rel=1e-14)


def test_anchored_g_norm_value():
    fam = a2(Rule.values([2, 4]))
    f = CoefVector([1.0, 2.0])
    space = SpaceSpec(TRIG, fam, variant="Gc", j=2, c=0.5, anchor=0.0)
    # |f(0)|^2 + alpha[1,1] / (c gamma_2) |f_1|^2 = 9 + 4 / (0.5 * 0.25) * 4
    assert inner(space, f, f).real == pytest.approx(9 + 128, rel=1e-12)


def _samples(seed, n=60, n_coef=12, complex_=True):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        c = rng.standard_normal(n_coef) * np.exp(-0.3 * np.arange(n_coef))
        if complex_:
            c = c + 1j * rng.standard_normal(n_coef) * np.exp(-0.3 * np.arange(n_coef))
        out.append(CoefVector(c))
    return out


@pytest.mark.parametrize("j", [1, 2, 5])
def test_lw2_on_samples(j):
    fam = a2(Rule.log(3, 4))
    rep = verify_lw2(fam, j, [0.9, 0.5, 0.1, 0.01], _samples(j))
    for c0 in rep.grid:
        assert rep.all_hold(c0)
    assert rep.threshold == 0.9


@pytest.mark.parametrize("basis", [BasisFamily.walsh(), BasisFamily.legendre()], ids=lambda b: b.describe())
def test_l200_on_samples(basis):
    fam = a2(Rule.log(3, 4))
    rep = verify_l200(fam, 3, [0.5, 0.05], _samples(3, complex_=False), basis=basis)
    assert rep.all_hold(0.5) and rep.all_hold(0.05)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.floats(0.01, 0.99), st.integers(0, 2**32 - 1))
def test_lw2_inequalities_hold(j, c0, seed):
    fam = a2(Rule.linear(2, 1.5))
    rep = verify_lw2(fam, j, [c0], _samples(seed, n=10))
    assert rep.all_hold(c0)


@settings(max_examples=15, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1), st.sampled_from(["H", "G", "ProductH"]))
def test_kernel_hermitian(x, y, variant):
    space = SpaceSpec(TRIG, a2(Rule.linear(3, 1)), variant=variant, nu_max=32, j_max=3)
    xs, ys = ([x, y], [y, x]) if variant == "ProductH" else (x, y)
    assert kernel_eval(space, xs, ys).value == np.conj(kernel_eval(space, ys, xs).value)
