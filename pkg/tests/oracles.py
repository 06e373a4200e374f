"""Independent reference computations used by the tests.

Nothing here goes through the package's enumeration, tail or case-analysis
code; only the weight families themselves are shared.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def factor_log_weight(family, variant, nu, j, c=1.0):
    """Factor log weight computed from ``log_alpha`` with a brute-force gamma."""
    if variant == "H":
        return float(family.log_alpha(nu, j))
    if variant in ("G", "Gc"):
        grid = np.arange(1, 4097)
        lg = float(np.max(family.log_alpha(grid, 1) - family.log_alpha(grid, j))) if j > 1 else 0.0
        return float(family.log_alpha(nu, 1)) - lg - (math.log(c) if variant == "Gc" else 0.0)
    if nu > 1:
        return math.inf
    return float(family.log_alpha(1, j)) - (math.log(c) if variant == "Fc" else 0.0)


def box_spectrum(family, variant="H", V=32, J=12, budget=50_000, tie_tol=1e-12):
    """All multi-indices with ``nu_j <= V``, ``j <= J`` and log weight below a threshold.

    The threshold starts at ``min(w(V+1, 1), w(1, J+1))``, below which no
    index outside the box can fall, and is lowered until the count fits
    ``budget``.  Returns ``(log_weights, indices, threshold)`` in the
    stream's emission order.
    """
    W = [[factor_log_weight(family, variant, nu, j) for nu in range(1, V + 1)] for j in range(1, J + 1)]
    T = min(factor_log_weight(family, variant, V + 1, 1), factor_log_weight(family, variant, 1, J + 1))
    if not math.isfinite(T):
        T = max(w for row in W for w in row if math.isfinite(w)) + 1.0

    while True:
        found: list[tuple[float, tuple]] = []
        overflow = False

        def visit(j, total, idx):
            nonlocal overflow
            found.append((total, idx))
            if len(found) > budget:
                overflow = True
                return
            for jj in range(j, J + 1):
                for nu in range(1, V + 1):
                    t = total + W[jj - 1][nu - 1]
                    if not t < T:
                        break
                    visit(jj + 1, t, idx + ((jj, nu),))
                    if overflow:
                        return

        visit(1, 0.0, ())
        if not overflow:
            break
        T *= 0.8

    found.sort(key=lambda e: e[0])
    ordered = []
    i = 0
    while i < len(found):
        w0 = found[i][0]
        k = i
        while k < len(found) and found[k][0] <= w0 + tie_tol * max(1.0, abs(w0)):
            k += 1
        group = sorted(found[i:k], key=lambda e: (len(e[1]), tuple(j for j, _ in e[1]), tuple(v for _, v in e[1])))
        ordered.extend(group)
        i = k
    # drop a trailing tie group that may straddle the threshold
    while ordered and ordered[-1][0] > T - 1e-9 * max(1.0, abs(T)):
        ordered.pop()
    return np.array([w for w, _ in ordered]), [idx for _, idx in ordered], T


def brute_product_sum(beta):
    """``sum over all multi-indices of prod_j beta[j][nu_j]`` with ``beta[j][0] = 1``."""
    factors = [[1.0] + list(b) for b in beta]
    return math.fsum(math.prod(choice) for choice in itertools.product(*factors))


def haar_function(nu, x):
    """Haar function ``e_nu`` on [0, 1], right-continuous with the last cell closed."""
    x = np.asarray(x, dtype=float)
    if nu == 0:
        return np.ones_like(x)
    ell = int(math.floor(math.log2(nu)))
    while (1 << (ell + 1)) <= nu:
        ell += 1
    m = nu - (1 << ell)
    h = 2.0 ** -(ell + 1)
    lo, mid, hi = 2 * m * h, (2 * m + 1) * h, (2 * m + 2) * h
    left = (x >= lo) & (x < mid)
    right = (x >= mid) & ((x < hi) | ((hi == 1.0) & (x == 1.0)))
    return 2.0 ** (ell / 2) * (left.astype(float) - right.astype(float))


def haar_interpolation_error(n, coeffs, fine_level=None):
    """``||f - T_n f||_0`` by sampling on dyadic cells fine enough to resolve every term."""
    coeffs = np.asarray(coeffs, dtype=float)
    top = max(1, len(coeffs) - 1).bit_length()
    L = max(top, n + 1) if fine_level is None else fine_level
    N = 1 << L
    x = (np.arange(N) + 0.5) / N
    mids = (2 * np.arange(1 << n) + 1) / 2.0 ** (n + 1)
    f = sum(a * haar_function(k, x) for k, a in enumerate(coeffs) if a)
    fm = sum(a * haar_function(k, mids) for k, a in enumerate(coeffs) if a)
    step = np.repeat(fm, N >> n)
    return math.sqrt(float(np.mean((f - step) ** 2)))


def kernel_direct(basis_fn, weights, x, y):
    """``sum_nu e_nu(x) conj(e_nu(y)) / weights[nu]`` over the given finite range."""
    return sum(basis_fn(nu, x) * np.conj(basis_fn(nu, y)) / w for nu, w in enumerate(weights))
