import math

import numpy as np
import pytest

from negmass.errors import NonConvergenceError, NumericalError
from negmass.numerics import (adaptive_simpson, bisect_root, durand_kerner,
                              dyadic_gauss, gauss_panel, limit_smallstep,
                              richardson_decay, tail_integral)


def test_adaptive_simpson_polynomial_exact():
    assert adaptive_simpson(lambda x: x * x, 0.0, 1.0) == pytest.approx(1.0 / 3.0, abs=1e-14)


def test_adaptive_simpson_oscillatory():
    val = adaptive_simpson(math.sin, 0.0, math.pi, rel_tol=1e-12)
    assert val == pytest.approx(2.0, abs=1e-11)


def test_tail_integral_inverse_square():
    # int_2^inf dr/r^2 = 1/2
    assert tail_integral(lambda r: 1.0 / r ** 2, 2.0) == pytest.approx(0.5, rel=1e-10)


def test_tail_integral_needs_positive_start():
    with pytest.raises(NumericalError):
        tail_integral(lambda r: 1.0 / r ** 2, 0.0)


def test_gauss_panel_matches_simpson():
    f = lambda x: np.exp(-x) * np.sin(3 * x)
    a = gauss_panel(f, 0.0, 2.0, 32)
    b = adaptive_simpson(lambda x: math.exp(-x) * math.sin(3 * x), 0.0, 2.0, rel_tol=1e-13)
    assert a == pytest.approx(b, abs=1e-12)


def test_dyadic_gauss_boundary_layer():
    # integrand with width-1e-4 spikes at both endpoints
    eps = 1e-4

    def f(x):
        return 1.0 / (eps + (1.0 - np.abs(x)))

    exact = 2.0 * math.log((1.0 + eps) / eps)
    val = dyadic_gauss(f, -1.0, 1.0, inner=1e-7)
    assert val == pytest.approx(exact, rel=1e-9)


def test_durand_kerner_quartic():
    # (z-1)(z+2)(z-3i)(z+1+i)
    roots_true = [1.0, -2.0, 3.0j, -1.0 - 1.0j]
    coeffs = np.polynomial.polynomial.polyfromroots(roots_true)[::-1]
    roots = durand_kerner(list(coeffs))
    assert len(roots) == 4
    for rt in roots_true:
        assert min(abs(r - rt) for r in roots) < 1e-10


def test_durand_kerner_against_numpy_roots():
    rng = np.random.default_rng(19)
    for _ in range(100):
        deg = int(rng.integers(2, 5))
        coeffs = (rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1))
        coeffs[0] += 2.0  # keep the leading coefficient well away from zero
        mine = durand_kerner(list(coeffs))
        ref = np.roots(coeffs)
        assert len(mine) == len(ref)
        for r in ref:
            assert min(abs(r - m) for m in mine) < 1e-8 * max(1.0, abs(r))


def test_durand_kerner_trims_leading_zeros():
    # 0*z^4 + 0*z^3 + z^2 - 1
    roots = durand_kerner([0.0, 0.0, 1.0, 0.0, -1.0])
    assert len(roots) == 2
    assert sorted(round(r.real, 9) for r in roots) == [-1.0, 1.0]


def test_richardson_decay_recovers_limit():
    f = lambda R: 5.0 - 3.0 / R + 0.7 / R ** 2 - 0.2 / R ** 3
    vals = [f(100.0 * 2 ** k) for k in range(4)]
    assert richardson_decay(vals) == pytest.approx(5.0, abs=1e-12)


def test_limit_smallstep_fractional_order():
    # mixed 2/3- and 1-order corrections: estimated-exponent elimination
    # beats the raw finest sample (error 1e-3) by two orders
    f = lambda e: -1.0 + 0.8 * e ** (2.0 / 3.0) + 0.1 * e
    vals = [f(1e-3 / 2 ** k) for k in range(4)]
    assert limit_smallstep(vals) == pytest.approx(-1.0, abs=1e-5)


def test_limit_smallstep_pure_power():
    f = lambda e: -1.0 + 0.8 * e ** (2.0 / 3.0)
    vals = [f(1e-3 / 2 ** k) for k in range(4)]
    assert limit_smallstep(vals) == pytest.approx(-1.0, abs=1e-9)


def test_limit_smallstep_divergence_marker():
    vals = [-(2.0 ** (1.25 * k)) for k in range(4)]  # grows by 2^1.25 each halving
    assert limit_smallstep(vals) == -math.inf


def test_limit_smallstep_slow_divergence():
    # grows only by 2^0.2 per halving: the factor-2 rule alone would miss it
    vals = [-(2.0 ** (0.2 * k)) for k in range(4)]
    assert limit_smallstep(vals) == -math.inf


def test_limit_smallstep_oscillation_raises():
    with pytest.raises(NonConvergenceError) as err:
        limit_smallstep([1.0, -1.0, 1.0, -1.0])
    assert len(err.value.samples) == 4


def test_bisect_root():
    assert bisect_root(lambda x: x * x - 2.0, 0.0, 2.0) == pytest.approx(math.sqrt(2.0), abs=1e-12)
