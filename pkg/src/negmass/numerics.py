"""Shared numerical kernels: quadrature, polynomial roots, limit extraction.

Everything here is deterministic and dependency-light; the rest of the
package builds its integrals and extrapolated limits on these routines.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import NonConvergenceError, NumericalError

_GAUSS_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on [-1, 1], cached by order."""
    if n not in _GAUSS_CACHE:
        _GAUSS_CACHE[n] = leggauss(n)
    return _GAUSS_CACHE[n]


def gauss_panel(f, lo: float, hi: float, n: int = 32) -> float:
    """Fixed-order Gauss quadrature of a vectorized integrand on [lo, hi]."""
    x, w = gauss_nodes(n)
    mid = 0.5 * (hi + lo)
    half = 0.5 * (hi - lo)
    return half * float(np.sum(w * f(mid + half * x)))


def adaptive_simpson(f, a: float, b: float, rel_tol: float = 1e-10,
                     abs_tol: float = 0.0, max_depth: int = 48) -> float:
    """Adaptive Simpson integration of a scalar integrand.

    The local acceptance test is the standard |S2 - S1| <= 15*tol with the
    Richardson correction (S2 - S1)/15 added to accepted panels.
    """
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0
    scale = max(abs(whole), abs_tol, 1e-300)

    def recurse(a, fa, m, fm, b, fb, whole, depth):
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) * (fa + 4.0 * flm + fm) / 6.0
        right = (b - m) * (fm + 4.0 * frm + fb) / 6.0
        delta = left + right - whole
        if depth <= 0:
            raise NumericalError("adaptive Simpson: max recursion depth reached")
        if abs(delta) <= 15.0 * rel_tol * max(scale, abs(left + right)):
            return left + right + delta / 15.0
        return (recurse(a, fa, lm, flm, m, fm, left, depth - 1)
                + recurse(m, fm, rm, frm, b, fb, right, depth - 1))

    if a == b:
        return 0.0
    return recurse(a, fa, m, fm, b, fb, whole, max_depth)


def tail_integral(f, a: float, rel_tol: float = 1e-10) -> float:
    """Improper integral of f over [a, inf) via the substitution u = 1/r.

    Requires f(r) = O(1/r^2) at infinity so the transformed integrand
    g(u) = f(1/u)/u^2 stays bounded near u = 0.  The last sliver
    [0, u_lo] is closed with a rectangle of the boundary value.
    """
    if a <= 0.0:
        raise NumericalError("tail integral needs a positive lower limit")
    u_hi = 1.0 / a
    u_lo = 1e-12 * u_hi

    def g(u):
        r = 1.0 / u
        return f(r) / (u * u)

    body = adaptive_simpson(g, u_lo, u_hi, rel_tol=rel_tol)
    return body + g(u_lo) * u_lo


def dyadic_gauss(f, lo: float, hi: float, inner: float, n: int = 24,
                 rel_tol: float = 1e-8) -> float:
    """Integrate a vectorized integrand whose sharp features hug both endpoints.

    Panels shrink geometrically toward lo and hi until their width falls
    below ``inner``; each panel gets fixed-order Gauss quadrature.  The
    result is accepted once doubling the order moves it by less than
    rel_tol relatively, else the order is escalated.
    """
    if not hi > lo:
        raise NumericalError("dyadic_gauss: empty interval")
    mid = 0.5 * (lo + hi)
    edges = [mid]
    w = 0.5 * (hi - lo)
    while w > inner and len(edges) < 200:
        w *= 0.5
        edges.append(hi - w)
    edges.append(hi)
    right = list(zip(edges[:-1], edges[1:]))
    left = [(lo + hi - b, lo + hi - a) for (a, b) in right]

    def total(order):
        return sum(gauss_panel(f, a, b, order) for a, b in left + right)

    coarse = total(n)
    fine = total(2 * n)
    if abs(fine - coarse) > rel_tol * max(abs(fine), 1e-300):
        finest = total(4 * n)
        if abs(finest - fine) > rel_tol * max(abs(finest), 1e-300):
            raise NumericalError("dyadic_gauss: quadrature did not settle")
        return finest
    return fine


def durand_kerner(coeffs, tol: float = 1e-14, max_iter: int = 500):
    """All complex roots of a polynomial by simultaneous iteration.

    ``coeffs`` are highest-degree first.  Leading coefficients that are
    negligible against the largest one are trimmed, so the effective
    degree may be lower than len(coeffs) - 1.
    """
    coeffs = [complex(c) for c in coeffs]
    big = max(abs(c) for c in coeffs) if coeffs else 0.0
    while coeffs and abs(coeffs[0]) <= 1e-14 * max(big, 1.0):
        coeffs.pop(0)
    n = len(coeffs) - 1
    if n < 1:
        return []
    lead = coeffs[0]
    monic = [c / lead for c in coeffs]
    radius = 1.0 + max(abs(c) for c in monic[1:])
    seed = 0.4 + 0.9j
    roots = [radius * seed ** (k + 1) for k in range(n)]

    def poly(z):
        acc = monic[0]
        for c in monic[1:]:
            acc = acc * z + c
        return acc

    for _ in range(max_iter):
        shift = 0.0
        new_roots = list(roots)
        for i in range(n):
            z = new_roots[i]
            denom = 1.0 + 0.0j
            for j in range(n):
                if j != i:
                    denom *= (z - new_roots[j])
            if denom == 0:
                denom = 1e-30
            step = poly(z) / denom
            new_roots[i] = z - step
            shift = max(shift, abs(step))
        roots = new_roots
        if shift < tol * max(1.0, radius):
            break
    return roots


def richardson_decay(values):
    """Extrapolate f(R), f(2R), f(4R), f(8R) to R -> inf.

    Assumes an expansion f = L + a/R + b/R^2 + c/R^3 and eliminates the
    three correction orders in turn.  Raises if the table does not
    contract (non-decaying tail).
    """
    t = [list(values)]
    for order in (1, 2, 3):
        fac = 2.0 ** order
        prev = t[-1]
        t.append([(fac * prev[i + 1] - prev[i]) / (fac - 1.0)
                  for i in range(len(prev) - 1)])
    limit = t[-1][0]
    spread = abs(t[-2][1] - t[-2][0])
    base = max(abs(values[-1] - values[0]), 1e-30)
    if spread > 0.5 * base + 1e-9 * max(1.0, abs(limit)):
        raise NonConvergenceError(
            "limit extrapolation did not contract", samples=values)
    return limit


def limit_smallstep(values, diverged=None):
    """Extrapolate f(eps), f(eps/2), f(eps/4), f(eps/8) to eps -> 0.

    The leading correction exponent is unknown (profiles often carry
    fractional powers), so it is estimated from successive difference
    ratios before each elimination round.  Returns +/-inf through the
    ``diverged`` callback when the samples run away: either growing by
    more than a factor 2 step over step, or with non-shrinking
    differences of one sign (slow power-law divergence).
    """
    v = [float(x) for x in values]
    diffs = [v[i + 1] - v[i] for i in range(len(v) - 1)]
    if all(d == 0.0 for d in diffs):
        return v[-1]

    growth = [abs(v[i + 1]) > 2.0 * abs(v[i]) for i in range(len(v) - 1)]
    slow = (all(abs(diffs[i + 1]) >= 0.95 * abs(diffs[i])
                for i in range(len(diffs) - 1))
            and all(d * diffs[-1] > 0 for d in diffs)
            and abs(diffs[-1]) > 1e-12 * max(1.0, abs(v[-1])))
    if all(growth) or slow:
        sign = 1.0 if v[-1] > v[0] else -1.0
        if diverged is not None:
            return diverged(sign)
        return sign * math.inf

    osc = sum(1 for i in range(len(diffs) - 1) if diffs[i] * diffs[i + 1] < 0)
    if osc >= 2 and abs(diffs[-1]) > 1e-10 * max(1.0, abs(v[-1])):
        raise NonConvergenceError("oscillatory non-convergence", samples=values)

    for _ in range(2):
        if len(v) < 3:
            break
        d0 = v[-2] - v[-3]
        d1 = v[-1] - v[-2]
        if d1 == 0.0 or d0 == 0.0:
            v = v[1:]
            continue
        ratio = d1 / d0
        if not 0.0 < ratio < 0.95:
            # difference ratio not contracting: take the finest sample
            v = v[1:]
            continue
        q = -math.log2(ratio)
        fac = 2.0 ** q
        v = [(fac * v[i + 1] - v[i]) / (fac - 1.0) for i in range(len(v) - 1)]
    return v[-1]


def bisect_root(f, lo: float, hi: float, tol: float = 1e-13,
                max_iter: int = 200) -> float:
    """Plain bisection; f(lo) and f(hi) must straddle zero."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise NumericalError("bisect_root: endpoints do not bracket a root")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0 or hi - lo < tol * max(1.0, abs(mid)):
            return mid
        if flo * fm < 0:
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)
