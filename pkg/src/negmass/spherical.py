"""Spherically symmetric geometry: curvature, masses, capacity, classification.

A spherically symmetric 3-metric is encoded by its area function,

    ds^2 = dr^2 + (A(r) / 4 pi) dS^2,

with r the arclength from the center (or singularity).  Everything the
module computes is a functional of A and its first two derivatives:

    scalar curvature   R   = (16 pi A + A'^2 - 4 A A'') / (2 A^2)
    Hawking mass       m_H = sqrt(A / 16 pi) (1 - A'^2 / (16 pi A))
    mass at the center m_R = -lim_{r->0} A'^2 / (64 pi^{3/2} sqrt(A))
    capacity function  f(r) = 4 pi int_r^inf ds / A(s),  C(S_r) = 1/f(r)

The ADM mass is the large-r limit of the coordinate-sphere Hawking
masses, extracted by Richardson extrapolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NonConvergenceError, NumericalError, ValidationError
from .numerics import gauss_panel, limit_smallstep, richardson_decay, tail_integral

FOUR_PI = 4.0 * math.pi
MINUS_INFINITY = -math.inf


class RadialProfile:
    """Area function A(r) with two derivatives on an open radial domain."""

    kind = "abstract"

    def __init__(self, r_min: float, r_max: float):
        self.r_min = float(r_min)
        self.r_max = float(r_max)

    def area(self, r: float) -> float:
        raise NotImplementedError

    def d_area(self, r: float) -> float:
        raise NotImplementedError

    def d2_area(self, r: float) -> float:
        raise NotImplementedError

    def _check(self, r: float) -> float:
        r = float(r)
        if not (self.r_min < r < self.r_max):
            raise DomainError(
                f"r = {r} outside the open domain ({self.r_min}, {self.r_max})")
        return r

    def __repr__(self):
        return f"<{type(self).__name__} on ({self.r_min}, {self.r_max})>"


class FlatProfile(RadialProfile):
    """Euclidean space: A(r) = 4 pi r^2."""

    kind = "flat"

    def __init__(self):
        super().__init__(0.0, math.inf)

    def area(self, r):
        r = self._check(r)
        return FOUR_PI * r * r

    def d_area(self, r):
        r = self._check(r)
        return 2.0 * FOUR_PI * r

    def d2_area(self, r):
        self._check(r)
        return 2.0 * FOUR_PI


class ConformalSchwarzschildProfile(RadialProfile):
    """Conformally flat slice g = (1 + m/2R)^4 delta, either mass sign.

    The conformal chart runs over R in (|m|/2, inf): for m < 0 the lower
    end is the point singularity, for m > 0 the horizon.  The arclength
    from that end has the closed antiderivative

        s(R) = (R - R0) + m log(R/R0) + (m^2/4)(1/R0 - 1/R),  R0 = |m|/2,

    inverted per call by a bracketed Newton iteration; the accessors are
    then exact in the chart variable:

        A   = 4 pi R^2 (1 + m/2R)^4
        A'  = 8 pi (1 + m/2R) (R - m/2)
        A'' = 8 pi (1 + m^2/(4R^2)) / (1 + m/2R)^2.

    Coordinate spheres have Hawking mass identically m, and the radial
    capacity function is exactly 1/(R + m/2).
    """

    kind = "conformal-schwarzschild"

    def __init__(self, m: float):
        if m == 0.0 or not math.isfinite(m):
            raise ValidationError("conformal-schwarzschild needs a nonzero finite mass")
        super().__init__(0.0, math.inf)
        self.m = float(m)
        self.chart_min = 0.5 * abs(self.m)

    def _arclength(self, R: float) -> float:
        R0 = self.chart_min
        d = R - R0
        return d + self.m * math.log1p(d / R0) + 0.25 * self.m * self.m * d / (R * R0)

    def chart_radius(self, r: float) -> float:
        """Invert s(R) = r by Newton with a bisection safeguard."""
        r = self._check(r)
        R0 = self.chart_min
        lo = R0
        hi = R0 + r + 4.0 * abs(self.m) + 1.0
        while self._arclength(hi) < r:
            hi *= 2.0
        if self.m < 0:
            # near the singularity s ~ 4 d^3 / (3 m^2)
            R = R0 + min((0.75 * self.m * self.m * r) ** (1.0 / 3.0), hi - R0)
        else:
            R = min(R0 + r, hi)
        R = max(R, R0 * (1.0 + 1e-300))
        for _ in range(200):
            f = self._arclength(R) - r
            if f > 0:
                hi = R
            else:
                lo = R
            phi = 1.0 + self.m / (2.0 * R)
            R_new = R - f / (phi * phi) if phi != 0.0 else 0.5 * (lo + hi)
            if not (lo < R_new < hi):
                R_new = 0.5 * (lo + hi)
            if abs(R_new - R) <= 1e-16 * max(1.0, R):
                return R_new
            R = R_new
        return R

    def area(self, r):
        R = self.chart_radius(r)
        phi = 1.0 + self.m / (2.0 * R)
        return FOUR_PI * R * R * phi ** 4

    def d_area(self, r):
        R = self.chart_radius(r)
        phi = 1.0 + self.m / (2.0 * R)
        return 8.0 * math.pi * phi * (R - 0.5 * self.m)

    def d2_area(self, r):
        R = self.chart_radius(r)
        phi = 1.0 + self.m / (2.0 * R)
        return 8.0 * math.pi * (1.0 + self.m * self.m / (4.0 * R * R)) / (phi * phi)

    def capacity_exact(self, r: float) -> float:
        """Closed-form capacity of the sphere at arclength r (test oracle)."""
        return self.chart_radius(r) + 0.5 * self.m


def _smoothstep(t: float) -> float:
    if t <= 0.0:
        return 0.0
    if t >= 1.0:
        return 1.0
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t))


def _d_smoothstep(t: float) -> float:
    if t <= 0.0 or t >= 1.0:
        return 0.0
    return 30.0 * t * t * (1.0 - t) ** 2


def _d2_smoothstep(t: float) -> float:
    if t <= 0.0 or t >= 1.0:
        return 0.0
    return 60.0 * t * (1.0 - 3.0 * t + 2.0 * t * t)


class PowerLawProfile(RadialProfile):
    """Singular profile with A(r) = k r^p exactly near the center.

    Past the radius where k r^p crosses 4 pi r^2 the area blends over
    one octave (C^2 smoothstep) into exactly flat 4 pi r^2, so that tail
    integrals converge and sphere capacities are defined; the blend
    region keeps A' > 0 because it interpolates between two increasing
    functions that have already crossed.
    """

    kind = "power-law"

    def __init__(self, k: float, p: float):
        if not (k > 0.0 and p > 0.0 and math.isfinite(k) and math.isfinite(p)):
            raise ValidationError("power-law profile needs finite k > 0 and p > 0")
        super().__init__(0.0, math.inf)
        self.k = float(k)
        self.p = float(p)
        if p == 2.0:
            self.r_glue = 1.0
        else:
            self.r_glue = (self.k / FOUR_PI) ** (1.0 / (2.0 - self.p))

    def _head(self, r):
        return (self.k * r ** self.p,
                self.k * self.p * r ** (self.p - 1.0),
                self.k * self.p * (self.p - 1.0) * r ** (self.p - 2.0))

    def area(self, r):
        r = self._check(r)
        h, _, _ = self._head(r)
        if r <= self.r_glue:
            return h
        if r >= 2.0 * self.r_glue:
            return FOUR_PI * r * r
        w = _smoothstep(r / self.r_glue - 1.0)
        return h + w * (FOUR_PI * r * r - h)

    def d_area(self, r):
        r = self._check(r)
        h, dh, _ = self._head(r)
        if r <= self.r_glue:
            return dh
        if r >= 2.0 * self.r_glue:
            return 2.0 * FOUR_PI * r
        t = r / self.r_glue - 1.0
        w, dw = _smoothstep(t), _d_smoothstep(t) / self.r_glue
        return dh + dw * (FOUR_PI * r * r - h) + w * (2.0 * FOUR_PI * r - dh)

    def d2_area(self, r):
        r = self._check(r)
        h, dh, d2h = self._head(r)
        if r <= self.r_glue:
            return d2h
        if r >= 2.0 * self.r_glue:
            return 2.0 * FOUR_PI
        t = r / self.r_glue - 1.0
        w = _smoothstep(t)
        dw = _d_smoothstep(t) / self.r_glue
        d2w = _d2_smoothstep(t) / self.r_glue ** 2
        diff = FOUR_PI * r * r - h
        d_diff = 2.0 * FOUR_PI * r - dh
        d2_diff = 2.0 * FOUR_PI - d2h
        return d2h + d2w * diff + 2.0 * dw * d_diff + w * d2_diff

    def head_capacity_integral(self, r: float) -> float:
        """Exact int_0^r ds/(k s^p) on the power-law head (needs p < 1)."""
        if self.p >= 1.0:
            raise DomainError("head integral diverges for p >= 1")
        return r ** (1.0 - self.p) / (self.k * (1.0 - self.p))


class CustomProfile(RadialProfile):
    """Profile from explicit area callables (synthetic test metrics)."""

    kind = "custom"

    def __init__(self, area, d_area, d2_area, r_min=0.0, r_max=math.inf):
        super().__init__(r_min, r_max)
        self._a, self._da, self._d2a = area, d_area, d2_area

    def area(self, r):
        return float(self._a(self._check(r)))

    def d_area(self, r):
        return float(self._da(self._check(r)))

    def d2_area(self, r):
        return float(self._d2a(self._check(r)))


def bump_profile(amplitude: float = 0.3, center: float = 5.0) -> CustomProfile:
    """Asymptotically flat profile A = 4 pi r^2 (1 + a e^{-(r-c)^2}).

    Its scalar curvature dips negative on the inner flank of the bump;
    this is the stock counterexample for R >= 0 hypotheses.
    """

    def parts(r):
        e = math.exp(-((r - center) ** 2))
        B = 1.0 + amplitude * e
        dB = -2.0 * amplitude * (r - center) * e
        d2B = amplitude * (4.0 * (r - center) ** 2 - 2.0) * e
        return B, dB, d2B

    def area(r):
        B, _, _ = parts(r)
        return FOUR_PI * r * r * B

    def d_area(r):
        B, dB, _ = parts(r)
        return FOUR_PI * (2.0 * r * B + r * r * dB)

    def d2_area(r):
        B, dB, d2B = parts(r)
        return FOUR_PI * (2.0 * B + 4.0 * r * dB + r * r * d2B)

    return CustomProfile(area, d_area, d2_area)


class TabulatedProfile(RadialProfile):
    """C^2 cubic-spline profile through (r, A) samples.

    Requires strictly increasing r, positive finite A, at least 8
    samples per decade adjacent to each endpoint, and monotone
    interpolated A near the endpoints.
    """

    kind = "tabulated"

    def __init__(self, rs, As):
        from scipy.interpolate import CubicSpline

        rs = np.asarray(rs, dtype=float)
        As = np.asarray(As, dtype=float)
        if rs.ndim != 1 or rs.size < 4 or As.shape != rs.shape:
            raise ValidationError("tabulated profile needs matching 1-d samples (>= 4)")
        if not (np.all(np.isfinite(rs)) and np.all(np.isfinite(As))):
            raise ValidationError("tabulated profile rejects NaN/inf samples")
        if not np.all(np.diff(rs) > 0):
            raise ValidationError("tabulated profile needs strictly increasing r")
        if np.any(As <= 0):
            raise ValidationError("tabulated areas must be positive")
        for edge in (rs[:9], rs[-9:]):
            if edge.size >= 2 and edge[0] > 0:
                span = math.log10(edge[-1] / edge[0])
                if span > (edge.size - 1) / 8.0 + 1e-12:
                    raise ValidationError(
                        "need >= 8 samples per decade near the endpoints")
        super().__init__(rs[0], rs[-1])
        self._spline = CubicSpline(rs, As)
        self._d1 = self._spline.derivative(1)
        self._d2 = self._spline.derivative(2)
        for lo, hi in ((rs[0], rs[min(8, rs.size - 1)]),
                       (rs[max(-9, -rs.size)], rs[-1])):
            probe = np.linspace(lo, hi, 33)
            if np.any(self._d1(probe) < 0):
                raise ValidationError("interpolated A must be monotone near endpoints")

    def area(self, r):
        return float(self._spline(self._check(r)))

    def d_area(self, r):
        return float(self._d1(self._check(r)))

    def d2_area(self, r):
        return float(self._d2(self._check(r)))


def parse_profile_file(path) -> TabulatedProfile:
    """Strict reader for the tabulated format: header 'r,A', comma rows, ascending r."""
    rs, As = [], []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "r,A":
            raise ValidationError(f"expected header 'r,A', got {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ValidationError(f"line {lineno}: expected two columns")
            try:
                r, a = float(parts[0]), float(parts[1])
            except ValueError as exc:
                raise ValidationError(f"line {lineno}: {exc}") from exc
            if not (math.isfinite(r) and math.isfinite(a)):
                raise ValidationError(f"line {lineno}: non-finite value")
            rs.append(r)
            As.append(a)
    return TabulatedProfile(rs, As)


# ---------------------------------------------------------------------------
# pointwise functionals


def scalar_curvature(profile: RadialProfile, r: float) -> float:
    """R = (16 pi A + A'^2 - 4 A A'') / (2 A^2)."""
    A = profile.area(r)
    Ap = profile.d_area(r)
    App = profile.d2_area(r)
    return (16.0 * math.pi * A + Ap * Ap - 4.0 * A * App) / (2.0 * A * A)


def hawking_mass_sphere(profile: RadialProfile, r: float) -> float:
    """m_H(S_r) = sqrt(A / 16 pi) (1 - A'^2 / (16 pi A))."""
    A = profile.area(r)
    Ap = profile.d_area(r)
    return math.sqrt(A / (16.0 * math.pi)) * (1.0 - Ap * Ap / (16.0 * math.pi * A))


def mean_curvature(profile: RadialProfile, r: float) -> float:
    """H = A'/A of the coordinate sphere at r."""
    return profile.d_area(r) / profile.area(r)


# ---------------------------------------------------------------------------
# limits: ADM mass and the mass of the central singularity


def adm_mass(profile: RadialProfile, r0: float = 1e3) -> float:
    """ADM mass as the Richardson limit of m_H over r in {r0, 2r0, 4r0, 8r0}.

    Raises NonConvergenceError when the Hawking masses do not settle
    (the tail is not asymptotically flat).
    """
    rs = [r0 * 2.0 ** k for k in range(4)]
    if rs[-1] >= profile.r_max:
        raise DomainError("extrapolation radii exceed the profile domain")
    vals = [hawking_mass_sphere(profile, r) for r in rs]
    diffs = [abs(vals[i + 1] - vals[i]) for i in range(3)]
    scale = max(1.0, max(abs(v) for v in vals))
    if diffs[0] > 1e-12 * scale and diffs[-1] > 0.75 * diffs[0]:
        raise NonConvergenceError("non-flat tail: Hawking masses not settling",
                                  samples=vals)
    return richardson_decay(vals)


def regular_mass_integrand(profile: RadialProfile, r: float) -> float:
    """-(1/64 pi^{3/2}) A'^2 / sqrt(A); its r -> 0 limit is the central mass."""
    A = profile.area(r)
    Ap = profile.d_area(r)
    return -(Ap * Ap) / (64.0 * math.pi ** 1.5 * math.sqrt(A))


def regular_mass(profile: RadialProfile, eps: float = 1e-6) -> float:
    """Mass of the central singularity: lim_{r->0} of the mass integrand.

    Sampled at eps, eps/2, eps/4, eps/8 and extrapolated with an
    estimated leading exponent (profiles typically carry fractional
    powers of r).  Monotone divergence returns the -inf marker;
    oscillatory non-convergence raises with the samples attached.
    """
    if profile.r_min != 0.0:
        raise DomainError("regular mass needs the singular end at r = 0")
    vals = [regular_mass_integrand(profile, eps / 2.0 ** k) for k in range(4)]
    return limit_smallstep(vals, diverged=lambda sign: sign * math.inf)


# ---------------------------------------------------------------------------
# capacity


def radial_capacity_function(profile: RadialProfile, r: float,
                             rel_tol: float = 1e-10) -> float:
    """f(r) = 4 pi int_r^inf ds / A(s)."""
    if not math.isinf(profile.r_max):
        raise DomainError("capacity needs an unbounded profile")
    return FOUR_PI * tail_integral(lambda s: 1.0 / profile.area(s), r,
                                   rel_tol=rel_tol)


def radial_capacity(profile: RadialProfile, r0: float) -> float:
    """Capacity of the coordinate sphere at r0: f(r0)^{-1}."""
    f = radial_capacity_function(profile, r0)
    if f <= 0.0 or not math.isfinite(f):
        raise NumericalError("radial capacity function failed to evaluate")
    return 1.0 / f


def capacity_center(profile: RadialProfile, eps: float = 1e-4) -> float:
    """Capacity of the central point: lim_{r->0} f(r)^{-1}, 0 when f diverges.

    A pure power-law head is integrated in closed form; otherwise the
    limit is extrapolated from capacities at dyadically shrinking radii.
    """
    if isinstance(profile, PowerLawProfile):
        if profile.p >= 1.0:
            return 0.0
        r_in = min(eps, 0.5 * profile.r_glue)
        f = FOUR_PI * (profile.head_capacity_integral(r_in)
                       + tail_integral(lambda s: 1.0 / profile.area(s), r_in))
        return 1.0 / f
    caps = [radial_capacity(profile, eps / 2.0 ** k) for k in range(4)]
    lim = limit_smallstep(caps, diverged=lambda sign: 0.0 if sign < 0 else math.inf)
    if not math.isfinite(lim):
        raise NumericalError("central capacity extrapolation ran away")
    # capacities sliding well below the finest sample are heading to zero
    # (f diverging); a genuinely positive limit tracks the samples closely
    if lim < 0.5 * caps[-1]:
        return 0.0
    return max(lim, 0.0)


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class MassReport:
    """Mass structure summary.

    ``regular_mass`` may be the -inf marker; ``classification`` is one
    of 'zero-mass', 'finite-mass', 'minus-infinity'.  Positive central
    capacity forces (and is checked against) the minus-infinity class.
    """

    classification: str
    regular_mass: float
    capacity_center: float
    adm: float | None = None

    def __post_init__(self):
        if self.capacity_center > 0.0 and self.classification != "minus-infinity":
            raise ValidationError(
                "positive central capacity requires the minus-infinity class")


def classify_power_law(k: float, p: float) -> MassReport:
    """Classify the singularity of A ~ k r^p at the center.

    Central capacity is positive exactly when p < 1.  The central mass
    is -inf for p < 4/3, the finite value -k^{3/2}/(36 pi^{3/2}) at
    p = 4/3, and 0 for p > 4/3.
    """
    if not (k > 0.0 and p > 0.0):
        raise DomainError("need k > 0 and p > 0")
    profile = PowerLawProfile(k, p)
    cap = capacity_center(profile) if p < 1.0 else 0.0
    if abs(p - 4.0 / 3.0) < 1e-12:
        return MassReport("finite-mass", -(k ** 1.5) / (36.0 * math.pi ** 1.5), cap)
    if p < 4.0 / 3.0:
        return MassReport("minus-infinity", MINUS_INFINITY, cap)
    return MassReport("zero-mass", 0.0, cap)


# ---------------------------------------------------------------------------
# harmonic conformal modification


class ConformalProfile(RadialProfile):
    """Base profile rescaled by the harmonic conformal factor phi = 1 + C f(r).

    f is the radial capacity function of the base, so phi is harmonic
    and asymptotically 1 + C/|x|.  The new metric phi^4 g has

        A_new = phi^4 A,      ds_new = phi^2 ds,
        A_new'  = phi^2 A' - 16 pi C phi,
        A_new'' = A'' - 8 pi C A' / (A phi) + 64 pi^2 C^2 / (A phi^2),

    derivatives taken in the new arclength (using f' = -4 pi / A).
    For C < 0, phi crosses zero at the unique radius with f = -1/C;
    the profile is restricted to the outside of that locus, which is
    exactly the conformal construction of a point singularity there
    (areas shrink to zero).  Quantities are tabulated on a geometric
    grid of octave panels with fixed-order Gauss quadrature; the grid
    grows on demand.
    """

    kind = "conformal"

    _NODES = 24

    def __init__(self, base: RadialProfile, C: float):
        if not math.isfinite(C):
            raise ValidationError("conformal strength must be finite")
        self.base = base
        self.C = float(C)

        hi = 16.0
        self._edges: list[float] = [hi]
        self._f_edges: list[float] = [radial_capacity_function(base, hi, rel_tol=1e-12)]

        floor = self._find_floor()
        self._floor = floor
        self._extend_down(self._inner_seed(floor))
        self._s_origin_finite = self._probe_floor_arclength()
        super().__init__(0.0 if self._s_origin_finite else -math.inf, math.inf)
        self._build_arclength()

    # -- the harmonic factor --------------------------------------------------

    def _extend_down(self, lo: float):
        while self._edges[0] > lo:
            e_hi = self._edges[0]
            e_lo = max(lo, 0.5 * e_hi) if 0.5 * e_hi > lo * 1.0000001 else lo
            df = FOUR_PI * gauss_panel(
                np.vectorize(lambda s: 1.0 / self.base.area(s)),
                e_lo, e_hi, self._NODES)
            self._edges.insert(0, e_lo)
            self._f_edges.insert(0, self._f_edges[0] + df)

    def _extend_up(self, hi: float):
        while self._edges[-1] < hi:
            e_lo = self._edges[-1]
            e_hi = min(2.0 * e_lo, hi) if 2.0 * e_lo < hi * 0.9999999 else hi
            df = FOUR_PI * gauss_panel(
                np.vectorize(lambda s: 1.0 / self.base.area(s)),
                e_lo, e_hi, self._NODES)
            self._edges.append(e_hi)
            self._f_edges.append(self._f_edges[-1] - df)

    def f(self, r: float) -> float:
        """Radial capacity function of the base, panel-accelerated."""
        if r > self._edges[-1]:
            self._extend_up(r)
        if r < self._edges[0]:
            self._extend_down(r)
        i = int(np.searchsorted(self._edges, r, side="right")) - 1
        i = min(max(i, 0), len(self._edges) - 2)
        part = FOUR_PI * gauss_panel(
            np.vectorize(lambda s: 1.0 / self.base.area(s)),
            self._edges[i], r, self._NODES)
        return self._f_edges[i] - part

    def phi(self, r: float) -> float:
        return 1.0 + self.C * self.f(r)

    def _find_floor(self) -> float:
        """Zero crossing of phi (phi is increasing in r for C < 0)."""
        if self.C >= 0.0:
            return self.base.r_min
        target = -1.0 / self.C
        lo_limit = self.base.r_min
        lo = max(lo_limit * 1.0000001, 1e-12) if lo_limit > 0 else 1e-12
        hi = self._edges[-1]
        # strong factors push the crossing out past the initial grid
        while self.phi(hi) <= 0.0:
            hi *= 2.0
            self._extend_up(hi)
            if hi > 1e30:
                raise NumericalError("conformal factor stays nonpositive")
        # ensure f(lo) > target (phi(lo) < 0) or conclude no crossing
        for _ in range(2000):
            self._extend_down(lo)
            if self._f_edges[0] > target:
                break
            if lo <= lo_limit * 1.0000001 + 1e-250:
                return self.base.r_min  # phi > 0 everywhere
            lo = max(lo_limit + 0.25 * (lo - lo_limit), 0.25 * lo)
        else:
            return self.base.r_min
        a, b = lo, hi
        for _ in range(200):
            mid = 0.5 * (a + b)
            if self.phi(mid) <= 0.0:
                a = mid
            else:
                b = mid
            if b - a <= 1e-15 * max(1.0, b):
                break
        return b

    def _inner_seed(self, floor: float) -> float:
        if floor > 0.0:
            return floor * (1.0 + 1e-12)
        return 1e-6

    def _probe_floor_arclength(self) -> bool:
        """Is int phi^2 ds finite down to the floor?"""
        if self._floor > 0.0:
            return True  # phi vanishes linearly, integrand ~ (r - floor)^2
        # floor at r = 0: check how phi^2 scales as r -> 0
        v1 = self.phi(1e-6) ** 2 * 1e-6
        v2 = self.phi(1e-8) ** 2 * 1e-8
        return v2 < v1

    # -- arclength map ---------------------------------------------------------

    def _phi2_vec(self):
        return np.vectorize(lambda s: self.phi(s) ** 2)

    def _build_arclength(self):
        """Cumulative s_new at the panel edges, origin at the floor (or edge 0).

        The f-grid may extend below the floor (it was probed there while
        locating the phi = 0 crossing); the arclength table must not.
        """
        edges = [e for e in self._edges if e > self._floor * (1.0 + 1e-12)]
        if not edges:
            edges = [self._edges[-1]]
        integr = self._phi2_vec()
        panel = [gauss_panel(integr, edges[i], edges[i + 1], self._NODES)
                 for i in range(len(edges) - 1)]
        s = [0.0]
        for val in panel:
            s.append(s[-1] + val)
        if self._s_origin_finite:
            # add the sliver between the floor and the first edge
            lead = 0.0
            if edges[0] > self._floor:
                if self._floor == 0.0:
                    # integrable head: refine geometrically toward 0
                    sub = np.geomspace(1e-14, edges[0], 24)
                else:
                    sub = np.linspace(self._floor, edges[0], 24)
                for a, b in zip(sub[:-1], sub[1:]):
                    lead += gauss_panel(integr, a, b, self._NODES)
            s = [v + lead for v in s]
            s.insert(0, 0.0)
            edges = [self._floor] + edges
            self._arc_edges = edges
            self._arc_s = s
        else:
            self._arc_edges = list(edges)
            self._arc_s = s

    def _sync_arclength(self, r: float):
        if r > self._arc_edges[-1]:
            integr = self._phi2_vec()
            while self._arc_edges[-1] < r:
                a = self._arc_edges[-1]
                b = 2.0 * a if a > 0 else 1.0
                self._extend_up(b)
                self._arc_edges.append(b)
                self._arc_s.append(self._arc_s[-1] + gauss_panel(integr, a, b, self._NODES))

    def new_arclength(self, r: float) -> float:
        """s_new(r): phi^2-weighted arclength from the floor (or grid origin)."""
        self._sync_arclength(r)
        if r < self._arc_edges[0]:
            raise DomainError("radius below the conformal domain")
        i = int(np.searchsorted(self._arc_edges, r, side="right")) - 1
        i = min(max(i, 0), len(self._arc_edges) - 2)
        return self._arc_s[i] + gauss_panel(self._phi2_vec(),
                                            self._arc_edges[i], r, self._NODES)

    def old_radius(self, s_new: float) -> float:
        """Invert the arclength map (monotone; bracketed Newton)."""
        while s_new > self._arc_s[-1]:
            self._sync_arclength(2.0 * self._arc_edges[-1])
        if s_new < self._arc_s[0]:
            raise DomainError("arclength below the conformal domain")
        i = int(np.searchsorted(self._arc_s, s_new, side="right")) - 1
        i = min(max(i, 0), len(self._arc_s) - 2)
        lo, hi = self._arc_edges[i], self._arc_edges[i + 1]
        r = 0.5 * (lo + hi)
        for _ in range(100):
            err = self.new_arclength(r) - s_new
            if err > 0:
                hi = r
            else:
                lo = r
            dphi2 = self.phi(r) ** 2
            r_new = r - err / dphi2 if dphi2 > 0 else 0.5 * (lo + hi)
            if not (lo < r_new < hi):
                r_new = 0.5 * (lo + hi)
            if abs(r_new - r) <= 1e-15 * max(1.0, abs(r)) or hi - lo <= 1e-15 * max(1.0, hi):
                return r_new
            r = r_new
        return r

    # -- accessors (arguments are the new arclength) ---------------------------

    def area(self, s):
        r = self.old_radius(self._check(s))
        return self.phi(r) ** 4 * self.base.area(r)

    def d_area(self, s):
        r = self.old_radius(self._check(s))
        ph = self.phi(r)
        return ph * ph * self.base.d_area(r) - 16.0 * math.pi * self.C * ph

    def d2_area(self, s):
        r = self.old_radius(self._check(s))
        ph = self.phi(r)
        A = self.base.area(r)
        return (self.base.d2_area(r)
                - 8.0 * math.pi * self.C * self.base.d_area(r) / (A * ph)
                + 64.0 * math.pi ** 2 * self.C ** 2 / (A * ph * ph))


@dataclass(frozen=True)
class ConformalResult:
    """New profile plus the audit adm(new) - (adm(old) + 2C)."""

    profile: ConformalProfile
    adm_check: float


def apply_harmonic_conformal(profile: RadialProfile, C: float) -> ConformalResult:
    """Rescale by phi = 1 + C f(r) and audit the ADM mass shift.

    phi ~ 1 + C/|x| at infinity, so the ADM mass must move by exactly
    2C.  phi <= 0 regions are cut away behind the new singularity;
    raises only if no positive domain remains.
    """
    new = ConformalProfile(profile, C)
    adm_old = adm_mass(profile)
    adm_new = adm_mass(new, r0=new.new_arclength(2e3))
    return ConformalResult(new, adm_new - (adm_old + 2.0 * C))


def build_profile(name: str, *, mass: float | None = None, k: float | None = None,
                  p: float | None = None, file: str | None = None) -> RadialProfile:
    """CLI-facing factory: flat | neg-schwarzschild | power-law | tabulated."""
    if name == "flat":
        return FlatProfile()
    if name == "neg-schwarzschild":
        return ConformalSchwarzschildProfile(-1.0 if mass is None else mass)
    if name == "power-law":
        if k is None or p is None:
            raise ValidationError("power-law profile needs --k and --p")
        return PowerLawProfile(k, p)
    if name == "tabulated":
        if file is None:
            raise ValidationError("tabulated profile needs --file")
        return parse_profile_file(file)
    raise ValidationError(f"unknown profile kind {name!r}")
