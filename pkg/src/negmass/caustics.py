"""Critical curves, caustics, cusps, and image-multiplicity surveys.

Removing kappa from the combined lens map leaves the reduced parameters

    gamma* = gamma / |1 - kappa|,  m* = m / |1 - kappa|,
    eps = sgn(1 - kappa),

and for m* < 0 the critical curves are

    z_pm(phi) = +/- i sqrt(|m*| / (e^{-i phi} - gamma*)),   phi in [0, 2pi).

Caustics are their images under the full lens map.  Cusps are the
angles where, additionally, the directional derivative of the map along
Z = 2i dJ/dconj(z) vanishes; writing w = 1 - gamma* e^{-i phi}, they are
the angles with w^3 purely real and of sign opposite to eps.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import (BoundaryRegimeError, DegenerateKappaError, DomainError,
                     NumericalError, ValidationError)
from .lens import LensModel, find_images, lens_map
from .numerics import bisect_root

GAP_TOL = 1e-9  # |e^{-i phi} - gamma*| below this is a parametrization gap


@dataclass(frozen=True)
class ReducedLens:
    """Kappa-free lens parameters (m*, gamma*, eps = sgn(1 - kappa))."""

    m_star: float
    gamma_star: float
    eps_kappa: int

    def __post_init__(self):
        if self.eps_kappa not in (-1, 1):
            raise ValidationError("eps_kappa must be +1 or -1")
        if not (math.isfinite(self.m_star) and math.isfinite(self.gamma_star)):
            raise ValidationError("reduced parameters must be finite")
        if self.gamma_star < 0:
            raise ValidationError("gamma_star must be >= 0")


@dataclass(frozen=True)
class CurveSample:
    """One phi-sample of the critical curve and (optionally) the caustic."""

    phi: float
    z_plus: complex
    z_minus: complex
    y_plus: complex | None = None
    y_minus: complex | None = None
    gap: bool = False


@dataclass(frozen=True)
class CuspSet:
    """Cusp angles with root labels, total cusp count, and shear regime."""

    angles: tuple[tuple[float, str], ...]
    count: int
    regime: str
    eps_kappa: int


def reduce(model: LensModel) -> ReducedLens:
    """Strip kappa from the lens: (m*, gamma*, eps).

    Undefined at kappa = 1; that branch has its own two-point critical set.
    """
    if model.kappa == 1.0:
        raise DegenerateKappaError(
            "kappa = 1: use critical_points_kappa1 for the critical set")
    scale = abs(1.0 - model.kappa)
    eps = 1 if model.kappa < 1.0 else -1
    return ReducedLens(model.m / scale, model.gamma / scale, eps)


def unreduce(reduced: ReducedLens, kappa: float) -> LensModel:
    """Rebuild the full model carrying the given kappa (inverse of reduce)."""
    if (kappa < 1.0) != (reduced.eps_kappa == 1):
        raise DomainError("kappa is on the wrong side of 1 for this eps_kappa")
    scale = abs(1.0 - kappa)
    return LensModel(reduced.m_star * scale, kappa, reduced.gamma_star * scale)


def _critical_pair(phi: float, reduced: ReducedLens) -> tuple[complex, complex]:
    den = cmath.exp(-1j * phi) - reduced.gamma_star
    z = 1j * cmath.sqrt(abs(reduced.m_star) / den)
    return z, -z


def critical_curve(reduced: ReducedLens, n_samples: int,
                   model: LensModel | None = None) -> list[CurveSample]:
    """Sample z_pm(phi) over [0, 2pi); independent of eps_kappa.

    Principal square roots flip branch where the radicand crosses the
    negative real axis; consecutive samples are rematched by nearest
    neighbor so each branch traces a continuous curve.  Samples with
    |e^{-i phi} - gamma*| < 1e-9 (gamma* = 1 degeneracy) are emitted as
    explicit gaps.  With a model given, caustic points are attached.
    """
    if reduced.m_star >= 0:
        raise DomainError("critical_curve expects a negative reduced mass")
    if n_samples < 4:
        raise ValidationError("need at least 4 samples")
    out: list[CurveSample] = []
    prev: complex | None = None
    for k in range(n_samples):
        phi = 2.0 * math.pi * k / n_samples
        den = cmath.exp(-1j * phi) - reduced.gamma_star
        if abs(den) < GAP_TOL:
            out.append(CurveSample(phi, complex("nan"), complex("nan"), gap=True))
            prev = None
            continue
        zp, zm = _critical_pair(phi, reduced)
        if prev is not None and abs(zp - prev) > abs(zm - prev):
            zp, zm = zm, zp
        prev = zp
        yp = ym = None
        if model is not None:
            yp = lens_map(zp, model)
            ym = lens_map(zm, model)
        out.append(CurveSample(phi, zp, zm, yp, ym))
    return out


def critical_points_kappa1(m: float, gamma: float) -> tuple[complex, ...]:
    """Critical set for kappa = 1: the two solutions of conj(z)^2 = -m / gamma.

    At kappa = 1 the Jacobian is J = -|gamma + m/conj(z)^2|^2, which
    vanishes exactly where m/conj(z)^2 = -gamma.  (Dropping the minus
    sign puts the points a quarter turn off and leaves J = -4 gamma^2
    there.)  For m < 0 the two points lie on the x1 axis, the kappa -> 1
    limit of the shrinking critical loops.
    """
    if gamma == 0.0:
        return ()
    if m == 0.0:
        raise DomainError("critical_points_kappa1 needs m != 0")
    root = cmath.sqrt(-m / gamma)
    z = root.conjugate()
    return (z, -z)


def caustic_curve(reduced: ReducedLens, model: LensModel,
                  n_samples: int) -> list[CurveSample]:
    """Image of the critical curve under the full lens map."""
    return critical_curve(reduced, n_samples, model=model)


def re_w3(phi: float, gstar: float) -> float:
    """Re(w^3) for w = 1 - gamma* e^{-i phi}; decides which eps hosts the cusp."""
    c = math.cos(phi)
    g = gstar
    return -4.0 * g ** 3 * c ** 3 + 6.0 * g * g * c * c + (3.0 * g ** 3 - 3.0 * g) * c \
        + 1.0 - 3.0 * g * g


def im_w3(phi: float, gstar: float) -> float:
    """Im(w^3) = gamma* sin(phi) [4 gamma*^2 cos^2 phi - 6 gamma* cos phi + 3 - gamma*^2].

    Its zeros are the candidate cusp angles.  (The constant term is
    3 - gamma*^2; the variant with 4 - gamma*^2 does not reproduce the
    closed-form roots and is kept out deliberately.)
    """
    c = math.cos(phi)
    g = gstar
    return g * math.sin(phi) * (4.0 * g * g * c * c - 6.0 * g * c + 3.0 - g * g)


def _w3(phi: float, gstar: float) -> complex:
    return (1.0 - gstar * cmath.exp(-1j * phi)) ** 3


def shear_regime(gstar: float) -> str:
    g2 = gstar * gstar
    if g2 < 0.75:
        return "gstar2<3/4"
    if g2 < 1.0:
        return "3/4<=gstar2<1"
    if g2 > 1.0:
        return "gstar2>1"
    raise BoundaryRegimeError("gamma* = 1: higher-order caustic at infinity")


def _candidate_angles(gstar: float) -> list[tuple[float, str]]:
    """The root list phi1..phi6; phi3..phi6 exist only for gamma*^2 >= 3/4."""
    roots = [(0.0, "phi1"), (math.pi, "phi2")]
    disc = 4.0 * gstar * gstar - 3.0
    if gstar > 0.0 and disc >= 0.0:
        s = math.sqrt(disc)
        for sign, lab in ((+1.0, "phi3"), (-1.0, "phi4")):
            c = (3.0 + sign * s) / (4.0 * gstar)
            if abs(c) <= 1.0:
                phi = math.acos(c)
                roots.append((phi, lab))
                partner = "phi5" if lab == "phi3" else "phi6"
                roots.append((2.0 * math.pi - phi, partner))
    return roots


def _equivalent_model(reduced: ReducedLens) -> LensModel:
    """A full model realizing the reduced map: kappa = 0 (eps=+1) or 2 (eps=-1)."""
    kappa = 0.0 if reduced.eps_kappa == 1 else 2.0
    return LensModel(reduced.m_star, kappa, reduced.gamma_star)


def grad_Z_eta(z: complex, model: LensModel) -> complex:
    """Directional derivative of eta along Z = 2i dJ/dconj(z).

    grad_Z eta = (1 - kappa) Z + (gamma + m/conj(z)^2) conj(Z) with
    Z = 4 i m (gamma + m/z^2) / conj(z)^3; it vanishes exactly at cusps
    (together with J = 0).  theta = 0 models only.
    """
    zb = z.conjugate()
    b = model.gamma + model.m / zb ** 2
    bbar = model.gamma + model.m / z ** 2
    Z = 4j * model.m * bbar / zb ** 3
    return (1.0 - model.kappa) * Z + b * Z.conjugate()


def cusp_angles(reduced: ReducedLens) -> CuspSet:
    """Cusp angles for the reduced lens, selected by the sign of Re(w^3).

    A candidate root phi_i is a cusp for the eps with sign(Re w^3) = -eps;
    each angle contributes two cusps (one per critical branch), so the
    count is twice the number of selected angles.  Every selected angle
    is cross-checked against the defining condition |grad_Z eta| <= 1e-7
    at the corresponding critical point.
    """
    if reduced.m_star >= 0:
        raise DomainError("cusp_angles expects a negative reduced mass")
    g = reduced.gamma_star
    regime = shear_regime(g)  # raises on gamma* = 1
    selected: list[tuple[float, str]] = []
    if g > 0.0:
        model = _equivalent_model(reduced)
        for phi, lab in _candidate_angles(g):
            re = re_w3(phi, g)
            if re == 0.0 or (re > 0) == (reduced.eps_kappa > 0):
                continue
            zp, _ = _critical_pair(phi, reduced)
            if abs(grad_Z_eta(zp, model)) > 1e-7:
                raise NumericalError(
                    f"closed-form cusp {lab} fails the numerical condition")
            selected.append((phi, lab))
    selected.sort()
    return CuspSet(tuple(selected), 2 * len(selected), regime, reduced.eps_kappa)


def scan_cusps(reduced: ReducedLens, resolution: int = 10 ** 4) -> list[float]:
    """Locate cusps from the numerical condition alone (no closed form).

    Scans Im(w^3) for sign changes on a uniform phi grid, refines each
    bracket by bisection, and keeps the angles whose Re(w^3) has sign
    opposite to eps.  Used to cross-validate cusp_angles.
    """
    g = reduced.gamma_star
    if g == 0.0:
        return []
    phis = np.linspace(0.0, 2.0 * math.pi, resolution, endpoint=False)
    vals = np.array([im_w3(p, g) for p in phis])
    found: list[float] = []
    two_pi = 2.0 * math.pi
    for i in range(resolution):
        j = (i + 1) % resolution
        a, b = vals[i], vals[j]
        lo = phis[i]
        hi = phis[i] + two_pi / resolution
        root = None
        if a == 0.0:
            root = lo
        elif a * b < 0.0:
            root = bisect_root(lambda p: im_w3(p % two_pi, g), lo, hi)
        if root is None:
            continue
        root %= two_pi
        re = re_w3(root, g)
        if re != 0.0 and (re > 0) != (reduced.eps_kappa > 0):
            if all(abs(root - r) > 1e-6 and abs(abs(root - r) - two_pi) > 1e-6
                   for r in found):
                found.append(root)
    return sorted(found)


@dataclass(frozen=True)
class SurveyResult:
    """Image counts on a source-plane grid, with a near-caustic mask."""

    y1: np.ndarray
    y2: np.ndarray
    counts: np.ndarray
    near_caustic: np.ndarray
    margin: float


def _caustic_points(model: LensModel, n: int = 8192) -> np.ndarray:
    """Dense caustic sampling used for margin tests; empty for m = 0."""
    if model.m == 0.0:
        return np.empty(0, dtype=complex)
    if model.kappa == 1.0:
        pts = [lens_map(z, model) for z in critical_points_kappa1(model.m, model.gamma)]
        return np.array(pts, dtype=complex)
    red = reduce(model)
    pts = []
    for s in caustic_curve(red, model, n):
        if not s.gap:
            pts.extend((s.y_plus, s.y_minus))
    return np.array(pts, dtype=complex)


def image_count_survey(model: LensModel, y1_axis, y2_axis,
                       margin: float = 1e-3) -> SurveyResult:
    """Count images of find_images over a rectangular source grid.

    Grid points within ``margin`` of the sampled caustic set are flagged
    unreliable (counts there are still reported).
    """
    y1 = np.asarray(y1_axis, dtype=float)
    y2 = np.asarray(y2_axis, dtype=float)
    caus = _caustic_points(model)
    counts = np.zeros((y2.size, y1.size), dtype=int)
    near = np.zeros_like(counts, dtype=bool)
    for i, b in enumerate(y2):
        for j, a in enumerate(y1):
            y = complex(a, b)
            if caus.size:
                near[i, j] = bool(np.min(np.abs(caus - y)) < margin)
            counts[i, j] = len(find_images(y, model))
    return SurveyResult(y1, y2, counts, near, margin)
