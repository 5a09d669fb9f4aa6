import math

import pytest

from negmass.errors import DomainError
from negmass.imcf import (capacity_energy_bound, geroch_report, imcf_flow,
                          verify_capacity_bound)
from negmass.spherical import (ConformalSchwarzschildProfile, CustomProfile,
                               FlatProfile, PowerLawProfile, adm_mass,
                               bump_profile, capacity_center)

FOUR_PI = 4.0 * math.pi


def test_flat_flow_exact_solution():
    # dr/dt = r/2 on flat space: r(t) = e^{t/2}
    trace = imcf_flow(FlatProfile(), 1.0, 2.0)
    assert trace.final().r == pytest.approx(math.e, abs=1e-6)
    assert not trace.halted_at_horizon


def test_area_growth_exactly_exponential():
    for prof, r0 in ((FlatProfile(), 1.0),
                     (ConformalSchwarzschildProfile(-1.0), 0.5),
                     (bump_profile(), 1.0)):
        trace = imcf_flow(prof, r0, 5.0)
        a0 = trace.states[0].area
        for s in trace.states:
            assert s.area * math.exp(-s.t) == pytest.approx(a0, rel=1e-6)


def test_states_strictly_increasing():
    trace = imcf_flow(FlatProfile(), 1.0, 3.0)
    for a, b in zip(trace.states, trace.states[1:]):
        assert b.t > a.t and b.r > a.r
        assert b.mean_curvature > 0.0


def test_hawking_constant_outside_horizon():
    # positive-mass slice, flow started outside the horizon
    prof = ConformalSchwarzschildProfile(1.0)
    trace = imcf_flow(prof, 1.0, 4.0)
    for s in trace.states:
        assert s.hawking == pytest.approx(1.0, abs=1e-8)


def test_flow_validates_inputs():
    with pytest.raises(DomainError):
        imcf_flow(FlatProfile(), -1.0, 1.0)
    with pytest.raises(DomainError):
        imcf_flow(FlatProfile(), 1.0, 0.0)


def test_flow_halts_at_horizon():
    # A = 4 pi (2 + cos r): A' vanishes at r = 2 pi ahead of the start
    prof = CustomProfile(
        lambda r: FOUR_PI * (2.0 + math.cos(r)),
        lambda r: -FOUR_PI * math.sin(r),
        lambda r: -FOUR_PI * math.cos(r),
        r_min=0.0, r_max=4.0 * math.pi)
    trace = imcf_flow(prof, 3.5, 50.0)
    assert trace.halted_at_horizon
    assert trace.final().r == pytest.approx(2.0 * math.pi, abs=1e-6)


def test_geroch_no_violations_flat():
    trace = imcf_flow(FlatProfile(), 1.0, 5.0)
    assert geroch_report(trace, FlatProfile()) == []


def test_geroch_no_violations_schwarzschild():
    prof = ConformalSchwarzschildProfile(-1.0)
    trace = imcf_flow(prof, 0.3, 5.0)
    assert geroch_report(trace, prof) == []
    for s in trace.states:
        assert s.hawking == pytest.approx(-1.0, abs=1e-8)


def test_geroch_violations_on_negative_curvature_bump():
    prof = bump_profile()
    trace = imcf_flow(prof, 1.0, 4.0)
    violations = geroch_report(trace, prof)
    assert violations
    # the reported decreases occur where the scalar curvature is negative
    assert all(v.scalar_curvature < 0.0 for v in violations)
    assert trace.violations  # also recorded on the trace itself


def test_geroch_empty_trace():
    from negmass.imcf import FlowTrace
    with pytest.raises(DomainError):
        geroch_report(FlowTrace(states=()), FlatProfile())


def test_capacity_energy_bound_values():
    assert capacity_energy_bound(FOUR_PI, 0.0) == pytest.approx(16.0 * math.pi, rel=1e-14)
    # bound -> 0 as the area shrinks with bounded mass (like A^{1/4})
    vals = [capacity_energy_bound(a, -1.0) for a in (1e-2, 1e-6, 1e-12)]
    assert vals == sorted(vals, reverse=True)
    assert vals[-1] < 0.05
    assert capacity_energy_bound(0.0, -5.0) == 0.0
    assert capacity_energy_bound(1.0, 0.5) > 0.0
    with pytest.raises(DomainError):
        capacity_energy_bound(-1.0, 0.0)


def test_flat_sphere_bound():
    check = verify_capacity_bound(FlatProfile(), 1.0)
    assert check.capacity == pytest.approx(1.0, rel=1e-9)
    assert check.bound == pytest.approx(16.0 * math.pi, rel=1e-12)
    assert check.holds


def test_capacity_bound_schwarzschild_sweep():
    # capacity of the sphere at arclength s shrinks like s^{1/3}
    prof = ConformalSchwarzschildProfile(-1.0)
    caps = []
    for r0 in (0.1, 0.01, 0.001, 1e-6):
        check = verify_capacity_bound(prof, r0)
        assert check.holds
        caps.append(check.capacity)
    assert caps == sorted(caps, reverse=True)
    assert caps[-1] < 1e-2  # capacities head to zero with the surfaces


def test_capacity_bound_all_builtin_profiles():
    profiles = [FlatProfile(), ConformalSchwarzschildProfile(-1.0),
                ConformalSchwarzschildProfile(2.0), PowerLawProfile(3.0, 0.5),
                PowerLawProfile(5.0, 2.0), bump_profile()]
    for prof in profiles:
        for r0 in (0.1, 1.0, 10.0):
            assert verify_capacity_bound(prof, r0).holds


def test_positive_center_capacity_contrapositive():
    # p < 1: capacities of shrinking spheres do NOT go to zero, and the
    # central mass is -inf, consistent with the capacity theorem
    prof = PowerLawProfile(3.0, 0.5)
    from negmass.spherical import radial_capacity, regular_mass
    caps = [radial_capacity(prof, r0) for r0 in (0.1, 0.01, 0.001)]
    center = capacity_center(prof)
    assert center > 0.0
    assert caps[-1] > 0.9 * center
    assert regular_mass(prof) == -math.inf


def test_flow_hawking_limit_equals_adm():
    for prof, r0 in ((FlatProfile(), 1.0),
                     (ConformalSchwarzschildProfile(-1.0), 0.5),
                     (bump_profile(), 1.0)):
        trace = imcf_flow(prof, r0, 16.0)
        assert trace.final().hawking == pytest.approx(adm_mass(prof), abs=1e-4)
