import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trapsqueeze.analysis import log_negativity
from trapsqueeze.errors import InvalidSchedule, NoSecularWell, UnsupportedDimension
from trapsqueeze.gaussian import ground_state_cm
from trapsqueeze.trap import (
    RampSchedule,
    TrapField,
    TrapParams,
    coeffs_at,
    initial_state,
    quad_form_pair,
    quad_form_single,
    secular_form,
    secular_frequency,
)

SINGLE = TrapParams()


def test_coeffs_at_ramp_midpoint():
    sched = RampSchedule([(0, -0.001, 0.1), (4, -0.1, 0.1)])
    a, q = coeffs_at(sched, 2.0)
    assert a == pytest.approx(-0.0505)
    assert q == pytest.approx(0.1)


def test_coeffs_at_constant_extrapolation():
    assert coeffs_at(RampSchedule([(0, 1, 0)]), 57.0) == (1.0, 0.0)
    sched = RampSchedule([(1, 2, 3), (2, 4, 5)])
    assert coeffs_at(sched, 0.0) == (2.0, 3.0)
    assert coeffs_at(sched, 10.0) == (4.0, 5.0)


def test_coeffs_at_fast_switch_midpoint():
    a, q = coeffs_at(RampSchedule([(0, 200, 0), (0.2, 2, 0)]), 0.1)
    assert a == pytest.approx(101.0)
    assert q == 0.0


def test_coeffs_at_vectorised():
    sched = RampSchedule([(0, 0, 0), (1, 1, 2)])
    a, q = coeffs_at(sched, np.array([0.0, 0.25, 1.0, 3.0]))
    np.testing.assert_allclose(a, [0, 0.25, 1, 1])
    np.testing.assert_allclose(q, [0, 0.5, 2, 2])


def test_instantaneous_switch_is_right_continuous():
    sched = RampSchedule([(0, 200, 0), (0, 2, 0)])
    assert coeffs_at(sched, 0.0) == (2.0, 0.0)
    assert sched.initial == (200.0, 0.0)
    mid = RampSchedule([(0, 1, 0), (5, 1, 0), (5, 3, 0), (6, 3, 0)])
    assert coeffs_at(mid, 4.999) == pytest.approx((1.0, 0.0))
    assert coeffs_at(mid, 5.0) == (3.0, 0.0)


@pytest.mark.parametrize(
    "bps",
    [[], [(1, 0, 0), (0, 1, 0)], [(0, float("nan"), 0)], [(0, 1)], [(0, 1, float("inf"))]],
)
def test_invalid_schedules(bps):
    with pytest.raises(InvalidSchedule):
        RampSchedule(bps)


bp_lists = st.lists(
    st.tuples(
        st.floats(0.01, 5.0),
        st.floats(-10, 10, allow_nan=False),
        st.floats(-10, 10, allow_nan=False),
    ),
    min_size=1,
    max_size=6,
)


@settings(max_examples=80, deadline=None)
@given(steps=bp_lists)
def test_coeffs_at_reproduces_breakpoints_and_is_continuous(steps):
    t = 0.0
    bps = []
    for dt, a, q in steps:
        t += dt
        bps.append((t, a, q))
    sched = RampSchedule(bps)
    for tb, a, q in bps:
        assert coeffs_at(sched, tb) == pytest.approx((a, q))
        # slopes are at most 20 / 0.01, so a 1e-9 nudge moves by < 3e-6
        lo = coeffs_at(sched, tb - 1e-9)
        hi = coeffs_at(sched, tb + 1e-9)
        assert lo == pytest.approx((a, q), abs=3e-6)
        assert hi == pytest.approx((a, q), abs=3e-6)


def test_quad_form_single_reference_is_identity():
    # a0 + q0^2/2 = 4 gives w_pw = 1; at t = pi/2 the AC term vanishes
    G = quad_form_single(SINGLE, 4.0, 0.5, math.pi / 2, omega_ref=1.0)
    np.testing.assert_allclose(G, np.eye(2), atol=1e-15)
    G = quad_form_single(SINGLE, 3.0, 0.5, 0.0, omega_ref=1.0)
    np.testing.assert_allclose(G, np.eye(2), atol=1e-15)


def test_quad_form_single_repulsive_dc():
    w = secular_frequency(-0.001, 0.1)
    G = quad_form_single(SINGLE, -0.1, 0.1, math.pi / 2, omega_ref=w)
    assert G[0, 0] < 0
    assert G[0, 0] == pytest.approx(-0.1 / (4 * w))
    # at t = 0 the AC term (+0.2) outweighs the DC repulsion
    assert quad_form_single(SINGLE, -0.1, 0.1, 0.0, omega_ref=w)[0, 0] > 0


def test_quad_form_single_direct_substitution():
    w = 0.37
    G = quad_form_single(SINGLE, 0.01, 0.01, math.pi / 2, omega_ref=w)
    assert G[0, 0] == pytest.approx(0.01 / (4 * w))
    assert G[1, 1] == w
    assert G[0, 1] == G[1, 0] == 0


def test_quad_form_unit_bearing_frequencies():
    params = TrapParams(omega_rf=2 * math.pi * 1e7, mass=40.0)
    w = secular_frequency(4.0, 0.0, params.omega_rf)
    np.testing.assert_allclose(quad_form_single(params, 4.0, 0.0, 1.3, w), np.eye(2))


def test_quad_form_pair_decoupled():
    pair = TrapParams(n_ions=2, xi=0.0, omega_long=0.3)
    G = quad_form_pair(pair, 0.7, 0.2, 0.4, omega_ref=0.5)
    G1 = quad_form_single(SINGLE, 0.7, 0.2, 0.4, omega_ref=0.5)
    np.testing.assert_allclose(G[np.ix_([0, 2], [0, 2])], G1)
    np.testing.assert_allclose(G[np.ix_([1, 3], [1, 3])], G1)
    assert G[0, 1] == G[0, 3] == G[1, 2] == 0


def test_quad_form_pair_fig3_entries():
    params = TrapParams.pair(coupling=0.5, xi=0.5)
    assert params.omega_long == pytest.approx(1.0)
    w = 2.0
    G = quad_form_pair(params, 200.0, 0.0, 0.0, omega_ref=w)
    assert G[0, 0] * w == pytest.approx(50 - 0.5)
    assert G[1, 1] * w == pytest.approx(50 - 0.5)
    assert G[0, 1] * w == pytest.approx(0.5)
    np.testing.assert_allclose(G[2:, 2:], w * np.eye(2))


def test_quad_form_pair_normal_modes():
    params = TrapParams.pair(coupling=0.05)
    w = 0.8
    a, q, t = 2.0, 0.3, 0.9
    G = quad_form_pair(params, a, q, t, omega_ref=w)
    freq2 = np.sort(np.linalg.eigvalsh(G[:2, :2]) * w)
    com = (a + 2 * q * math.cos(t)) / 4
    np.testing.assert_allclose(freq2, [com - 2 * 0.05, com], atol=1e-14)


@settings(max_examples=50, deadline=None)
@given(
    a=st.floats(-5, 50), q=st.floats(-5, 5), t=st.floats(0, 100),
    coupling=st.floats(0, 1), w=st.floats(0.01, 10),
)
def test_quad_form_pair_symmetries(a, q, t, coupling, w):
    G = quad_form_pair(TrapParams.pair(coupling=coupling), a, q, t, omega_ref=w)
    P = np.eye(4)[[1, 0, 3, 2]]
    np.testing.assert_array_equal(P @ G @ P.T, G)
    np.testing.assert_array_equal(G, G.T)
    np.testing.assert_array_equal(G[2:, 2:], w * np.eye(2))
    np.testing.assert_array_equal(G[:2, 2:], 0)


def test_quad_form_dimension_guards():
    with pytest.raises(UnsupportedDimension):
        quad_form_pair(SINGLE, 1, 0, 0, 1)
    with pytest.raises(UnsupportedDimension):
        quad_form_single(TrapParams.pair(), 1, 0, 0, 1)


def test_quad_form_broadcasts_over_time():
    ts = np.linspace(0, 10, 7)
    G = quad_form_single(SINGLE, 0.5, 0.2, ts, omega_ref=1.0)
    assert G.shape == (7, 2, 2)
    np.testing.assert_allclose(G[:, 0, 0], (0.5 + 0.4 * np.cos(ts)) / 4)


@pytest.mark.parametrize(
    "a, q, expected",
    [(4.0, 0.0, 1.0), (0.0, 0.1, 0.5 * math.sqrt(0.005)), (-0.001, 0.1, 0.5 * math.sqrt(0.004))],
)
def test_secular_frequency(a, q, expected):
    assert secular_frequency(a, q) == pytest.approx(expected, rel=1e-14)


def test_secular_frequency_weak_repulsion_value():
    assert secular_frequency(-0.001, 0.1) == pytest.approx(0.0316228, abs=1e-7)


@pytest.mark.parametrize("a, q", [(-0.1, 0.1), (0.0, 0.0), (-1.0, 1.0)])
def test_no_secular_well(a, q):
    with pytest.raises(NoSecularWell):
        secular_frequency(a, q)


@pytest.mark.parametrize("a0, q0", [(0.0001, 0.01), (-0.001, 0.1), (1.0, 0.0), (10.0, 2.0)])
def test_secular_form_ground_state_is_vacuum(a0, q0):
    sched = RampSchedule([(0, a0, q0)])
    np.testing.assert_allclose(ground_state_cm(secular_form(SINGLE, sched)), np.eye(2), atol=1e-12)
    np.testing.assert_array_equal(initial_state(SINGLE, sched), np.eye(2))


def test_initial_state_two_ions():
    sched = RampSchedule([(0, 200, 0), (1, 2, 0)])
    free = TrapParams(n_ions=2, xi=0.0)
    np.testing.assert_allclose(initial_state(free, sched), np.eye(4), atol=1e-12)
    coupled = TrapParams.pair(coupling=0.5)
    sigma = initial_state(coupled, sched)
    assert log_negativity(sigma) < 0.01
    assert log_negativity(sigma) > 0


def test_initial_state_errors():
    with pytest.raises(NoSecularWell):
        initial_state(SINGLE, RampSchedule([(0, -0.1, 0.1)]))


def test_trap_field_freezes_reference():
    sched = RampSchedule([(0, 4, 0), (10, 1, 0)])
    field = TrapField(SINGLE, sched)
    assert field.omega_ref == pytest.approx(1.0)
    np.testing.assert_allclose(field(10.0), np.diag([0.25, 1.0]))
    assert field(np.array([0.0, 5.0])).shape == (2, 2, 2)


@pytest.mark.parametrize(
    "kwargs",
    [dict(omega_rf=0), dict(mass=-1), dict(xi=-0.1), dict(n_ions=3), dict(omega_long=-1)],
)
def test_trap_params_invariants(kwargs):
    with pytest.raises(ValueError):
        TrapParams(**kwargs)


def test_schedule_transforms():
    s = RampSchedule([(0, 10, 0), (1, 10, 100), (2, 10, 0)])
    assert s.scaled(1.3).breakpoints == ((0, 10, 0), (1.3, 10, 100), (2.6, 10, 0))
    assert s.shifted(da=1, dq=0.5).breakpoints[1] == (1, 11, 100.5)
    assert s.scaled(0).times.tolist() == [0, 0, 0]
