"""Gait generator and IK tests."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from camopt.errors import UnknownTask
from camopt.gait import (
    GaitParams,
    command_schedule,
    ftg_foot_target,
    in_stance,
    leg_fk,
    leg_ik,
    pd_torque,
    step_length,
)
from camopt.model import build_model

PARAMS = GaitParams()
MODEL = build_model()


class TestFTG:
    def test_step_length_linear_rule(self):
        assert step_length(PARAMS, 1.0) == pytest.approx(0.25)
        assert step_length(PARAMS, -1.0) == pytest.approx(-0.25)
        assert step_length(PARAMS, 10.0) == PARAMS.max_step

    def test_mid_swing_apex_is_clearance(self):
        phase = 2 * math.pi * (PARAMS.duty + (1 - PARAMS.duty) / 2)
        _, z = ftg_foot_target(PARAMS, phase, 0.0)
        assert z == pytest.approx(-PARAMS.nominal_height + PARAMS.clearance)

    def test_stance_flat_and_backward_sweep(self):
        c = 1.0
        xs = []
        for p in np.linspace(0, 2 * math.pi * PARAMS.duty, 20, endpoint=False):
            x, z = ftg_foot_target(PARAMS, p, c)
            xs.append(x)
            assert z == -PARAMS.nominal_height
        assert xs[0] == pytest.approx(step_length(PARAMS, c))
        assert all(a > b for a, b in zip(xs, xs[1:]))

    def test_continuous_across_boundaries(self):
        # max jump across stance/swing transitions under 1e-9 m
        for c in (0.0, 0.7, -1.2):
            for pb in (2 * math.pi * PARAMS.duty, 2 * math.pi):
                lo = ftg_foot_target(PARAMS, pb - 1e-12, c)
                hi = ftg_foot_target(PARAMS, pb + 1e-12, c)
                assert abs(lo[0] - hi[0]) < 1e-9
                assert abs(lo[1] - hi[1]) < 1e-9

    def test_stance_flag(self):
        assert in_stance(PARAMS, 0.1)
        assert not in_stance(PARAMS, 2 * math.pi * PARAMS.duty + 0.1)


class TestIK:
    def test_straight_down(self):
        q_hip, q_knee, clamped = leg_ik(MODEL, 0.0, -0.48)
        assert not clamped
        fx, fz = leg_fk(MODEL, q_hip, q_knee)
        assert (fx, fz) == pytest.approx((0.0, -0.48), abs=1e-12)
        # law of cosines: cos(q_knee) = (r^2 - l1^2 - l2^2) / (2 l1 l2)
        assert q_knee == pytest.approx(math.acos(0.28), abs=1e-12)

    def test_round_trip_dense(self):
        rng = np.random.default_rng(0)
        n = 0
        while n < 10000:
            x = rng.uniform(-0.55, 0.55)
            z = rng.uniform(-0.59, -0.1)
            r = math.hypot(x, z)
            if not 0.05 < r < 0.595:
                continue
            n += 1
            q_hip, q_knee, clamped = leg_ik(MODEL, x, z)
            assert not clamped
            fx, fz = leg_fk(MODEL, q_hip, q_knee)
            assert math.hypot(fx - x, fz - z) < 1e-9

    def test_out_of_reach_clamped(self):
        q_hip, q_knee, clamped = leg_ik(MODEL, 0.0, -0.9)
        assert clamped
        fx, fz = leg_fk(MODEL, q_hip, q_knee)
        assert math.hypot(fx, fz) == pytest.approx(0.599, abs=1e-9)

    def test_knee_angle_positive(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            x = rng.uniform(-0.4, 0.4)
            z = rng.uniform(-0.58, -0.2)
            _, q_knee, _ = leg_ik(MODEL, x, z)
            assert 0.0 <= q_knee <= math.pi


@given(
    x=st.floats(-0.55, 0.55),
    z=st.floats(-0.59, -0.05),
)
@settings(max_examples=300, deadline=None)
def test_ik_fk_round_trip_property(x, z):
    q_hip, q_knee, clamped = leg_ik(MODEL, x, z)
    fx, fz = leg_fk(MODEL, q_hip, q_knee)
    if clamped:
        # targets here are beyond full reach only; the solution lands on the
        # clamped radius (inputs keep |target| well above the inner bound)
        assert math.hypot(fx, fz) == pytest.approx(0.599, abs=1e-9)
    else:
        assert math.hypot(fx - x, fz - z) < 1e-9


class TestPD:
    def test_linear_region(self):
        assert pd_torque(PARAMS, 0.5, 0.4, 1.0, 60.0) == pytest.approx(
            80.0 * 0.1 - 2.0
        )

    def test_saturation(self):
        assert pd_torque(PARAMS, 2.0, 0.0, 0.0, 60.0) == 60.0
        assert pd_torque(PARAMS, -2.0, 0.0, 0.0, 60.0) == -60.0


class TestCommands:
    def test_constant_tasks(self):
        rng = np.random.default_rng(0)
        for task in ("forward_1ms", "payload", "rough"):
            cmd = command_schedule(task, 400, 0.01, rng)
            assert cmd[-1] == 1.0
            assert cmd[0] == 0.0  # ramp starts from zero
            assert np.all(np.abs(cmd) <= 1.0)
        assert np.all(command_schedule("stand", 100, 0.01, rng) == 0.0)

    def test_random_commands_bounds_and_segments(self):
        rng = np.random.default_rng(7)
        cmd = command_schedule("random_commands", 3000, 0.01, rng)
        assert np.all(np.abs(cmd) <= 1.2)
        # piecewise constant after the ramp: changes only at segment edges
        tail = cmd[100:]
        changes = np.nonzero(np.diff(tail))[0]
        assert len(changes) <= 10

    def test_deterministic_given_seed(self):
        a = command_schedule("random_commands", 3000, 0.01, np.random.default_rng(42))
        b = command_schedule("random_commands", 3000, 0.01, np.random.default_rng(42))
        np.testing.assert_array_equal(a, b)

    def test_unknown_task(self):
        with pytest.raises(UnknownTask):
            command_schedule("stairs", 100, 0.01, np.random.default_rng(0))
