"""Cam mechanism tests: geometry, wire length, torque, and energy identity.

Expected values marked 'frozen' were produced by the independent oracles in
oracles.py (dense-polyline taut wire, brute-force tangency scan, direct
rotation evaluation) and pasted as literals.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from camopt.cam import (
    CamDesign,
    MechanismLayout,
    boundary_arc_length,
    cam_boundary,
    layout_valid_for,
    spring_elongation,
    spring_energy,
    spring_torque,
    tangent_point,
    torque_curve,
    wire_length,
)
from camopt.errors import NoTangent

from oracles import boundary_point_oracle, polyline_wire_length, tangent_scan_oracle

LAYOUT = MechanismLayout()
REP = CamDesign(q_bar=0.36, a=0.081, b=0.060, phi0=0.0, k_s=4154.0)


class TestBoundary:
    def test_boundary_point_frozen(self):
        # frozen: independent rotation evaluation of (a=0.03, b=0.01,
        # phi0=0.5, q=0.2, theta=1.1)
        p = cam_boundary(CamDesign(0.0, 0.03, 0.01, 0.5), 0.2, 1.1)
        np.testing.assert_allclose(
            p, [0.0046665680461671095, 0.0155827691944774], rtol=0, atol=1e-15
        )

    def test_boundary_random_against_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            a, b = rng.uniform(0, 0.2, 2)
            phi0, q, th = rng.uniform(-3, 3, 3)
            p = cam_boundary(CamDesign(0.0, a, b, phi0), q, th)
            np.testing.assert_allclose(
                p, boundary_point_oracle(a, b, phi0, q, th), rtol=0, atol=1e-14
            )

    def test_full_perimeter_unit_circle(self):
        d = CamDesign(0.0, 1.0, 1.0, 0.0)
        assert boundary_arc_length(d, 0.0, 2 * math.pi) == pytest.approx(
            2 * math.pi, abs=1e-9
        )

    def test_perimeter_matches_elliptic_integral(self):
        from scipy.special import ellipe

        a, b = 0.081, 0.060
        m = 1.0 - (b / a) ** 2
        per = boundary_arc_length(CamDesign(0.0, a, b, 0.0), 0.0, 2 * math.pi)
        assert per == pytest.approx(4 * a * ellipe(m), abs=1e-9)


class TestTangent:
    def test_circle_closed_form_frozen(self):
        # r=0.06 circle, anchor 0.25, q=0.3: theta* = -q + arccos(r/D)
        d = CamDesign(q_bar=0.0, a=0.06, b=0.06, phi0=0.0)
        geo = tangent_point(d, LAYOUT, 0.3)
        assert geo.theta_star == pytest.approx(1.0284304757559333, abs=1e-12)
        assert geo.straight_len == pytest.approx(0.24269322199023194, abs=1e-12)
        assert geo.wrapped_arc_len == pytest.approx(0.12678973067003158, abs=1e-9)

    def test_circle_lever_cross_is_radius(self):
        # for a circular cam the moment arm of the wire about the centre is
        # exactly the radius, independent of knee angle
        for r in (0.03, 0.08, 0.12):
            d = CamDesign(q_bar=0.0, a=r, b=r, phi0=0.4)
            for q in (0.0, 0.7, 1.9, 2.6):
                geo = tangent_point(d, LAYOUT, q)
                cross = (
                    geo.lever_point[0] * geo.wire_dir[1]
                    - geo.lever_point[1] * geo.wire_dir[0]
                )
                assert cross == pytest.approx(-r, abs=1e-14)

    def test_tangency_residual_scaled(self):
        rng = np.random.default_rng(11)
        anchor = LAYOUT.anchor_point()
        for _ in range(500):
            d = CamDesign(
                q_bar=rng.uniform(0, 1),
                a=rng.uniform(1e-4, 0.12),
                b=rng.uniform(1e-4, 0.12),
                phi0=rng.uniform(-1.6, 1.6),
            )
            q = rng.uniform(0, 2.6)
            geo = tangent_point(d, LAYOUT, q)
            phi = d.phi0 + q
            th = geo.theta_star
            dem = np.array([-d.a * math.sin(th), d.b * math.cos(th)])
            c, s = math.cos(phi), math.sin(phi)
            de = np.array([c * dem[0] - s * dem[1], s * dem[0] + c * dem[1]])
            free = anchor - geo.lever_point
            residual = abs(free[0] * de[1] - free[1] * de[0])
            scale = (np.linalg.norm(anchor) + d.a + d.b) ** 2
            assert residual <= 1e-10 * scale

    def test_matches_bruteforce_scan(self):
        rng = np.random.default_rng(3)
        anchor = LAYOUT.anchor_point()
        for _ in range(20):
            d = CamDesign(
                q_bar=0.0,
                a=rng.uniform(0.005, 0.12),
                b=rng.uniform(0.005, 0.12),
                phi0=rng.uniform(-1.5, 1.5),
            )
            q = rng.uniform(0, 2.6)
            geo = tangent_point(d, LAYOUT, q)
            ref = tangent_scan_oracle(d.a, d.b, d.phi0, q, anchor, n_grid=200_000)
            diff = (geo.theta_star - ref + math.pi) % (2 * math.pi) - math.pi
            assert abs(diff) < 1e-6

    def test_anchor_inside_raises(self):
        d = CamDesign(q_bar=0.0, a=0.06, b=0.06, phi0=0.0)
        inside = MechanismLayout(anchor=(0.05, 0.0))
        with pytest.raises(NoTangent):
            tangent_point(d, inside, 0.5)

    def test_wrap_arc_inside_perimeter(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            d = CamDesign(
                q_bar=0.0,
                a=rng.uniform(0.003, 0.12),
                b=rng.uniform(0.003, 0.12),
                phi0=rng.uniform(-math.pi / 2, math.pi / 2),
            )
            per = boundary_arc_length(d, 0, 2 * math.pi)
            for q in np.linspace(0, 2.6, 9):
                geo = tangent_point(d, LAYOUT, q)
                assert 0.0 < geo.wrapped_arc_len < per


class TestWireLength:
    def test_quarter_arc_circle(self):
        # place the termination a quarter turn past the tangency point: total
        # length is the straight tangent plus a quarter of the circumference
        r, D = 0.05, 0.25
        gamma = math.acos(r / D)
        lay = MechanismLayout(anchor_offset=D, termination_theta=gamma + math.pi / 2)
        d = CamDesign(q_bar=0.0, a=r, b=r, phi0=0.0)
        expect = math.sqrt(D * D - r * r) + r * math.pi / 2
        assert wire_length(d, lay, 0.0) == pytest.approx(expect, abs=1e-9)

    def test_frozen_polyline_values(self):
        # frozen: 2e6-segment visibility-constrained polyline oracle
        assert wire_length(REP, LAYOUT, REP.q_bar) == pytest.approx(
            0.3919266007627268, abs=1e-9
        )
        assert spring_elongation(REP, LAYOUT, REP.q_bar + 0.5) == pytest.approx(
            0.036796489522630926, abs=1e-9
        )
        assert spring_torque(REP, LAYOUT, 1.3) == pytest.approx(
            -24.237595308648945, abs=1e-6
        )

    def test_random_against_polyline_oracle(self):
        rng = np.random.default_rng(13)
        anchor = LAYOUT.anchor_point()
        for _ in range(4):
            d = CamDesign(
                q_bar=rng.uniform(0, 1),
                a=rng.uniform(0.01, 0.12),
                b=rng.uniform(0.01, 0.12),
                phi0=rng.uniform(-1.5, 1.5),
            )
            q = rng.uniform(0, 2.6)
            ref = polyline_wire_length(
                d.a, d.b, d.phi0, q, anchor, LAYOUT.termination_theta
            )
            assert wire_length(d, LAYOUT, q) == pytest.approx(ref, abs=1e-7)

    def test_elongation_zero_at_rest_angle(self):
        assert spring_elongation(REP, LAYOUT, REP.q_bar) == 0.0


class TestTorque:
    def test_energy_gradient_identity(self):
        # lever-arm torque must equal -dU/dq of the elastic energy; central
        # differences with h=1e-6 on the exact wire-length path
        rng = np.random.default_rng(17)
        h = 1e-6
        for _ in range(40):
            d = CamDesign(
                q_bar=rng.uniform(0, 1),
                a=rng.uniform(0.005, 0.12),
                b=rng.uniform(0.005, 0.12),
                phi0=rng.uniform(-1.5, 1.5),
            )
            for q in rng.uniform(0.0, 2.6, 5):
                tau = spring_torque(d, LAYOUT, q)
                dU = (
                    spring_energy(d, LAYOUT, q + h) - spring_energy(d, LAYOUT, q - h)
                ) / (2 * h)
                assert abs(tau + dU) <= 1e-6 * max(1.0, abs(tau))

    def test_tension_only(self):
        d = CamDesign(q_bar=0.8, a=0.07, b=0.05, phi0=0.2)
        for q in np.linspace(0.0, 0.79, 10):
            assert spring_torque(d, LAYOUT, q) == 0.0
        assert spring_torque(d, LAYOUT, 1.4) != 0.0

    def test_rigid_point_cam(self):
        d = CamDesign(q_bar=0.3, a=0.0, b=0.0, phi0=0.0)
        assert d.is_rigid
        for q in np.linspace(0, 2.6, 7):
            assert spring_torque(d, LAYOUT, q) == 0.0
            assert spring_elongation(d, LAYOUT, q) == 0.0
        geo = tangent_point(d, LAYOUT, 1.0)
        np.testing.assert_array_equal(geo.lever_point, [0.0, 0.0])
        assert geo.straight_len == pytest.approx(0.25)
        assert geo.wrapped_arc_len == 0.0

    def test_continuity_over_joint_range(self):
        # branch selection must never flip: the torque profile over a dense
        # grid has no jumps beyond what a bounded slope allows
        rng = np.random.default_rng(23)
        designs = [REP] + [
            CamDesign(
                q_bar=rng.uniform(0, 1),
                a=rng.uniform(0.01, 0.12),
                b=rng.uniform(0.01, 0.12),
                phi0=rng.uniform(-1.5, 1.5),
            )
            for _ in range(5)
        ]
        qs = np.linspace(0, 2.6, 2001)
        for d in designs:
            taus = np.array([spring_torque(d, LAYOUT, q) for q in qs])
            assert np.all(np.isfinite(taus))
            assert np.max(np.abs(np.diff(taus))) < 1.0

    def test_extension_assist_when_engaged(self):
        # default layout: flexing past q_bar stretches the spring and yields
        # extension (negative) torque, the gravity-compensating direction
        for q in (0.6, 1.0, 1.5, 2.2):
            assert spring_torque(REP, LAYOUT, q) < 0.0


class TestTorqueCurve:
    def test_table_fields_and_validity(self):
        rows = torque_curve(REP, LAYOUT, 0.0, 2.6, 53)
        assert rows.shape == (53,)
        assert set(rows.dtype.names) == {
            "q_rad",
            "tau_Nm",
            "elongation_m",
            "theta_star_rad",
            "valid",
        }
        assert np.all(rows["valid"] == 1)
        assert rows["q_rad"][0] == 0.0 and rows["q_rad"][-1] == pytest.approx(2.6)
        assert np.all(np.isfinite(rows["tau_Nm"]))

    def test_invalid_rows_flagged(self):
        d = CamDesign(q_bar=0.0, a=0.06, b=0.06, phi0=0.0)
        inside = MechanismLayout(anchor=(0.05, 0.0))
        rows = torque_curve(d, inside, 0.0, 1.0, 5)
        assert np.all(rows["valid"] == 0)
        assert np.all(np.isnan(rows["tau_Nm"]))
        assert not layout_valid_for(d, inside)

    def test_default_layout_valid_over_box(self):
        rng = np.random.default_rng(31)
        for _ in range(20):
            d = CamDesign(
                q_bar=rng.uniform(0, 1),
                a=rng.uniform(0, 0.12),
                b=rng.uniform(0, 0.12),
                phi0=rng.uniform(-math.pi / 2, math.pi / 2),
            )
            assert layout_valid_for(d, LAYOUT)


@given(
    a=st.floats(0.0, 0.12),
    b=st.floats(0.0, 0.12),
    phi0=st.floats(-math.pi / 2, math.pi / 2),
    q_bar=st.floats(0.0, 1.0),
    q=st.floats(0.0, 2.6),
)
@settings(max_examples=150, deadline=None)
def test_torque_finite_and_slack_exact_zero(a, b, phi0, q_bar, q):
    d = CamDesign(q_bar=q_bar, a=a, b=b, phi0=phi0)
    tau = spring_torque(d, LAYOUT, q)
    assert math.isfinite(tau)
    if spring_elongation(d, LAYOUT, q) <= 0.0:
        assert tau == 0.0
