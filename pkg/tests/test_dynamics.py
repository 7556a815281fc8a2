"""Rigid-body dynamics tests against finite-difference energy oracles.

The mass matrix is checked against the Hessian of a kinetic energy built
purely from forward kinematics (body velocities by finite differences of
positions), so the oracle never touches the analytic Jacobians or the
composite-rigid-body assembly it validates. Bias forces are checked against
the Christoffel/gravity form derived from M(q) and the potential.
"""

import math

import numpy as np
import pytest

from camopt import dynamics as dyn
from camopt.model import NQ, PITCH, build_model, nominal_stance_height

from oracles import mass_matrix_fd_oracle

MODEL = build_model()


def _random_config(rng):
    q = np.zeros(NQ)
    q[0] = rng.uniform(-1, 1)
    q[1] = rng.uniform(0.3, 0.7)
    q[2] = rng.uniform(-0.5, 0.5)
    q[3:] = rng.uniform(-1.0, 1.0, 4)
    q[4] = abs(q[4]) + 0.1
    q[6] = abs(q[6]) + 0.1
    return q


def _fk_kinetic_energy(model, q, v, h=1e-6):
    """KE from FK alone: com/angle velocities by central differences."""

    def coms_angles(qq):
        kin = dyn.fk(model, qq)
        return kin.body_coms.copy(), kin.body_angles.copy()

    masses = [
        (model.base_mass, model.base_inertia),
        (model.thigh_mass, model.thigh_inertia),
        (model.shank_mass_eff, model.shank_inertia_eff),
        (model.thigh_mass, model.thigh_inertia),
        (model.shank_mass_eff, model.shank_inertia_eff),
    ]
    cp, ap = coms_angles(q + h * v)
    cm, am = coms_angles(q - h * v)
    vel = (cp - cm) / (2 * h)
    om = (ap - am) / (2 * h)
    ke = 0.0
    for b, (m, i) in enumerate(masses):
        ke += 0.5 * m * float(vel[b] @ vel[b]) + 0.5 * i * om[b] ** 2
    return ke


class TestMassMatrix:
    def test_translation_rows_are_total_mass(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            M = dyn.mass_matrix(MODEL, _random_config(rng))
            assert M[0, 0] == pytest.approx(MODEL.total_mass, rel=1e-12)
            assert M[1, 1] == pytest.approx(MODEL.total_mass, rel=1e-12)
            assert M[0, 1] == pytest.approx(0.0, abs=1e-12)

    def test_matches_kinetic_energy_hessian(self):
        rng = np.random.default_rng(2)
        for _ in range(5):
            q = _random_config(rng)
            M = dyn.mass_matrix(MODEL, q)
            M_fd = mass_matrix_fd_oracle(
                lambda qq, vv: _fk_kinetic_energy(MODEL, qq, vv), q, NQ, h=1e-3
            )
            np.testing.assert_allclose(M, M_fd, rtol=0, atol=2e-5)

    def test_symmetric_positive_definite(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            M = dyn.mass_matrix(MODEL, _random_config(rng))
            np.testing.assert_array_equal(M, M.T)
            np.linalg.cholesky(M)

    def test_leg_blocks_decoupled(self):
        rng = np.random.default_rng(4)
        M = dyn.mass_matrix(MODEL, _random_config(rng))
        assert M[3, 5] == M[3, 6] == M[4, 5] == M[4, 6] == 0.0


class TestBiasForces:
    def test_gravity_row_is_weight(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            g = dyn.gravity_forces(MODEL, _random_config(rng))
            assert g[0] == pytest.approx(0.0, abs=1e-10)
            assert g[1] == pytest.approx(MODEL.total_mass * MODEL.gravity, rel=1e-12)

    def test_gravity_matches_potential_gradient(self):
        rng = np.random.default_rng(6)
        h = 1e-6
        for _ in range(5):
            q = _random_config(rng)
            g = dyn.gravity_forces(MODEL, q)
            for k in range(NQ):
                qp, qm = q.copy(), q.copy()
                qp[k] += h
                qm[k] -= h
                dpe = (
                    dyn.potential_energy(MODEL, qp) - dyn.potential_energy(MODEL, qm)
                ) / (2 * h)
                assert g[k] == pytest.approx(dpe, abs=1e-5)

    def test_velocity_terms_match_christoffel_form(self):
        # h_k = sum_ij (dM_kj/dq_i - 0.5 dM_ij/dq_k) qd_i qd_j + dPE/dq_k,
        # with the mass-matrix derivatives taken by finite differences
        rng = np.random.default_rng(7)
        fd = 1e-6
        for _ in range(4):
            q = _random_config(rng)
            qd = rng.uniform(-2, 2, NQ)
            dM = np.zeros((NQ, NQ, NQ))
            for k in range(NQ):
                qp, qm = q.copy(), q.copy()
                qp[k] += fd
                qm[k] -= fd
                dM[k] = (dyn.mass_matrix(MODEL, qp) - dyn.mass_matrix(MODEL, qm)) / (
                    2 * fd
                )
            coriolis = np.einsum("ikj,i,j->k", dM, qd, qd) - 0.5 * np.einsum(
                "kij,i,j->k", dM, qd, qd
            )
            h = dyn.bias_forces(MODEL, q, qd)
            expect = coriolis + dyn.gravity_forces(MODEL, q)
            np.testing.assert_allclose(h, expect, rtol=0, atol=1e-4)


class TestJacobians:
    def test_foot_jacobian_matches_fd(self):
        rng = np.random.default_rng(8)
        h = 1e-7
        for _ in range(5):
            q = _random_config(rng)
            for leg in range(2):
                J = dyn.foot_jacobian(MODEL, q, leg)
                for k in range(NQ):
                    qp, qm = q.copy(), q.copy()
                    qp[k] += h
                    qm[k] -= h
                    fdcol = (dyn.fk(MODEL, qp).feet[leg] - dyn.fk(MODEL, qm).feet[leg]) / (
                        2 * h
                    )
                    np.testing.assert_allclose(J[:, k], fdcol, rtol=0, atol=1e-6)


class TestForwardDynamics:
    def test_free_fall(self):
        q = np.zeros(NQ)
        q[1] = 1.0
        q[4] = q[6] = 0.8
        qdd = dyn.forward_dynamics(MODEL, q, np.zeros(NQ), np.zeros(NQ))
        # gravity accelerates the base straight down; articulation may stir
        # the joints but x must stay untouched at this symmetric posture
        assert qdd[1] < -5.0
        assert qdd[0] == pytest.approx(0.0, abs=1e-9)

    def test_foot_forces_obey_newton(self):
        # with zero joint torques the legs buckle, but the rate of change of
        # total linear momentum (rows x, z of M @ qdd at rest) must equal the
        # net external force exactly
        q = np.zeros(NQ)
        q[1] = nominal_stance_height(MODEL)
        q[3:] = [0.64, 1.287, 0.64, 1.287]
        W = MODEL.total_mass * MODEL.gravity
        forces = np.array([[3.0, W / 2], [-1.0, W / 2]])
        qdd = dyn.forward_dynamics(MODEL, q, np.zeros(NQ), np.zeros(NQ), forces)
        pdot = dyn.mass_matrix(MODEL, q) @ qdd
        assert pdot[0] == pytest.approx(2.0, abs=1e-9)
        assert pdot[1] == pytest.approx(0.0, abs=1e-9)


class TestContact:
    def test_no_force_above_ground(self):
        f, active, slip = dyn.contact_force(
            MODEL, np.array([0.0, 0.01]), np.array([0.0, -1.0])
        )
        assert not active and f[0] == f[1] == 0.0 and slip == 0.0

    def test_penalty_normal(self):
        f, active, _ = dyn.contact_force(
            MODEL, np.array([0.0, -0.001]), np.array([0.0, 0.0])
        )
        assert active
        assert f[1] == pytest.approx(100.0)

    def test_friction_saturates(self):
        f, _, slip = dyn.contact_force(
            MODEL, np.array([0.0, -0.001]), np.array([0.5, 0.0]), friction=1.0
        )
        assert f[0] == pytest.approx(-f[1])
        assert slip == pytest.approx(0.49)

    def test_pulling_clamped(self):
        # fast upward foot motion: damper would pull, must clamp to zero
        f, active, _ = dyn.contact_force(
            MODEL, np.array([0.0, -0.0001]), np.array([0.0, 1.0])
        )
        assert not active and f[1] == 0.0

    def test_heightfield_interp(self):
        terr = (0.0, 0.5, np.array([0.0, 0.1, 0.0]))
        assert dyn.terrain_height(terr, 0.25) == pytest.approx(0.05)
        assert dyn.terrain_height(terr, -3.0) == 0.0
        assert dyn.terrain_height(terr, 9.0) == 0.0
        f, active, _ = dyn.contact_force(
            MODEL, np.array([0.5, 0.09]), np.zeros(2), terrain=terr
        )
        assert active and f[1] == pytest.approx(1000.0)
