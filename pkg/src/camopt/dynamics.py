"""Reference rigid-body dynamics of the planar walker.

This is the readable, array-based implementation used by tests and by any
code outside the hot episode loop. The compiled loop re-derives the same
quantities with scalar arithmetic; the test-suite pins both against each
other and against finite-difference energy oracles.

The mass matrix is assembled by composite-rigid-body accumulation: body
spatial inertias (expressed at a common world origin, planar coordinates
(omega, vx, vy)) are summed leaf-to-root into per-joint composite inertias,
and M_ij contracts the joint motion subspaces against the composite inertia
of the deeper joint. Bias forces come from a Newton-Euler pass with zero
joint acceleration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import BASE_X, BASE_Z, HIP_F, HIP_H, KNEE_F, KNEE_H, NQ, PITCH, PlanarModel

# body order used throughout: base, thigh_f, shank_f, thigh_h, shank_h
_LEGS = ((HIP_F, KNEE_F, 1.0), (HIP_H, KNEE_H, -1.0))  # (hip dof, knee dof, hip side)


@dataclass
class Kinematics:
    """World-frame positions and angles of every body at a configuration."""

    base: np.ndarray
    hips: np.ndarray        # (2, 2): front, hind
    knees: np.ndarray
    feet: np.ndarray
    body_coms: np.ndarray   # (5, 2)
    body_angles: np.ndarray  # (5,)


def _rot(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s], [s, c]])


def _leg_dir(a: float) -> np.ndarray:
    """Unit vector of a link at angle `a` measured from straight down."""
    return np.array([math.sin(a), -math.cos(a)])


def _perp(v: np.ndarray) -> np.ndarray:
    return np.array([-v[1], v[0]])


def fk(model: PlanarModel, q: np.ndarray) -> Kinematics:
    """Forward kinematics of hips, knees, feet, and body coms."""
    base = np.array([q[BASE_X], q[BASE_Z]])
    R = _rot(q[PITCH])
    hips = np.empty((2, 2))
    knees = np.empty((2, 2))
    feet = np.empty((2, 2))
    coms = np.empty((5, 2))
    angles = np.empty(5)
    coms[0] = base + R @ np.asarray(model.base_com)
    angles[0] = q[PITCH]
    for i, (hip_dof, knee_dof, side) in enumerate(_LEGS):
        hip = base + R @ np.array([side * model.hip_x, model.hip_z])
        alpha = q[PITCH] + q[hip_dof]
        beta = alpha - q[knee_dof]
        knee = hip + model.thigh_len * _leg_dir(alpha)
        foot = knee + model.shank_len * _leg_dir(beta)
        hips[i] = hip
        knees[i] = knee
        feet[i] = foot
        coms[1 + 2 * i] = hip + model.thigh_com * _leg_dir(alpha)
        coms[2 + 2 * i] = knee + model.shank_com_eff * _leg_dir(beta)
        angles[1 + 2 * i] = alpha
        angles[2 + 2 * i] = beta
    return Kinematics(base, hips, knees, feet, coms, angles)


def _body_masses(model: PlanarModel):
    return (
        (model.base_mass, model.base_inertia),
        (model.thigh_mass, model.thigh_inertia),
        (model.shank_mass_eff, model.shank_inertia_eff),
        (model.thigh_mass, model.thigh_inertia),
        (model.shank_mass_eff, model.shank_inertia_eff),
    )


# which bodies are moved by each joint dof (body order above)
_SUBTREE = {
    BASE_X: (0, 1, 2, 3, 4),
    BASE_Z: (0, 1, 2, 3, 4),
    PITCH: (0, 1, 2, 3, 4),
    HIP_F: (1, 2),
    KNEE_F: (2,),
    HIP_H: (3, 4),
    KNEE_H: (4,),
}
_ANCESTORS = {
    BASE_X: (BASE_X,),
    BASE_Z: (BASE_X, BASE_Z),
    PITCH: (BASE_X, BASE_Z, PITCH),
    HIP_F: (BASE_X, BASE_Z, PITCH, HIP_F),
    KNEE_F: (BASE_X, BASE_Z, PITCH, HIP_F, KNEE_F),
    HIP_H: (BASE_X, BASE_Z, PITCH, HIP_H),
    KNEE_H: (BASE_X, BASE_Z, PITCH, HIP_H, KNEE_H),
}
# knees rotate the shank by -q relative to the thigh (flexion positive)
_AXIS_SIGN = {KNEE_F: -1.0, KNEE_H: -1.0}


def _joint_subspaces(model: PlanarModel, kin: Kinematics) -> np.ndarray:
    """Planar motion subspace of each dof at the world origin: (omega, vx, vy)."""
    S = np.zeros((NQ, 3))
    S[BASE_X] = (0.0, 1.0, 0.0)
    S[BASE_Z] = (0.0, 0.0, 1.0)
    pivots = {PITCH: kin.base, HIP_F: kin.hips[0], KNEE_F: kin.knees[0],
              HIP_H: kin.hips[1], KNEE_H: kin.knees[1]}
    for dof, p in pivots.items():
        sgn = _AXIS_SIGN.get(dof, 1.0)
        # twist of a rotation about point p, linear part taken at the origin
        S[dof] = (sgn, sgn * p[1], -sgn * p[0])
    return S


def _spatial_inertia(mass: float, inertia: float, com: np.ndarray) -> np.ndarray:
    """Planar spatial inertia of one body expressed at the world origin."""
    cx, cy = com
    return np.array(
        [
            [inertia + mass * (cx * cx + cy * cy), -mass * cy, mass * cx],
            [-mass * cy, mass, 0.0],
            [mass * cx, 0.0, mass],
        ]
    )


def mass_matrix(model: PlanarModel, q: np.ndarray) -> np.ndarray:
    """Joint-space mass matrix by composite-rigid-body accumulation."""
    kin = fk(model, q)
    S = _joint_subspaces(model, kin)
    bodies = _body_masses(model)
    I_body = [
        _spatial_inertia(m, i, kin.body_coms[b]) for b, (m, i) in enumerate(bodies)
    ]
    M = np.zeros((NQ, NQ))
    for j in range(NQ):
        IC = sum(I_body[b] for b in _SUBTREE[j])
        f = IC @ S[j]
        for i in _ANCESTORS[j]:
            M[i, j] = M[j, i] = S[i] @ f
    return M


def body_jacobians(model: PlanarModel, q: np.ndarray, kin: Kinematics | None = None):
    """Com translational Jacobians (5 bodies x 2 x NQ) and angular rows."""
    if kin is None:
        kin = fk(model, q)
    Jv = np.zeros((5, 2, NQ))
    Jw = np.zeros((5, NQ))
    pivots = {PITCH: kin.base, HIP_F: kin.hips[0], KNEE_F: kin.knees[0],
              HIP_H: kin.hips[1], KNEE_H: kin.knees[1]}
    for b in range(5):
        p = kin.body_coms[b]
        Jv[b, 0, BASE_X] = 1.0
        Jv[b, 1, BASE_Z] = 1.0
        for dof, moved in _SUBTREE.items():
            if dof in (BASE_X, BASE_Z) or b not in moved:
                continue
            sgn = _AXIS_SIGN.get(dof, 1.0)
            Jv[b, :, dof] = sgn * _perp(p - pivots[dof])
            Jw[b, dof] = sgn
    return Jv, Jw


def foot_jacobian(model: PlanarModel, q: np.ndarray, leg: int,
                  kin: Kinematics | None = None) -> np.ndarray:
    """Translational Jacobian (2 x NQ) of one foot point."""
    if kin is None:
        kin = fk(model, q)
    hip_dof, knee_dof, _ = _LEGS[leg]
    p = kin.feet[leg]
    J = np.zeros((2, NQ))
    J[0, BASE_X] = 1.0
    J[1, BASE_Z] = 1.0
    J[:, PITCH] = _perp(p - kin.base)
    J[:, hip_dof] = _perp(p - kin.hips[leg])
    J[:, knee_dof] = -_perp(p - kin.knees[leg])
    return J


def _bias_accels(model: PlanarModel, q: np.ndarray, qd: np.ndarray):
    """Com accelerations with qdd = 0 (centripetal terms only)."""
    R = _rot(q[PITCH])
    wp = qd[PITCH]
    acc = np.zeros((5, 2))
    acc[0] = -(R @ np.asarray(model.base_com)) * wp * wp
    for i, (hip_dof, knee_dof, side) in enumerate(_LEGS):
        r_hip = R @ np.array([side * model.hip_x, model.hip_z])
        a_hip = -r_hip * wp * wp
        alpha = q[PITCH] + q[hip_dof]
        beta = alpha - q[knee_dof]
        alpha_d = wp + qd[hip_dof]
        beta_d = alpha_d - qd[knee_dof]
        a_knee = a_hip - model.thigh_len * _leg_dir(alpha) * alpha_d * alpha_d
        acc[1 + 2 * i] = a_hip - model.thigh_com * _leg_dir(alpha) * alpha_d * alpha_d
        acc[2 + 2 * i] = a_knee - model.shank_com_eff * _leg_dir(beta) * beta_d * beta_d
    return acc


def bias_forces(model: PlanarModel, q: np.ndarray, qd: np.ndarray) -> np.ndarray:
    """Coriolis/centrifugal plus gravity generalized forces.

    Newton-Euler with qdd = 0: each body needs force m*(a_bias + g z_hat) at
    its com (planar bodies have no gyroscopic torque and joint angles are
    linear in q, so the angular bias vanishes); mapping through the com
    Jacobians gives the joint-space bias vector h with M qdd + h = tau.
    """
    kin = fk(model, q)
    Jv, _ = body_jacobians(model, q, kin)
    acc = _bias_accels(model, q, qd)
    g = np.array([0.0, model.gravity])
    h = np.zeros(NQ)
    for b, (m, _) in enumerate(_body_masses(model)):
        h += Jv[b].T @ (m * (acc[b] + g))
    return h


def gravity_forces(model: PlanarModel, q: np.ndarray) -> np.ndarray:
    """Gravity-only generalized forces (bias at zero velocity)."""
    return bias_forces(model, q, np.zeros(NQ))


def kinetic_energy(model: PlanarModel, q: np.ndarray, qd: np.ndarray) -> float:
    M = mass_matrix(model, q)
    return 0.5 * float(qd @ M @ qd)


def potential_energy(model: PlanarModel, q: np.ndarray) -> float:
    kin = fk(model, q)
    pe = 0.0
    for b, (m, _) in enumerate(_body_masses(model)):
        pe += m * model.gravity * kin.body_coms[b][1]
    return pe


def forward_dynamics(
    model: PlanarModel,
    q: np.ndarray,
    qd: np.ndarray,
    tau: np.ndarray,
    foot_forces: np.ndarray | None = None,
) -> np.ndarray:
    """Joint accelerations from applied generalized forces and foot forces.

    Args:
        tau: generalized force vector (length NQ).
        foot_forces: optional (2, 2) world-frame forces on (front, hind) feet.
    """
    from scipy.linalg import cho_factor, cho_solve

    kin = fk(model, q)
    rhs = np.asarray(tau, dtype=float) - bias_forces(model, q, qd)
    if foot_forces is not None:
        for leg in range(2):
            J = foot_jacobian(model, q, leg, kin)
            rhs = rhs + J.T @ np.asarray(foot_forces[leg], dtype=float)
    M = mass_matrix(model, q)
    return cho_solve(cho_factor(M, lower=True), rhs)


def terrain_height(terrain, x: float) -> float:
    """Ground height at world x.

    `terrain` is None for flat ground at z = 0, or a tuple (x0, dx, heights)
    sampled on a uniform grid with linear interpolation and clamped ends.
    """
    if terrain is None:
        return 0.0
    x0, dx, hs = terrain
    s = (x - x0) / dx
    i = int(math.floor(s))
    if i < 0:
        return float(hs[0])
    if i >= len(hs) - 1:
        return float(hs[-1])
    f = s - i
    return float(hs[i] * (1.0 - f) + hs[i + 1] * f)


def contact_force(
    model: PlanarModel,
    foot_pos: np.ndarray,
    foot_vel: np.ndarray,
    terrain=None,
    friction: float | None = None,
) -> tuple[np.ndarray, bool, float]:
    """Penalty normal force plus regularized Coulomb friction at one foot.

    Returns (world force, in_contact flag, slip speed beyond the
    regularization band in m/s). The normal force is clamped to push only;
    friction opposes tangential velocity with a linear regularization inside
    +/- v_regularize and saturates at mu * fn outside it.
    """
    cp = model.contact
    mu = cp.friction if friction is None else friction
    gap = foot_pos[1] - terrain_height(terrain, foot_pos[0])
    if gap >= 0.0:
        return np.zeros(2), False, 0.0
    fn = -cp.k_normal * gap - cp.d_normal * foot_vel[1]
    if fn <= 0.0:
        return np.zeros(2), False, 0.0
    vt = foot_vel[0]
    sat = max(-1.0, min(1.0, vt / cp.v_regularize))
    ft = -mu * fn * sat
    slip = max(abs(vt) - cp.v_regularize, 0.0)
    return np.array([ft, fn]), True, slip
