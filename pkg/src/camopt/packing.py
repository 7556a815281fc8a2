"""Flat parameter/trace layouts shared by both episode-loop backends.

The hot loop (compiled or pure Python) consumes plain float64 arrays: one
parameter vector indexed by the P_* constants, per-tick command arrays, push
schedules, an optional heightfield, and a cubic-Hermite knee-torque table.
Keeping the layout in one module guarantees the two backends cannot drift
apart structurally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cam import CamDesign, MechanismLayout, spring_torque
from .gait import GaitParams
from .model import PlanarModel

# ---------------------------------------------------------------- parameters
(
    P_DT,
    P_DECIM,
    P_BASE_MASS,
    P_BASE_INERTIA,
    P_HIP_X,
    P_HIP_Z,
    P_THIGH_MASS,
    P_THIGH_LEN,
    P_THIGH_COM,
    P_THIGH_INERTIA,
    P_SHANK_MASS,
    P_SHANK_LEN,
    P_SHANK_COM,
    P_SHANK_INERTIA,
    P_GRAVITY,
    P_TORQUE_LIMIT,
    P_VEL_LIMIT,
    P_KN,
    P_DN,
    P_MU,
    P_VREG,
    P_FREQ,
    P_DUTY,
    P_CLEAR,
    P_HNOM,
    P_MAXSTEP,
    P_KP,
    P_KD,
    P_VGAIN,
    P_SHIFT_LIM,
    P_STAND_GATE,
    P_ATT_KP,
    P_ATT_KD,
    P_HEIGHT_KP,
    P_HEIGHT_KD,
    P_HIP_MOMENT,
    P_SWING_FF,
    P_ATT_REF,
    P_PITCH_STEP,
    P_NEUTRAL,
    P_PHASE_F,
    P_PHASE_H,
    P_PHASE_INIT,
    P_W_TRACK,
    P_W_STAB,
    P_W_ACT,
    P_W_TORQUE,
    P_W_VEL,
    P_W_SLIP,
    P_FALL_Z,
    P_FALL_PITCH,
    P_BLOWUP,
    P_HIP_LO,
    P_HIP_HI,
    P_KNEE_LO,
    P_KNEE_HI,
    NP_PARAMS,
) = range(57)

# ------------------------------------------------------------------- traces
(
    T_X,
    T_Z,
    T_PITCH,
    T_VX,
    T_VZ,
    T_PITCHRATE,
    T_Q_HF,
    T_Q_KF,
    T_Q_HH,
    T_Q_KH,
    T_QD_HF,
    T_QD_KF,
    T_QD_HH,
    T_QD_KH,
    T_TAU_HF,
    T_TAU_KF,
    T_TAU_HH,
    T_TAU_KH,
    T_TAUS_F,
    T_TAUS_H,
    T_CONTACT_F,
    T_CONTACT_H,
    T_CMD,
    T_REWARD,
    T_R_TRACK,
    T_R_STAB,
    T_R_ACT,
    T_R_TORQUE,
    T_R_VEL,
    T_R_SLIP,
    T_SLIP_INC,
    T_IK_CLAMPED,
    TRACE_W,
) = range(33)

# --------------------------------------------------------------- aggregates
(
    A_TICKS,
    A_STATUS,
    A_TORQUE_SQ_INT,
    A_SLIP_TOTAL,
    A_LIMIT_VIOL,
    A_END_TIME,
    A_FINAL_Q,          # 7 slots: q at exit
) = range(7)
A_FINAL_QD = A_FINAL_Q + 7   # 7 slots: qd at exit
NA_AGG = A_FINAL_QD + 7

STATUS_OK = 0
STATUS_FELL = 1
STATUS_BLOWUP = 2


@dataclass(frozen=True)
class SimParams:
    """Integration and episode-shape settings."""

    dt_physics: float = 2.0e-4
    decimation: int = 50          # physics steps per control tick
    duration: float = 4.0         # s
    fall_z: float = 0.25          # base height below which the episode ends
    fall_pitch: float = 1.0       # |pitch| above which the episode ends
    blowup: float = 1.0e6

    @property
    def dt_ctrl(self) -> float:
        return self.dt_physics * self.decimation

    @property
    def n_ticks(self) -> int:
        return int(round(self.duration / self.dt_ctrl))


@dataclass(frozen=True)
class RewardWeights:
    """Weights of the per-tick locomotion reward."""

    tracking: float = 1.0
    stability: float = 0.2
    action: float = 1.0e-4
    torque: float = 2.0e-4
    velocity: float = 0.5
    slip: float = 0.1


def pack_params(
    model: PlanarModel,
    gait: GaitParams,
    sim: SimParams,
    weights: RewardWeights,
    friction: float | None = None,
    phase_init: float = 0.0,
) -> np.ndarray:
    """Pack everything the inner loop needs into one float64 vector."""
    if tuple(model.base_com) != (0.0, 0.0):
        raise ValueError("episode loop assumes the base com at the base origin")
    p = np.zeros(NP_PARAMS)
    p[P_DT] = sim.dt_physics
    p[P_DECIM] = float(sim.decimation)
    p[P_BASE_MASS] = model.base_mass
    p[P_BASE_INERTIA] = model.base_inertia
    p[P_HIP_X] = model.hip_x
    p[P_HIP_Z] = model.hip_z
    p[P_THIGH_MASS] = model.thigh_mass
    p[P_THIGH_LEN] = model.thigh_len
    p[P_THIGH_COM] = model.thigh_com
    p[P_THIGH_INERTIA] = model.thigh_inertia
    p[P_SHANK_MASS] = model.shank_mass_eff
    p[P_SHANK_LEN] = model.shank_len
    p[P_SHANK_COM] = model.shank_com_eff
    p[P_SHANK_INERTIA] = model.shank_inertia_eff
    p[P_GRAVITY] = model.gravity
    p[P_TORQUE_LIMIT] = model.torque_limit
    p[P_VEL_LIMIT] = model.velocity_limit
    p[P_KN] = model.contact.k_normal
    p[P_DN] = model.contact.d_normal
    p[P_MU] = model.contact.friction if friction is None else friction
    p[P_VREG] = model.contact.v_regularize
    p[P_FREQ] = gait.frequency
    p[P_DUTY] = gait.duty
    p[P_CLEAR] = gait.clearance
    p[P_HNOM] = gait.nominal_height
    p[P_MAXSTEP] = gait.max_step
    p[P_KP] = gait.kp
    p[P_KD] = gait.kd
    p[P_VGAIN] = gait.velocity_gain
    p[P_SHIFT_LIM] = gait.shift_limit
    p[P_STAND_GATE] = gait.stand_gate
    p[P_ATT_KP] = gait.attitude_kp
    p[P_ATT_KD] = gait.attitude_kd
    p[P_HEIGHT_KP] = gait.height_kp
    p[P_HEIGHT_KD] = gait.height_kd
    p[P_HIP_MOMENT] = gait.hip_moment_gain
    p[P_SWING_FF] = gait.swing_ff
    p[P_ATT_REF] = gait.attitude_ref
    p[P_PITCH_STEP] = gait.pitch_step_gain
    p[P_NEUTRAL] = gait.neutral_gain
    p[P_PHASE_F] = gait.phase_offsets[0]
    p[P_PHASE_H] = gait.phase_offsets[1]
    p[P_PHASE_INIT] = phase_init
    p[P_W_TRACK] = weights.tracking
    p[P_W_STAB] = weights.stability
    p[P_W_ACT] = weights.action
    p[P_W_TORQUE] = weights.torque
    p[P_W_VEL] = weights.velocity
    p[P_W_SLIP] = weights.slip
    p[P_FALL_Z] = sim.fall_z
    p[P_FALL_PITCH] = sim.fall_pitch
    p[P_BLOWUP] = sim.blowup
    p[P_HIP_LO], p[P_HIP_HI] = model.hip_range
    p[P_KNEE_LO], p[P_KNEE_HI] = model.knee_range
    return p


def build_torque_table(
    design: CamDesign | None,
    layout: MechanismLayout,
    q_lo: float = -0.1,
    q_hi: float = 2.7,
    n: int = 2049,
) -> tuple[np.ndarray, np.ndarray, float, float]:
    """Sample the spring torque on a uniform grid with Hermite slopes.

    Returns (tau, slope, q0, dq). A None or rigid design yields an all-zero
    table, which the loop consumes identically to a spring-free joint.
    Raises NoTangent if any grid angle has no valid wire geometry.
    """
    qs = np.linspace(q_lo, q_hi, n)
    dq = qs[1] - qs[0]
    if design is None or design.is_rigid:
        z = np.zeros(n)
        return z, z.copy(), q_lo, float(dq)
    tau = np.array([spring_torque(design, layout, q) for q in qs])
    slope = np.empty(n)
    slope[1:-1] = (tau[2:] - tau[:-2]) / (2 * dq)
    slope[0] = (tau[1] - tau[0]) / dq
    slope[-1] = (tau[-1] - tau[-2]) / dq
    return tau, slope, q_lo, float(dq)


def eval_torque_table(tab_tau, tab_slope, q0, dq, q: float) -> float:
    """Cubic-Hermite lookup, clamped to the table ends (python reference)."""
    n = len(tab_tau)
    s = (q - q0) / dq
    if s <= 0.0:
        return float(tab_tau[0])
    if s >= n - 1:
        return float(tab_tau[n - 1])
    i = int(math.floor(s))
    f = s - i
    h00 = (1 + 2 * f) * (1 - f) * (1 - f)
    h10 = f * (1 - f) * (1 - f)
    h01 = f * f * (3 - 2 * f)
    h11 = f * f * (f - 1)
    return float(
        h00 * tab_tau[i]
        + h10 * dq * tab_slope[i]
        + h01 * tab_tau[i + 1]
        + h11 * dq * tab_slope[i + 1]
    )
