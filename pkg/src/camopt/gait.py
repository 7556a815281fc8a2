"""Heuristic trot-analog gait: phase generator, foot targets, IK, PD law.

The two planar legs step in anti-phase with duty factor above one half, so
each stride keeps a double-support overlap for load handover. Foot targets
are generated in the base frame relative to each hip: during stance the foot
sweeps backward at the commanded speed (planted-foot condition), during swing
it returns along a cubic smoothstep with a C1 vertical clearance bump. Step
length follows the linear rule command / (2 * frequency), capped for
reachability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UnknownTask
from .model import PlanarModel

TASKS = ("forward_1ms", "random_commands", "stand", "payload", "rough")

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class GaitParams:
    """Fixed gait-shape and joint-servo parameters."""

    frequency: float = 2.0       # strides per second
    duty: float = 0.6            # stance fraction; >0.5 gives double support
    clearance: float = 0.1       # swing apex height (m)
    nominal_height: float = 0.56  # hip-to-foot drop in stance (m)
    max_step: float = 0.36       # cap on step length (m)
    kp: float = 80.0
    kd: float = 2.0
    phase_offsets: tuple[float, float] = (0.0, math.pi)
    command_ramp: float = 0.4    # s, initial ramp of the speed command
    # Raibert foot-placement feedback: the horizontal foot target shifts by
    # velocity_gain * (base vx - command), clamped to +/- shift_limit. Purely
    # phase-driven targets are unstable in the plane: both hips sag the same
    # way under load, so the body creeps until a knee saturates and folds.
    velocity_gain: float = 0.12  # s
    # weight on the neutral-point part of the placement law; the speed
    # input to placement is low-passed over one stance so touchdown
    # position follows the stride-average speed, not the rocking phase
    # the touchdown happens to sample
    neutral_gain: float = 1.0
    shift_limit: float = 0.15    # m
    # swing clearance fades to zero below this speed command, so a zero
    # command means standing on both feet instead of marching in place
    stand_gate: float = 0.1      # m/s
    # posture servo: desired pitch moment -kp*pitch - kd*pitchrate. In
    # double support it is realized as a front/hind vertical force
    # difference; in single support the stance hip supplies at most
    # hip_moment_gain of it directly. Hip righting works through a
    # horizontal ground push, which also shoves the body along, so the
    # single-support share is kept small and the double-support window
    # does most of the righting with vertical forces only.
    attitude_kp: float = 150.0   # N*m/rad
    attitude_kd: float = 30.0    # N*m*s/rad
    hip_moment_gain: float = 0.2
    # alternating single-support phases tip the body front/back once per
    # stride no matter what the servo does, so the pitch setpoint follows
    # that cycle (amplitude in rad, sign picks which way to lean during
    # front-leg support) instead of fighting it at full gain all stride
    attitude_ref: float = 0.0
    # pitch-rate foot placement (s). Stance torques can only right the body
    # while a foot is down; the rocking a single-support phase builds up has
    # to be absorbed at the next touchdown. Shifting both targets by
    # -pitch_step_gain * pitchrate puts the landing foot where its ground
    # reaction opposes the rotation, the same trade Raibert's hopping
    # machines make between placement and posture.
    pitch_step_gain: float = 0.0
    # swing trajectory feedforward scale: joint-space acceleration of the
    # desired trajectory times an apparent leg inertia. The joint PD alone
    # has a bandwidth of roughly sqrt(kp / leg inertia) ~ 2 Hz, far below
    # what a sub-200 ms swing needs, so without this term the foot lands
    # well short of its target and early stance drags the body backwards
    swing_ff: float = 1.0
    # base height servo on top of the static weight share, so a sinking
    # body is caught before the knees fold past their torque budget
    height_kp: float = 1200.0    # N/m
    height_kd: float = 300.0     # N*s/m


def smoothstep(s: float) -> float:
    """Cubic smoothstep on [0, 1], clamped outside."""
    s = min(max(s, 0.0), 1.0)
    return s * s * (3.0 - 2.0 * s)


def step_length(params: GaitParams, command: float) -> float:
    """Signed step length (touchdown offset from the hip) for a command.

    The stance sweep runs from +step to -step, so the full sweep is twice
    this. The sweep rate then exceeds the commanded speed for any stance
    fraction, and the placement feedback trims the surplus; a sweep slower
    than the command would cap the speed below it instead.
    """
    raw = command / (2.0 * params.frequency)
    return max(-params.max_step, min(params.max_step, raw))


def ftg_foot_target(params: GaitParams, phase: float, command: float):
    """Foot target relative to the hip, in base-frame axes.

    Returns (x, z). Stance occupies phase in [0, 2*pi*duty): the foot moves
    linearly from +step to -step at constant height. Swing returns the
    foot along a smoothstep with a C1 vertical bump peaking at `clearance`.
    The target is continuous across both boundaries. Below `stand_gate`
    the bump fades out with the command so a stopped robot keeps both
    feet planted rather than marching in place.
    """
    p = phase % TWO_PI
    half = step_length(params, command)
    stance_span = TWO_PI * params.duty
    if p < stance_span:
        s = p / stance_span
        x = half * (1.0 - 2.0 * s)
        z = -params.nominal_height
    else:
        s = (p - stance_span) / (TWO_PI - stance_span)
        gate = smoothstep(min(1.0, abs(command) / params.stand_gate))
        x = half * (-1.0 + 2.0 * smoothstep(s))
        z = -params.nominal_height + gate * params.clearance * smoothstep(
            min(2.0 * s, 2.0 - 2.0 * s)
        )
    return x, z


def in_stance(params: GaitParams, phase: float) -> bool:
    return (phase % TWO_PI) < TWO_PI * params.duty


def placement_shift(params: GaitParams, base_vx: float, command: float) -> float:
    """Horizontal foot-target shift: neutral point plus speed feedback.

    The clock target lands the foot where the commanded speed would want
    it; the shift re-aims touchdown at the Raibert neutral point for the
    measured speed (half the hip travel over one stance) and adds a
    proportional speed-error term on top. Without the neutral part, any
    speed deficit makes every step overstride, and the braking push at
    ground level both holds the deficit in place and torques the nose down.
    """
    neutral = (base_vx * params.duty - command) / (2.0 * params.frequency)
    shift = params.neutral_gain * neutral + params.velocity_gain * (
        base_vx - command
    )
    return max(-params.shift_limit, min(params.shift_limit, shift))


def leg_ik(model: PlanarModel, target_x: float, target_z: float):
    """Two-link inverse kinematics for one leg, knee-fold branch.

    The target is the foot position relative to the hip in base-frame axes.
    Targets outside the reachable annulus are clamped radially and flagged.

    Returns:
        (q_hip, q_knee, clamped)
    """
    l1, l2 = model.thigh_len, model.shank_len
    r = math.hypot(target_x, target_z)
    r_max = l1 + l2 - 1e-3
    r_min = abs(l1 - l2) + 1e-3
    clamped = False
    if r > r_max:
        r = r_max
        clamped = True
    elif r < r_min:
        r = r_min
        clamped = True
    cos_knee = (r * r - l1 * l1 - l2 * l2) / (2.0 * l1 * l2)
    q_knee = math.acos(max(-1.0, min(1.0, cos_knee)))
    gamma_t = math.atan2(target_x, -target_z)
    cos_psi = (l1 * l1 + r * r - l2 * l2) / (2.0 * l1 * r)
    psi = math.acos(max(-1.0, min(1.0, cos_psi)))
    return gamma_t + psi, q_knee, clamped


def leg_fk(model: PlanarModel, q_hip: float, q_knee: float):
    """Foot position relative to the hip in base-frame axes (IK inverse)."""
    l1, l2 = model.thigh_len, model.shank_len
    beta = q_hip - q_knee
    return (
        l1 * math.sin(q_hip) + l2 * math.sin(beta),
        -l1 * math.cos(q_hip) - l2 * math.cos(beta),
    )


def pd_torque(
    params: GaitParams, q_des: float, q: float, qd: float, limit: float
) -> float:
    """Position PD with torque saturation; desired velocity is zero."""
    tau = params.kp * (q_des - q) - params.kd * qd
    return max(-limit, min(limit, tau))


def command_schedule(
    task: str,
    n_ticks: int,
    dt_ctrl: float,
    rng: np.random.Generator,
    segment_s: float = 3.0,
    speed: float = 1.0,
    ramp_s: float = 0.4,
) -> np.ndarray:
    """Per-control-tick forward speed commands for one episode.

    forward_1ms, payload, rough: constant `speed`; stand: zero;
    random_commands: piecewise-constant resampled every `segment_s` seconds,
    uniform in [-1.2, 1.2]. All profiles ramp in over `ramp_s` seconds.
    """
    if task not in TASKS:
        raise UnknownTask(f"task {task!r} not one of {TASKS}")
    t = np.arange(n_ticks) * dt_ctrl
    if task == "stand":
        return np.zeros(n_ticks)
    if task == "random_commands":
        n_seg = max(1, math.ceil(n_ticks * dt_ctrl / segment_s))
        seg_vals = rng.uniform(-1.2, 1.2, n_seg)
        cmd = seg_vals[np.minimum((t / segment_s).astype(int), n_seg - 1)]
    else:
        cmd = np.full(n_ticks, speed)
    if ramp_s > 0:
        cmd = cmd * np.minimum(t / ramp_s, 1.0)
    return cmd
