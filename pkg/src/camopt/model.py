"""Planar quadruped model: one sagittal body, two legs, seven coordinates.

The robot is a sagittal-plane reduction of a ~50 kg quadruped: the two left
and right legs of each pair are merged into a single planar leg, so the two
planar legs carry the full body weight. Coordinates are

    q = [x, z, pitch, q_hip_front, q_knee_front, q_hip_hind, q_knee_hind]

with x forward, z up, pitch counter-clockwise. Hip angles measure the thigh
direction from straight down (positive swings the leg forward); knee angles
measure flexion (0 = straight leg, positive folds the shank backward).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

# state vector indices
BASE_X, BASE_Z, PITCH, HIP_F, KNEE_F, HIP_H, KNEE_H = range(7)
NQ = 7
HIP_IDX = (HIP_F, HIP_H)
KNEE_IDX = (KNEE_F, KNEE_H)
JOINT_IDX = (HIP_F, KNEE_F, HIP_H, KNEE_H)


@dataclass(frozen=True)
class ContactParams:
    """Penalty ground contact with regularized Coulomb friction."""

    k_normal: float = 1.0e5   # N/m
    d_normal: float = 1.0e3   # N s/m
    friction: float = 0.8
    v_regularize: float = 0.01  # m/s, tangential velocity scale


@dataclass(frozen=True)
class PlanarModel:
    """Masses, geometry, and limits of the planar walker."""

    base_mass: float = 31.3
    base_inertia: float = 1.9
    base_com: tuple[float, float] = (0.0, 0.0)
    hip_x: float = 0.25       # hips at +/- hip_x from the base origin
    hip_z: float = 0.0
    thigh_mass: float = 6.0
    thigh_len: float = 0.3
    thigh_com: float = 0.135  # distance from hip along the thigh
    thigh_inertia: float = 0.05
    shank_mass: float = 4.0
    shank_len: float = 0.3
    shank_com: float = 0.12   # distance from knee along the shank
    shank_inertia: float = 0.035
    knee_hardware_mass: float = 0.0  # spring+cam mass lumped at the knee
    gravity: float = 9.81
    # links aggregate left/right leg pairs, so joint budgets are per pair
    torque_limit: float = 80.0
    velocity_limit: float = 8.0
    hip_range: tuple[float, float] = (-1.5, 1.5)
    knee_range: tuple[float, float] = (0.0, 2.6)
    contact: ContactParams = field(default_factory=ContactParams)

    @property
    def total_mass(self) -> float:
        return self.base_mass + 2 * (self.thigh_mass + self.shank_mass_eff)

    @property
    def shank_mass_eff(self) -> float:
        return self.shank_mass + self.knee_hardware_mass

    @property
    def shank_com_eff(self) -> float:
        # knee hardware sits at the knee origin, pulling the com inboard
        m = self.shank_mass_eff
        return self.shank_mass * self.shank_com / m if m > 0 else 0.0

    @property
    def shank_inertia_eff(self) -> float:
        # parallel-axis recombination of bare shank and knee point mass
        c = self.shank_com_eff
        ib = self.shank_inertia + self.shank_mass * (self.shank_com - c) ** 2
        return ib + self.knee_hardware_mass * c * c


def build_model(
    spring_equipped: bool = True,
    payload: float = 0.0,
    friction: float | None = None,
    **overrides,
) -> PlanarModel:
    """Construct the walker, optionally with knee springs and a payload.

    Args:
        spring_equipped: add 0.6 kg of cam/spring hardware at each knee.
        payload: extra mass (kg) rigidly attached at the base com.
        friction: override the ground friction coefficient.
        overrides: any PlanarModel field, passed through.
    """
    m = PlanarModel(**overrides)
    if spring_equipped:
        m = replace(m, knee_hardware_mass=0.6)
    if payload:
        m = replace(m, base_mass=m.base_mass + payload)
    if friction is not None:
        m = replace(m, contact=replace(m.contact, friction=friction))
    return m


def nominal_stance_height(model: PlanarModel, knee_angle: float = 1.287) -> float:
    """Base height with feet directly under the hips at the given knee angle."""
    l1, l2 = model.thigh_len, model.shank_len
    reach = math.sqrt(l1 * l1 + l2 * l2 + 2 * l1 * l2 * math.cos(knee_angle))
    return reach - model.hip_z
