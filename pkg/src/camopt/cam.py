"""Elliptic-cam spring mechanism: tangent geometry, wire length, knee torque.

A tension-only linear spring connects a fixed anchor on the thigh to a wire.
The wire runs straight from the anchor to a tangency point on an elliptic cam
that is bolted to the shank, wraps around part of the cam boundary, and
terminates at a fixed material point of the cam. Flexing the knee rotates the
cam, pays out or reels in wire, and thereby stretches or slackens the spring.
The resulting knee torque is what this module computes.

Frames and conventions
----------------------
All geometry lives in a knee-centred frame fixed to the *thigh*: origin at the
knee axis, +x pointing from the knee toward the anchor side. The anchor is
constant in this frame. The cam rotates with the knee angle ``q`` (flexion
positive), so a boundary point at cam parameter ``theta`` sits at::

    p(theta, q) = R(phi) @ (a*cos(theta), b*sin(theta)),   phi = phi0 + q

where ``R`` is a CCW rotation and ``phi0`` the cam's mounting offset. The wire
termination is the material point ``theta = layout.termination_theta``.

Sign conventions
----------------
Positive torque drives the knee toward flexion (increasing ``q``). With the
default layout the spring engages for ``q > q_bar`` and produces negative
(extension-assisting) torque, i.e. it helps hold the leg up against gravity
in a crouched stance.

Key identity (used by the test-suite as a cross-check): because the free wire
segment leaves the cam exactly tangentially, the derivative of total wire
length w.r.t. knee angle equals ``-cross(lever_point, wire_dir)``. Hence the
lever-arm torque computed here equals ``-dU/dq`` of the spring's elastic
energy to solver precision, with no explicit differentiation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .errors import NoTangent

# Semi-axes below this are treated as exactly zero (point cam) to avoid an
# ill-conditioned tangent solve on needle-thin ellipses.
_AXIS_EPS = 1e-12

# Quadrature tolerance for boundary arc length. Tight enough that central
# finite differences of wire length with h = 1e-6 remain meaningful.
_QUAD_TOL = 1e-12


@dataclass(frozen=True)
class CamDesign:
    """Design vector of one knee's spring mechanism.

    Attributes:
        q_bar: knee angle (rad) at which the spring is at rest length.
            Elongation is measured relative to the wire length here.
        a: cam semi-axis along the cam's material x direction (m), >= 0.
        b: cam semi-axis along the cam's material y direction (m), >= 0.
        phi0: cam mounting angle offset (rad) at q = 0.
        k_s: spring stiffness (N/m), > 0.
    """

    q_bar: float
    a: float
    b: float
    phi0: float
    k_s: float = 4154.0

    def __post_init__(self):
        if not all(map(math.isfinite, (self.q_bar, self.a, self.b, self.phi0, self.k_s))):
            raise ValueError("CamDesign fields must be finite")
        if self.a < 0 or self.b < 0:
            raise ValueError("cam semi-axes must be >= 0")
        if self.k_s <= 0:
            raise ValueError("spring stiffness must be > 0")

    @property
    def is_rigid(self) -> bool:
        """True when the cam degenerates to a point and the joint is rigid."""
        return self.a <= _AXIS_EPS and self.b <= _AXIS_EPS


@dataclass(frozen=True)
class MechanismLayout:
    """Fixed (non-optimized) geometry of the spring installation.

    Attributes:
        anchor_offset: distance (m) of the wire/spring anchor from the knee
            centre along the thigh-frame +x axis. Used when ``anchor`` is None.
        termination_theta: cam parameter (rad) of the material point where the
            wire terminates on the cam boundary.
        wrap_ccw: wire wraps the cam in the direction of increasing theta
            (from the tangency point toward the termination). The opposite
            handedness mirrors the torque profile.
        anchor: explicit anchor point in the knee-centred thigh frame;
            overrides ``anchor_offset`` when given.
    """

    anchor_offset: float = 0.25
    termination_theta: float = math.pi
    wrap_ccw: bool = True
    anchor: tuple[float, float] | None = None

    def anchor_point(self) -> np.ndarray:
        if self.anchor is not None:
            return np.array(self.anchor, dtype=float)
        return np.array([self.anchor_offset, 0.0])


@dataclass(frozen=True)
class CamGeometry:
    """Solved wire geometry at one knee angle.

    Attributes:
        theta_star: cam parameter of the tangency (lever) point.
        lever_point: tangency point in the knee-centred thigh frame (m).
        wire_dir: unit vector from the lever point toward the anchor.
        straight_len: length of the free straight wire segment (m).
        wrapped_arc_len: boundary arc length from tangency to termination (m).
    """

    theta_star: float
    lever_point: np.ndarray
    wire_dir: np.ndarray
    straight_len: float
    wrapped_arc_len: float

    @property
    def total_len(self) -> float:
        return self.straight_len + self.wrapped_arc_len


def _rot(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


def _cross2(u, v) -> float:
    return u[0] * v[1] - u[1] * v[0]


def cam_boundary(design: CamDesign, q: float, theta: float) -> np.ndarray:
    """Boundary point at cam parameter ``theta`` in the knee-centred frame."""
    e = np.array([design.a * math.cos(theta), design.b * math.sin(theta)])
    return _rot(design.phi0 + q) @ e


def boundary_arc_length(design: CamDesign, theta0: float, theta1: float) -> float:
    """Arc length of the ellipse boundary from theta0 to theta1 (signed order).

    Uses adaptive Gauss-Kronrod quadrature of sqrt(a^2 sin^2 + b^2 cos^2).
    """
    a, b = design.a, design.b

    def speed(t):
        return math.hypot(a * math.sin(t), b * math.cos(t))

    val, _ = quad(speed, theta0, theta1, epsabs=_QUAD_TOL, epsrel=_QUAD_TOL, limit=200)
    return val


def _degenerate_geometry(layout: MechanismLayout) -> CamGeometry:
    anchor = layout.anchor_point()
    norm = float(np.linalg.norm(anchor))
    wire_dir = anchor / norm if norm > 0 else np.array([1.0, 0.0])
    return CamGeometry(
        theta_star=0.0,
        lever_point=np.zeros(2),
        wire_dir=wire_dir,
        straight_len=norm,
        wrapped_arc_len=0.0,
    )


def tangent_point(design: CamDesign, layout: MechanismLayout, q: float) -> CamGeometry:
    """Solve for the wire's tangency point on the cam at knee angle ``q``.

    The tangent condition is solved in closed form by the affine map that
    sends the ellipse to the unit circle, then polished with two Newton steps
    on the tangency residual so it holds to machine precision. Of the two
    tangent lines from the anchor, the one whose smooth departure direction
    matches the layout's wrap handedness is returned; this choice is
    continuous in ``q`` and consistent with the wire's wrapped side.

    Raises:
        NoTangent: anchor on or inside the ellipse (no tangent line).
    """
    if design.is_rigid:
        # Point cam: wire runs straight from anchor to the knee centre and
        # moving the knee does not change its length.
        return _degenerate_geometry(layout)

    a = max(design.a, _AXIS_EPS)
    b = max(design.b, _AXIS_EPS)
    phi = design.phi0 + q
    anchor = layout.anchor_point()

    # Anchor in the cam's material frame, then mapped to unit-circle coords.
    am = _rot(-phi) @ anchor
    ax, ay = am[0] / a, am[1] / b
    rho = math.hypot(ax, ay)
    if rho <= 1.0 + 1e-12:
        raise NoTangent(
            f"anchor at distance ratio {rho:.6g} of the cam boundary (needs > 1)"
        )
    psi = math.atan2(ay, ax)
    gamma = math.acos(1.0 / rho)

    best = None
    for theta in (psi - gamma, psi + gamma):
        # Newton polish of the tangency residual g = cross(am - e, e') in the
        # material frame; g' = -cross(am, e) since e'' = -e.
        for _ in range(3):
            e = np.array([a * math.cos(theta), b * math.sin(theta)])
            de = np.array([-a * math.sin(theta), b * math.cos(theta)])
            g = _cross2(am - e, de)
            dg = -_cross2(am, e)
            if dg == 0.0:
                break
            theta -= g / dg
        e = np.array([a * math.cos(theta), b * math.sin(theta)])
        de = np.array([-a * math.sin(theta), b * math.cos(theta)])
        free = am - e
        s = float(np.linalg.norm(free))
        if s == 0.0:
            continue
        u_dot_t = float(np.dot(free / s, de / np.linalg.norm(de)))
        # CCW wrap leaves the tangency point against the direction of
        # increasing theta, so the free segment satisfies u . t_hat = -1.
        score = -u_dot_t if layout.wrap_ccw else u_dot_t
        if best is None or score > best[0]:
            best = (score, theta, e, s)

    if best is None or best[0] <= 0.0:
        raise NoTangent("no tangent departure matches the wrap handedness")

    _, theta, e_mat, s = best
    if layout.wrap_ccw:
        dtheta = (layout.termination_theta - theta) % (2.0 * math.pi)
        arc = boundary_arc_length(design, theta, theta + dtheta)
    else:
        dtheta = (theta - layout.termination_theta) % (2.0 * math.pi)
        arc = boundary_arc_length(design, theta - dtheta, theta)

    rot = _rot(phi)
    lever = rot @ e_mat
    wire_dir = (anchor - lever) / s
    return CamGeometry(
        theta_star=theta,
        lever_point=lever,
        wire_dir=wire_dir,
        straight_len=s,
        wrapped_arc_len=arc,
    )


def wire_length(design: CamDesign, layout: MechanismLayout, q: float) -> float:
    """Total wire length (straight segment + wrapped arc) at knee angle q."""
    return tangent_point(design, layout, q).total_len


@lru_cache(maxsize=4096)
def _rest_length(design: CamDesign, layout: MechanismLayout) -> float:
    return wire_length(design, layout, design.q_bar)


def spring_elongation(design: CamDesign, layout: MechanismLayout, q: float) -> float:
    """Signed spring elongation: wire length at q minus length at q_bar."""
    if design.is_rigid:
        return 0.0
    return wire_length(design, layout, q) - _rest_length(design, layout)


def spring_torque(design: CamDesign, layout: MechanismLayout, q: float) -> float:
    """Knee torque (N m) exerted by the spring at knee angle ``q``.

    Tension-only: slack wire (elongation <= 0) produces exactly zero torque.
    Taut wire pulls at the lever point along ``wire_dir`` with magnitude
    ``k_s * elongation``; the torque about the knee centre is the 2-D cross
    product of lever point and force.
    """
    if design.is_rigid:
        return 0.0
    geo = tangent_point(design, layout, q)
    elong = geo.total_len - _rest_length(design, layout)
    if elong <= 0.0:
        return 0.0
    force = design.k_s * elong
    return force * _cross2(geo.lever_point, geo.wire_dir)


def spring_energy(design: CamDesign, layout: MechanismLayout, q: float) -> float:
    """Elastic energy (J) stored in the spring at knee angle ``q``."""
    if design.is_rigid:
        return 0.0
    elong = spring_elongation(design, layout, q)
    if elong <= 0.0:
        return 0.0
    return 0.5 * design.k_s * elong * elong


def torque_curve(
    design: CamDesign,
    layout: MechanismLayout,
    q_min: float = 0.0,
    q_max: float = 2.6,
    n: int = 261,
) -> np.ndarray:
    """Tabulate the spring torque over a knee-angle grid.

    Returns a structured array with fields ``q_rad, tau_Nm, elongation_m,
    theta_star_rad, valid``. Angles where the tangent solve fails are kept in
    the table with ``valid = 0`` and NaN values so downstream consumers see
    the full requested grid.
    """
    dtype = [
        ("q_rad", float),
        ("tau_Nm", float),
        ("elongation_m", float),
        ("theta_star_rad", float),
        ("valid", int),
    ]
    rows = np.zeros(n, dtype=dtype)
    for i, q in enumerate(np.linspace(q_min, q_max, n)):
        rows[i]["q_rad"] = q
        try:
            geo = tangent_point(design, layout, q)
            elong = 0.0 if design.is_rigid else geo.total_len - _rest_length(design, layout)
            tension = design.k_s * max(elong, 0.0)
            rows[i]["tau_Nm"] = tension * _cross2(geo.lever_point, geo.wire_dir)
            rows[i]["elongation_m"] = elong
            rows[i]["theta_star_rad"] = geo.theta_star
            rows[i]["valid"] = 1
        except NoTangent:
            rows[i]["tau_Nm"] = math.nan
            rows[i]["elongation_m"] = math.nan
            rows[i]["theta_star_rad"] = math.nan
            rows[i]["valid"] = 0
    return rows


def layout_valid_for(
    design: CamDesign,
    layout: MechanismLayout,
    q_min: float = 0.0,
    q_max: float = 2.6,
    n: int = 53,
) -> bool:
    """True when the tangent solve succeeds across the whole joint range."""
    if design.is_rigid:
        return True
    for q in np.linspace(q_min, q_max, n):
        try:
            tangent_point(design, layout, q)
        except NoTangent:
            return False
    return True
