"""Trapezoidal velocity profiles and circular corner blending.

The timing model is piecewise constant acceleration: every path segment is
traversed with a trapezoidal (or triangular, if the cruise speed is never
reached) velocity profile between given boundary speeds.  Corners inside a
continuous group are either exact stops (v=0), collinear pass-throughs, or
circular arc blends tangent to both segments at ``approx_distance`` from the
corner, traversed at constant speed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import ContinuousSkillPlan

# corners flatter than this count as collinear; tighter than pi minus this
# count as reversals
COLLINEAR_EPS = 1e-9
_REVERSAL_EPS = 1e-9
_FEAS_SLACK = 1e-9
_MIN_BLEND_SPEED = 1e-9


class InfeasibleBoundary(ValueError):
    """Boundary speeds cannot be connected over the segment length."""


class ReversalAngle(ValueError):
    """A blend was requested at a reversal (angle >= pi)."""


@dataclass(frozen=True)
class SegmentSpec:
    """One straight (or dominant-axis) segment with boundary speeds."""

    length: float
    v_max: float
    accel: float
    v_in: float = 0.0
    v_out: float = 0.0

    def __post_init__(self):
        if not (self.length >= 0.0 and math.isfinite(self.length)):
            raise ValueError(f"length must be >= 0, got {self.length!r}")
        if not (self.v_max > 0.0 and math.isfinite(self.v_max)):
            raise ValueError(f"v_max must be > 0, got {self.v_max!r}")
        if not (self.accel > 0.0 and math.isfinite(self.accel)):
            raise ValueError(f"accel must be > 0, got {self.accel!r}")
        for name, v in (("v_in", self.v_in), ("v_out", self.v_out)):
            if not 0.0 <= v <= self.v_max:
                raise ValueError(f"{name} must be within 0..v_max, got {v!r}")


def _segment_time(length: float, v_max: float, accel: float, v_in: float, v_out: float) -> float:
    """Closed-form minimum traversal time; see segment_time."""
    if length == 0.0:
        if abs(v_out - v_in) > _FEAS_SLACK:
            raise InfeasibleBoundary("zero-length segment with unequal boundary speeds")
        return 0.0
    diff = abs(v_out * v_out - v_in * v_in)
    budget = 2.0 * accel * length
    if diff > budget * (1.0 + 1e-12) + _FEAS_SLACK:
        raise InfeasibleBoundary(
            f"cannot go from {v_in} to {v_out} over {length} at accel {accel}"
        )
    if diff >= budget:
        # boundary case: pure acceleration or deceleration over the full length
        return abs(v_out - v_in) / accel
    v_peak_sq = 0.5 * (budget + v_in * v_in + v_out * v_out)
    v_peak = math.sqrt(v_peak_sq)
    if v_peak <= v_max:
        # triangular: accelerate to v_peak, decelerate to v_out
        return (2.0 * v_peak - v_in - v_out) / accel
    d_acc = (v_max * v_max - v_in * v_in) / (2.0 * accel)
    d_dec = (v_max * v_max - v_out * v_out) / (2.0 * accel)
    t_cruise = (length - d_acc - d_dec) / v_max
    return (v_max - v_in) / accel + (v_max - v_out) / accel + t_cruise


def segment_time(spec: SegmentSpec) -> float:
    """Minimum time to traverse a segment with a trapezoidal profile.

    Accelerates from v_in towards the peak (capped at v_max), cruises if the
    cap was reached, then decelerates to v_out.  Raises InfeasibleBoundary
    when |v_out^2 - v_in^2| > 2 * accel * length.
    """
    return _segment_time(spec.length, spec.v_max, spec.accel, spec.v_in, spec.v_out)


def ptp_time(joint_deltas, v_max: float, accel: float) -> float:
    """Stop-to-stop PTP duration from the dominant (largest |delta|) axis."""
    if v_max <= 0.0 or accel <= 0.0:
        raise ValueError("joint dynamics must be positive")
    dominant = max(abs(float(d)) for d in joint_deltas)
    return _segment_time(dominant, v_max, accel, 0.0, 0.0)


@dataclass(frozen=True)
class BlendGeometry:
    """Circular corner blend: tangent arc replacing an exact corner.

    ``truncation`` is the length cut from each adjacent segment (equal to the
    commanded approx distance), ``v_blend`` the constant speed on the arc.
    A collinear corner (angle 0) degenerates to a pass-through with infinite
    radius and no truncation.
    """

    angle: float
    radius: float
    arc_length: float
    v_blend: float
    truncation: float

    @property
    def deviation(self) -> float:
        """Closest-approach distance between the arc and the corner point."""
        if self.truncation == 0.0 or self.angle == 0.0:
            return 0.0
        half = 0.5 * self.angle
        return self.truncation * (1.0 - math.cos(half)) / math.sin(half)


def blend_geometry(
    angle: float, approx_distance: float, v1: float, v2: float, accel: float
) -> BlendGeometry:
    """Geometry and speed cap of a corner blend.

    angle is the turn angle in radians (0 collinear, pi reversal).  The arc
    is tangent to both segments at ``approx_distance`` from the corner:
    radius = approx / tan(angle/2), arc length = radius * angle, and the
    blend speed is min(v1, v2, sqrt(accel * radius)) from the centripetal
    acceleration limit.
    """
    if angle < 0.0:
        raise ValueError("angle must be >= 0")
    if angle >= math.pi:
        raise ReversalAngle(f"cannot blend a reversal (angle {angle})")
    if approx_distance < 0.0:
        raise ValueError("approx_distance must be >= 0")
    if v1 <= 0.0 or v2 <= 0.0 or accel <= 0.0:
        raise ValueError("speeds and accel must be positive")
    if angle <= COLLINEAR_EPS:
        # straight continuation: no arc, no truncation, carry the slower speed
        return BlendGeometry(
            angle=0.0,
            radius=math.inf,
            arc_length=0.0,
            v_blend=min(v1, v2),
            truncation=0.0,
        )
    if approx_distance == 0.0:
        return BlendGeometry(angle=angle, radius=0.0, arc_length=0.0, v_blend=0.0, truncation=0.0)
    radius = approx_distance / math.tan(0.5 * angle)
    return BlendGeometry(
        angle=angle,
        radius=radius,
        arc_length=radius * angle,
        v_blend=min(v1, v2, math.sqrt(accel * radius)),
        truncation=approx_distance,
    )


@dataclass(frozen=True)
class GroupProfile:
    """Timing of one continuous group.

    Lengths: n segment durations, n-1 blend durations (zero where the corner
    is a stop or pass-through) and n+1 corner speeds including the resting
    group boundaries.  ``degraded_corners`` lists interior corner indices
    (1-based waypoint index) whose requested blend fell back to an exact
    stop.
    """

    segment_durations: tuple[float, ...]
    blend_durations: tuple[float, ...]
    corner_speeds: tuple[float, ...]
    total_time: float
    max_path_deviation: float
    degraded_corners: tuple[int, ...] = ()


def _as_position(p):
    if hasattr(p, "position"):
        return p.position
    x, y, z = p
    return (float(x), float(y), float(z))


def _dist(p, q) -> float:
    return math.dist(p, q)


def _turn_angle(p, c, n) -> float:
    ux, uy, uz = c[0] - p[0], c[1] - p[1], c[2] - p[2]
    vx, vy, vz = n[0] - c[0], n[1] - c[1], n[2] - c[2]
    cx = uy * vz - uz * vy
    cy = uz * vx - ux * vz
    cz = ux * vy - uy * vx
    cross = math.sqrt(cx * cx + cy * cy + cz * cz)
    dot = ux * vx + uy * vy + uz * vz
    return math.atan2(cross, dot)


def plan_group_profile(
    plan: ContinuousSkillPlan, waypoints, blending_enabled: bool = True
) -> GroupProfile:
    """Time a continuous group along its resolved Cartesian waypoints.

    ``waypoints`` has len(plan.motions) + 1 positions: the start pose
    followed by every motion target.  With blending disabled every waypoint
    is an exact stop.  With blending enabled, each interior corner uses the
    approx distance of the motion ending there; corners degrade to exact
    stops (never raise) when the blend does not fit: reversal angles,
    adjacent segments shorter than twice the truncation, a feasibility
    chain that forces the blend speed to zero, or an arc whose constant
    speed traversal would be slower than simply stopping at the corner
    (sharp corners force small radii and therefore slow arcs).  Blending is
    then never slower than stopping everywhere.
    """
    motions = plan.motions
    pts = [_as_position(p) for p in waypoints]
    n = len(motions)
    if len(pts) != n + 1:
        raise ValueError(f"expected {n + 1} waypoints for {n} motions, got {len(pts)}")
    lengths = [_dist(pts[i], pts[i + 1]) for i in range(n)]
    for i, length in enumerate(lengths):
        if length == 0.0:
            raise ValueError(f"waypoints {i} and {i + 1} coincide")
    vmaxes = [m.velocity for m in motions]
    accels = [m.acceleration for m in motions]

    # corner i sits at waypoint i, between segments i-1 and i, and uses the
    # approx distance of the motion that ends there
    blends: list[BlendGeometry | None] = [None] * (n + 1)
    degraded: set[int] = set()
    if blending_enabled:
        for i in range(1, n):
            approx = motions[i - 1].approx_distance
            angle = _turn_angle(pts[i - 1], pts[i], pts[i + 1])
            if angle <= COLLINEAR_EPS:
                blends[i] = blend_geometry(0.0, approx, vmaxes[i - 1], vmaxes[i], accels[i - 1])
                continue
            if approx == 0.0:
                continue  # exact waypoint
            if angle >= math.pi - _REVERSAL_EPS:
                degraded.add(i)
                continue
            if lengths[i - 1] < 2.0 * approx or lengths[i] < 2.0 * approx:
                degraded.add(i)
                continue
            blends[i] = blend_geometry(
                angle, approx, vmaxes[i - 1], vmaxes[i], min(accels[i - 1], accels[i])
            )

    for _attempt in range(2):
        while True:
            trunc = [b.truncation if b is not None else 0.0 for b in blends]
            eff = [lengths[i] - trunc[i] - trunc[i + 1] for i in range(n)]
            speeds = [0.0] * (n + 1)
            for i in range(1, n):
                if blends[i] is not None:
                    speeds[i] = blends[i].v_blend
            for i in range(1, n):  # forward reachability
                if speeds[i] > 0.0:
                    speeds[i] = min(
                        speeds[i],
                        math.sqrt(speeds[i - 1] ** 2 + 2.0 * accels[i - 1] * eff[i - 1]),
                    )
            for i in range(n - 1, 0, -1):  # backward deceleration
                if speeds[i] > 0.0:
                    speeds[i] = min(
                        speeds[i], math.sqrt(speeds[i + 1] ** 2 + 2.0 * accels[i] * eff[i])
                    )
            drop = []
            for i in range(1, n):
                b = blends[i]
                if b is None or b.arc_length == 0.0:
                    continue
                if speeds[i] < _MIN_BLEND_SPEED:
                    drop.append(i)  # an arc cannot be crawled at zero speed
                    continue
                v = speeds[i]
                with_arc = (
                    _segment_time(eff[i - 1], vmaxes[i - 1], accels[i - 1], speeds[i - 1], v)
                    + b.arc_length / v
                    + _segment_time(eff[i], vmaxes[i], accels[i], v, speeds[i + 1])
                )
                try:
                    with_stop = (
                        _segment_time(
                            eff[i - 1] + b.truncation,
                            vmaxes[i - 1],
                            accels[i - 1],
                            speeds[i - 1],
                            0.0,
                        )
                        + _segment_time(
                            eff[i] + b.truncation, vmaxes[i], accels[i], 0.0, speeds[i + 1]
                        )
                    )
                except InfeasibleBoundary:
                    # a neighbouring blend depends on carrying speed through
                    # this corner; stopping here is not a local option
                    continue
                if with_arc > with_stop:
                    drop.append(i)
            if not drop:
                break
            for i in drop:
                blends[i] = None
                degraded.add(i)

        seg_t = tuple(
            _segment_time(eff[i], vmaxes[i], accels[i], speeds[i], speeds[i + 1])
            for i in range(n)
        )
        blend_t = tuple(
            blends[i].arc_length / speeds[i]
            if blends[i] is not None and blends[i].arc_length > 0.0
            else 0.0
            for i in range(1, n)
        )
        total = sum(seg_t) + sum(blend_t)
        arc_corners = [i for i in range(1, n) if blends[i] is not None and blends[i].arc_length > 0.0]
        if not (blending_enabled and arc_corners):
            break
        all_stop = sum(
            _segment_time(lengths[i], vmaxes[i], accels[i], 0.0, 0.0) for i in range(n)
        )
        if total <= all_stop:
            break
        # coupled corners can in rare shapes beat every single-corner stop
        # test yet still lose to stopping everywhere; fall back wholesale
        for i in arc_corners:
            blends[i] = None
            degraded.add(i)

    deviation = max(
        (b.deviation for b in blends if b is not None), default=0.0
    )
    return GroupProfile(
        segment_durations=seg_t,
        blend_durations=blend_t,
        corner_speeds=tuple(speeds),
        total_time=total,
        max_path_deviation=deviation,
        degraded_corners=tuple(sorted(degraded)),
    )
