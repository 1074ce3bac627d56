"""
Trapezoidal timing and corner blending
======================================

How long does a motion take, and what does rounding a corner buy?  The
timing model is a trapezoidal velocity profile per segment plus
constant-speed circular arcs at blended corners.
"""

from skillbench.core import ContinuousSkillPlan, MotionCommand, MotionType, Pose
from skillbench.trajectory import SegmentSpec, plan_group_profile, segment_time

# a 100 mm segment at 250 mm/s with 2000 mm/s^2: accelerate, cruise, brake
spec = SegmentSpec(length=100.0, v_max=250.0, accel=2000.0)
print(f"100 mm rest to rest:     {segment_time(spec):.6f} s")

# entering and leaving at speed shortens the ramps
rolling = SegmentSpec(100.0, 250.0, 2000.0, v_in=100.0, v_out=100.0)
print(f"same, through traffic:   {segment_time(rolling):.6f} s")


def lin(x, y, approx=0.0):
    return MotionCommand(
        motion_type=MotionType.LIN_CARTESIAN,
        target=Pose(x, y, 0.0),
        velocity=250.0,
        acceleration=2000.0,
        approx_distance=approx,
    )


# an L-shaped path: 100 mm out, right angle, 100 mm up
corner = [Pose(0.0, 0.0, 0.0), Pose(100.0, 0.0, 0.0), Pose(100.0, 100.0, 0.0)]

# exact stop at the corner
stopping = ContinuousSkillPlan((lin(100.0, 0.0), lin(100.0, 100.0)))
stop_profile = plan_group_profile(stopping, corner, blending_enabled=False)

# blend with a 10 mm approximation distance instead
blending = ContinuousSkillPlan((lin(100.0, 0.0, approx=10.0), lin(100.0, 100.0)))
blend_profile = plan_group_profile(blending, corner)

print(f"\nL-shape with full stop:  {stop_profile.total_time:.6f} s")
print(f"L-shape blended (10 mm): {blend_profile.total_time:.6f} s")
print(f"corner passed at:        {blend_profile.corner_speeds[1]:.1f} mm/s")
print(f"path deviation:          {blend_profile.max_path_deviation:.3f} mm (<= 10)")
saved = stop_profile.total_time - blend_profile.total_time
print(f"saved:                   {saved * 1000:.1f} ms ({saved / stop_profile.total_time:.1%})")

# blending is never allowed to lose.  A sharp corner between a slow,
# low-acceleration motion and a fast one would force the arc to crawl at
# the slow motion's pace; stopping and sprinting is cheaper, so the
# planner degrades that corner to an exact stop and reports it
import math

turn = math.radians(140.0)
elbow = Pose(80.0, 0.0, 0.0)
far = Pose(80.0 + 80.0 * math.cos(turn), 80.0 * math.sin(turn), 0.0)
creep = MotionCommand(
    motion_type=MotionType.LIN_CARTESIAN,
    target=elbow,
    velocity=40.0,
    acceleration=300.0,
    approx_distance=3.0,
)
sprint = MotionCommand(
    motion_type=MotionType.LIN_CARTESIAN,
    target=far,
    velocity=200.0,
    acceleration=2000.0,
)
mixed = ContinuousSkillPlan((creep, sprint))
profile = plan_group_profile(mixed, [Pose(0.0, 0.0, 0.0), elbow, far])
print(f"\ncreep-to-sprint corner degraded: {profile.degraded_corners}")
print(f"corner speed after degrading:    {profile.corner_speeds[1]:.1f} mm/s")
