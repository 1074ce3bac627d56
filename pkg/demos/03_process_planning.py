"""
From a process description to continuous motion groups
======================================================

The planner turns a declarative step list (paths the process needs,
standstill actions, transits in between) into skill plans: labelled,
extended by pre/post moves, routed, and split into continuous groups at
every standstill.
"""

from skillbench.bench import SETUP_A, build_scenario
from skillbench.planner import plan, plan_waypoints, serialize_plans, serialize_process

# the built-in pick and place: descend, grip, carry over, release, return
steps = build_scenario(SETUP_A)
print(serialize_process(steps))

# planning happens in four passes: label path types, plan the primary
# paths, extend them with collinear pre/post moves, route the transits,
# then coalesce everything into groups that run without stopping
plans = plan(steps, SETUP_A.planning_config())
print(f"{len(plans)} continuous groups, "
      f"{sum(p.record_count for p in plans)} records total\n")

for i, p in enumerate(plans):
    ending = f"ends with {p.terminal_action!r}" if p.terminal_action else "final group"
    print(f"group {i}: {len(p.motions)} motions, {ending}")

# the serialized plan text is the exchange format between planner and PLC
print()
print(serialize_plans(plans[:1]))

# resolved waypoint chains show the actual geometry; note how the pre
# move at (0, 0, 80) continues straight into the descend to the pick
chains = plan_waypoints(plans, SETUP_A.start)
for i, chain in enumerate(chains):
    pts = " -> ".join(f"({p.x:.0f},{p.y:.0f},{p.z:.0f})" for p in chain)
    print(f"group {i}: {pts}")
