"""Pick-and-place benchmark comparing skill execution types.

The scenario is a two-position pick and place: descend into the pick
carrier, grip, lift, carry to the place carrier, descend, release, retract,
return.  The planner turns it into three continuous groups (the carry group
is the long one); the benchmark runs the same groups as

* RC: a natively stored program, one START/DONE handshake overall,
* SM: one skill per motion with exact stops everywhere,
* CM: one skill per continuous group, blended inside the group,

and reports the average execution time (AET), the mean absolute deviation
(MAD), and the relative improvement AET_i = (AET_SM - AET_CM) / AET_SM.
Repetition k of every execution type uses the same derived seed, so the
task phase offsets are paired across types.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from statistics import fmean

from .core import ExecutionType, Pose
from .fieldbus_sim import SimConfig, SimTrace, run
from .planner import (
    PlanningConfig,
    ProcessStep,
    StepKind,
    plan,
    plan_waypoints,
)
from .plc_trigger import (
    ContinuousMotionProgram,
    NativeTriggerProgram,
    SingleMotionProgram,
)
from .robot_executor import NativeExecutor, RobotExecutor


@dataclass(frozen=True)
class ScenarioConfig:
    """Geometry and dynamics of one benchmark setup.  Lengths in mm."""

    name: str = "a"
    start: Pose = Pose(-100.0, 0.0, 80.0)
    pick: Pose = Pose(0.0, 0.0, 0.0)
    place: Pose = Pose(300.0, 0.0, 0.0)
    carrier_height: float = 30.0  # length of the vertical primary paths
    obstacle_height: float = 60.0
    clearance_margin: float = 20.0
    lin_velocity: float = 250.0
    lin_acceleration: float = 2000.0
    ptp_velocity: float = 250.0
    ptp_acceleration: float = 2000.0
    joint_velocity: float = 180.0
    joint_acceleration: float = 720.0
    approx_distance: float = 10.0
    pre_post_length: float = 50.0

    def __post_init__(self):
        if not (self.carrier_height > 0 and math.isfinite(self.carrier_height)):
            raise ValueError("carrier_height must be positive")

    @property
    def fly_height(self) -> float:
        """Height of the transit corridor above the carrier positions."""
        return self.carrier_height + self.pre_post_length

    def planning_config(self) -> PlanningConfig:
        return PlanningConfig(
            lin_velocity=self.lin_velocity,
            lin_acceleration=self.lin_acceleration,
            ptp_velocity=self.ptp_velocity,
            ptp_acceleration=self.ptp_acceleration,
            joint_velocity=self.joint_velocity,
            joint_acceleration=self.joint_acceleration,
            default_approx=self.approx_distance,
            pre_move_length=self.pre_post_length,
            post_move_length=self.pre_post_length,
        )


SETUP_A = ScenarioConfig(name="a")
SETUP_B = ScenarioConfig(
    name="b",
    lin_velocity=200.0,
    lin_acceleration=1200.0,
    ptp_velocity=200.0,
    ptp_acceleration=1200.0,
    joint_velocity=150.0,
    joint_acceleration=600.0,
)


def _above(p: Pose, h: float) -> Pose:
    return Pose(p.x, p.y, p.z + h, p.a, p.b, p.c)


def build_scenario(cfg: ScenarioConfig) -> tuple[ProcessStep, ...]:
    """Process steps of the pick-and-place task.

    The transits that carry the part (and the return leg) get an explicit
    clearance height only when the obstacle between the carriers pokes above
    the normal transit corridor; otherwise the corridor already clears it.
    """
    up = cfg.carrier_height
    clearance = None
    if cfg.obstacle_height > cfg.fly_height:
        clearance = cfg.obstacle_height + cfg.clearance_margin
    return (
        ProcessStep(StepKind.STANDSTILL_ACTION, pose=cfg.start, action="start"),
        ProcessStep(StepKind.TRANSIT),
        ProcessStep(StepKind.PRIMARY_PATH, entry=_above(cfg.pick, up), exit=cfg.pick),
        ProcessStep(StepKind.STANDSTILL_ACTION, pose=cfg.pick, action="grip"),
        ProcessStep(StepKind.PRIMARY_PATH, entry=cfg.pick, exit=_above(cfg.pick, up)),
        ProcessStep(StepKind.TRANSIT, clearance=clearance),
        ProcessStep(StepKind.PRIMARY_PATH, entry=_above(cfg.place, up), exit=cfg.place),
        ProcessStep(StepKind.STANDSTILL_ACTION, pose=cfg.place, action="release"),
        ProcessStep(StepKind.PRIMARY_PATH, entry=cfg.place, exit=_above(cfg.place, up)),
        ProcessStep(StepKind.TRANSIT, to_pose=cfg.start, clearance=clearance),
    )


def build_plans(cfg: ScenarioConfig):
    """Plans and resolved waypoint chains for one setup."""
    plans = plan(build_scenario(cfg), cfg.planning_config())
    return plans, plan_waypoints(plans, cfg.start)


# --- scenario file format ----------------------------------------------------

_POSE_FIELDS = ("start", "pick", "place")
_FLOAT_FIELDS = (
    "carrier_height",
    "obstacle_height",
    "clearance_margin",
    "lin_velocity",
    "lin_acceleration",
    "ptp_velocity",
    "ptp_acceleration",
    "joint_velocity",
    "joint_acceleration",
    "approx_distance",
    "pre_post_length",
)


def serialize_scenario(cfg: ScenarioConfig) -> str:
    lines = ["# skillbench scenario v1", f"name={cfg.name}"]
    for name in _POSE_FIELDS:
        p: Pose = getattr(cfg, name)
        lines.append(f"{name}=" + ",".join(repr(v) for v in p.components()))
    for name in _FLOAT_FIELDS:
        lines.append(f"{name}={getattr(cfg, name)!r}")
    return "\n".join(lines) + "\n"


def parse_scenario(text: str) -> ScenarioConfig:
    kwargs = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"malformed scenario line {line!r}")
        if key == "name":
            kwargs[key] = value
        elif key in _POSE_FIELDS:
            parts = [float(v) for v in value.split(",")]
            if len(parts) != 6:
                raise ValueError(f"{key} needs 6 pose components")
            kwargs[key] = Pose(*parts)
        elif key in _FLOAT_FIELDS:
            kwargs[key] = float(value)
        else:
            raise ValueError(f"unknown scenario field {key!r}")
    return ScenarioConfig(**kwargs)


# --- measurement -------------------------------------------------------------


def mad(values) -> float:
    """Mean absolute deviation around the arithmetic mean."""
    values = [float(v) for v in values]
    if not values:
        raise ValueError("mad of an empty sample")
    center = fmean(values)
    return fmean(abs(v - center) for v in values)


def compute_improvement(aet_single: float, aet_continuous: float) -> float:
    """Relative execution-time improvement of continuous over single skills."""
    if aet_single <= 0.0:
        raise ValueError("baseline AET must be positive")
    return (aet_single - aet_continuous) / aet_single


@dataclass(frozen=True)
class EtypeStats:
    etype: ExecutionType
    samples: tuple[float, ...]  # elapsed ms per repetition

    @property
    def aet_ms(self) -> float:
        return fmean(self.samples)

    @property
    def mad_ms(self) -> float:
        return mad(self.samples)


@dataclass
class MeasurementReport:
    setup: str
    reps: int
    seed: int
    stats: dict = field(default_factory=dict)  # ExecutionType -> EtypeStats
    last_trace: SimTrace | None = None

    @property
    def aet_i(self) -> float | None:
        sm = self.stats.get(ExecutionType.SM)
        cm = self.stats.get(ExecutionType.CM)
        if sm is None or cm is None:
            return None
        return compute_improvement(sm.aet_ms, cm.aet_ms)


def _build_run(cfg: ScenarioConfig, etype: ExecutionType):
    plans, _ = build_plans(cfg)
    pose = cfg.start.components()
    if etype is ExecutionType.RC:
        return NativeTriggerProgram(), NativeExecutor(plans, initial_pose=pose)
    if etype is ExecutionType.SM:
        return SingleMotionProgram(plans), RobotExecutor(initial_pose=pose)
    return ContinuousMotionProgram(plans), RobotExecutor(initial_pose=pose)


def run_benchmark(
    cfg: ScenarioConfig,
    etypes=(ExecutionType.RC, ExecutionType.SM, ExecutionType.CM),
    reps: int = 25,
    seed: int = 0,
    sim: SimConfig = SimConfig(),
) -> MeasurementReport:
    """Measure every requested execution type over ``reps`` repetitions.

    ``sim`` provides the cycle times; its seed/rep fields are overridden per
    repetition so that repetition k shares phases across execution types.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    report = MeasurementReport(setup=cfg.name, reps=reps, seed=seed)
    for etype in etypes:
        samples = []
        for rep in range(reps):
            program, executor = _build_run(cfg, etype)
            rep_cfg = SimConfig(
                plc_cycle_us=sim.plc_cycle_us,
                bus_cycle_us=sim.bus_cycle_us,
                robot_cycle_us=sim.robot_cycle_us,
                seed=seed,
                rep=rep,
                timeout_us=sim.timeout_us,
            )
            result = run(program, executor, rep_cfg)
            samples.append(program.elapsed_ms)
            report.last_trace = result.trace
        report.stats[etype] = EtypeStats(etype=etype, samples=tuple(samples))
    return report


# --- rendering ---------------------------------------------------------------

_ETYPE_ORDER = (ExecutionType.RC, ExecutionType.SM, ExecutionType.CM)


def _ordered(report: MeasurementReport):
    return [report.stats[e] for e in _ETYPE_ORDER if e in report.stats]


def render_table(reports) -> str:
    out = []
    for rep in reports:
        out.append(f"setup {rep.setup}  (reps={rep.reps} seed={rep.seed})")
        out.append(f"  {'etype':<6} {'aet_ms':>12} {'mad_ms':>10}")
        for st in _ordered(rep):
            out.append(f"  {st.etype.value:<6} {st.aet_ms:>12.3f} {st.mad_ms:>10.3f}")
        if rep.aet_i is not None:
            out.append(f"  improvement (sm vs cm): {rep.aet_i:.4f}")
        out.append("")
    return "\n".join(out)


def raw_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["setup", "etype", "rep", "elapsed_ms"])
    for rep in reports:
        for st in _ordered(rep):
            for i, v in enumerate(st.samples):
                w.writerow([rep.setup, st.etype.value, i, repr(v)])
    return buf.getvalue()


def summary_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["setup", "etype", "aet_ms", "mad_ms", "aet_i"])
    for rep in reports:
        for st in _ordered(rep):
            improvement = ""
            if st.etype is ExecutionType.CM and rep.aet_i is not None:
                improvement = repr(rep.aet_i)
            w.writerow([rep.setup, st.etype.value, repr(st.aet_ms), repr(st.mad_ms), improvement])
    return buf.getvalue()
