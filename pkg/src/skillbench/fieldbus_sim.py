"""Deterministic co-simulation of the PLC, fieldbus, and robot tasks.

Three strictly periodic tasks run on an integer microsecond clock:

* the PLC task (default 1 ms) runs the trigger program,
* the bus task (default 1 ms) atomically exchanges both 256-byte process
  images between the controllers,
* the robot task (default 4 ms) runs the motion executor.

Frames travel as immutable ``bytes`` objects; every receiver compares by
object identity before decoding, so an unchanged image costs nothing.  Each
repetition draws one random phase offset per task (uniform over the task's
cycle, quantized to microseconds) from a seed derived from (seed, rep);
everything else is exact, so a run is reproducible bit for bit.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field

from .wire import (
    IDLE_COMMAND_BYTES,
    IDLE_FEEDBACK_BYTES,
    decode_command_frame,
    decode_feedback_frame,
)


class SimTimeout(Exception):
    """The program did not finish within the simulated time budget."""


@dataclass(frozen=True)
class SimConfig:
    plc_cycle_us: int = 1000
    bus_cycle_us: int = 1000
    robot_cycle_us: int = 4000
    seed: int = 0
    rep: int = 0
    timeout_us: int = 120_000_000

    def __post_init__(self):
        for name in ("plc_cycle_us", "bus_cycle_us", "robot_cycle_us"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.timeout_us <= 0:
            raise ValueError("timeout_us must be positive")


def rep_seed(seed: int, rep: int) -> int:
    """Per-repetition child seed; stable across execution types for pairing."""
    return (seed * 1_000_000_007 + rep) & 0xFFFFFFFF


def _hash12(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()[:12]


@dataclass(frozen=True)
class TraceEvent:
    t_us: int
    source: str
    kind: str
    detail: str


@dataclass
class SimTrace:
    events: list = field(default_factory=list)

    def add(self, t_us: int, source: str, kind: str, detail: str):
        self.events.append(TraceEvent(t_us, source, kind, detail))

    def export_text(self) -> str:
        lines = [
            f"{e.t_us:>12} {e.source:<5} {e.kind:<12} {e.detail}" for e in self.events
        ]
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.export_text().encode()).hexdigest()


@dataclass
class SimResult:
    trace: SimTrace
    finished_at_us: int


def _cmd_summary(data: bytes) -> str:
    f = decode_command_frame(data)
    return (
        f"word={f.command.name} count={f.record_count} total={f.total_no} "
        f"loaded={f.loaded_through} seq={f.frame_seq} {_hash12(data)}"
    )


def _fb_summary(data: bytes) -> str:
    f = decode_feedback_frame(data)
    return f"state={f.state.name} cur={f.cur_exec} err={f.error_code} {_hash12(data)}"


def run(program, executor, config: SimConfig = SimConfig()) -> SimResult:
    """Run the co-simulation until the program finishes.

    ``program`` supplies ``plc_tick(t_us, fb_bytes) -> bytes`` and a
    ``finished`` flag; ``executor`` supplies ``tick(t_us, cmd_bytes) ->
    bytes``.  Raises SimTimeout when the clock passes ``timeout_us`` and
    lets program/executor exceptions propagate after recording them.
    """
    rng = random.Random(rep_seed(config.seed, config.rep))
    phase_plc = rng.randrange(config.plc_cycle_us)
    phase_bus = rng.randrange(config.bus_cycle_us)
    phase_robot = rng.randrange(config.robot_cycle_us)

    trace = SimTrace()
    trace.add(0, "sim", "phases", f"plc={phase_plc} bus={phase_bus} robot={phase_robot}")

    # published images and delivered images, all by reference
    plc_out = IDLE_COMMAND_BYTES
    robot_out = IDLE_FEEDBACK_BYTES
    cmd_at_robot = IDLE_COMMAND_BYTES
    fb_at_plc = IDLE_FEEDBACK_BYTES

    next_plc = phase_plc
    next_bus = phase_bus
    next_robot = phase_robot
    finished_at = None

    while True:
        t = min(next_plc, next_bus, next_robot)
        if t > config.timeout_us:
            trace.add(t, "sim", "timeout", f"after {config.timeout_us} us")
            raise SimTimeout(f"no completion within {config.timeout_us} us")
        # tie order: PLC before bus before robot
        if next_plc == t:
            try:
                out = program.plc_tick(t, fb_at_plc)
            except Exception as e:
                trace.add(t, "plc", "error", f"{type(e).__name__}: {e}")
                raise
            if out is not plc_out:
                plc_out = out
                trace.add(t, "plc", "cmd", _cmd_summary(out))
            if program.t_start_us == t:
                trace.add(t, "plc", "measure", "start")
            if program.t_end_us == t:
                trace.add(t, "plc", "measure", "end")
            if program.finished:
                finished_at = t
                trace.add(t, "sim", "finished", f"t={t}")
                break
            next_plc += config.plc_cycle_us
        if next_bus == t:
            # one atomic exchange of both directions
            if plc_out is not cmd_at_robot:
                cmd_at_robot = plc_out
                trace.add(t, "bus", "cmd_deliver", _hash12(cmd_at_robot))
            if robot_out is not fb_at_plc:
                fb_at_plc = robot_out
                trace.add(t, "bus", "fb_deliver", _hash12(fb_at_plc))
            next_bus += config.bus_cycle_us
        if next_robot == t:
            try:
                out = executor.tick(t, cmd_at_robot)
            except Exception as e:
                trace.add(t, "robot", "error", f"{type(e).__name__}: {e}")
                raise
            if out is not robot_out:
                robot_out = out
                trace.add(t, "robot", "fb", _fb_summary(out))
            next_robot += config.robot_cycle_us

    return SimResult(trace=trace, finished_at_us=finished_at)
