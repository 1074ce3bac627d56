"""PLC side of the skill protocol: trigger instances and cycle programs.

A ``PlcSkillInstance`` owns the outgoing command image.  Starting a skill
loads the first records into the five slots and raises the START word; the
cyclic ``cycle()`` call consumes robot feedback, streams further records
into freed slots (FIFO), and walks the handshake back to IDLE when the
robot reports DONE.

Programs sequence whole measurement runs out of skill instances: one skill
per continuous group, one skill per motion, or a single trigger for a
natively stored program.  They also timestamp the measurement window
(first START emission to final DONE observation).
"""

from __future__ import annotations

from dataclasses import replace
from enum import Enum

from .wire import (
    SLOT_COUNT,
    RECORD_SIZE,
    CommandFrame,
    CommandWord,
    FeedbackFrame,
    RobotState,
    decode_feedback_frame,
    encode_command_frame,
    encode_record,
    explode_plan,
    slot_for_record,
)


class ProtocolError(Exception):
    pass


class BusySkill(ProtocolError):
    """start requested while a skill is still in flight"""


class PlanTooLarge(ProtocolError):
    """record count does not fit the totalNo field"""


class FeedbackRegression(ProtocolError):
    """curExec moved backwards; the feedback channel is corrupt"""


class NotRunning(ProtocolError):
    """abort requested while no skill is in flight"""


class RobotError(ProtocolError):
    """robot reported the ERROR state"""

    def __init__(self, code: int):
        super().__init__(f"robot error code {code}")
        self.code = code


class PlcSkillState(Enum):
    IDLE = "idle"
    LOADING = "loading"
    RUNNING = "running"
    DONE = "done"
    ABORTING = "aborting"
    ERROR = "error"


_ZERO_SLOTS = (bytes(RECORD_SIZE),) * SLOT_COUNT


class PlcSkillInstance:
    """Command-image owner for one robot connection.

    Runs one skill at a time.  ``image`` is the 256-byte frame to put on the
    bus this cycle; it only changes when the content changes, so callers can
    compare by object identity.
    """

    def __init__(self):
        self._state = PlcSkillState.IDLE
        self._records = []
        self._total = 0
        self._loaded = 0
        self._last_cur = 0
        self._frame_seq = 0
        self._frame = CommandFrame()
        self._image = encode_command_frame(self._frame)
        self.skills_completed = 0
        self.last_error: int | None = None

    @property
    def state(self) -> PlcSkillState:
        return self._state

    @property
    def image(self) -> bytes:
        return self._image

    def _publish(self, frame: CommandFrame):
        self._frame = frame
        self._image = encode_command_frame(frame)

    def _next_seq(self) -> int:
        self._frame_seq = (self._frame_seq + 1) & 0xFFFF
        return self._frame_seq

    def start_records(self, records):
        """Load a record list as a new skill and raise START."""
        if self._state is not PlcSkillState.IDLE:
            raise BusySkill(f"skill still {self._state.value}")
        records = list(records)
        if len(records) > 0xFFFFFFFF:
            raise PlanTooLarge(f"{len(records)} records do not fit totalNo")
        self._records = records
        self._total = len(records)
        self._loaded = min(SLOT_COUNT, self._total)
        self._last_cur = 0
        slots = list(_ZERO_SLOTS)
        for m in range(1, self._loaded + 1):
            slots[slot_for_record(m)] = encode_record(records[m - 1])
        self._publish(
            CommandFrame(
                command=CommandWord.START,
                record_count=self._loaded,
                total_no=self._total,
                loaded_through=self._loaded,
                frame_seq=self._next_seq(),
                slots=tuple(slots),
            )
        )
        self._state = PlcSkillState.LOADING

    def start_skill(self, plan):
        self.start_records(explode_plan(plan.motions))

    def abort(self):
        if self._state is PlcSkillState.IDLE:
            raise NotRunning("no skill in flight")
        if self._state is PlcSkillState.ABORTING:
            return
        self._publish(
            CommandFrame(command=CommandWord.ABORT, frame_seq=self._next_seq())
        )
        self._state = PlcSkillState.ABORTING

    def _go_idle_command(self):
        self._publish(CommandFrame(frame_seq=self._next_seq()))

    def _refill(self, cur: int):
        # record m may overwrite its slot once record m-5 is complete, i.e.
        # once curExec has moved past it: m <= cur + SLOT_COUNT - 1
        if cur < self._last_cur:
            raise FeedbackRegression(f"curExec went {self._last_cur} -> {cur}")
        self._last_cur = cur
        target = min(self._total, cur + SLOT_COUNT - 1)
        if target <= self._loaded:
            return
        frame = self._frame
        slots = list(frame.slots)
        for m in range(self._loaded + 1, target + 1):
            slots[slot_for_record(m)] = encode_record(self._records[m - 1])
        self._loaded = target
        self._publish(
            replace(
                frame,
                loaded_through=self._loaded,
                frame_seq=self._next_seq(),
                slots=tuple(slots),
            )
        )

    def cycle(self, fb: FeedbackFrame):
        """One PLC task cycle: consume feedback, update the command image."""
        st = self._state
        if st is PlcSkillState.IDLE:
            return
        if fb.state is RobotState.ERROR and st is not PlcSkillState.ERROR:
            self.last_error = fb.error_code
            self._state = PlcSkillState.ERROR
            self._go_idle_command()
            return
        if st is PlcSkillState.LOADING:
            if fb.state in (RobotState.LOADING, RobotState.RUNNING):
                self._state = PlcSkillState.RUNNING
                self._refill(fb.cur_exec)
            elif fb.state is RobotState.DONE:
                self._state = PlcSkillState.DONE
                self._go_idle_command()
        elif st is PlcSkillState.RUNNING:
            if fb.state is RobotState.DONE:
                self._state = PlcSkillState.DONE
                self._go_idle_command()
            else:
                self._refill(fb.cur_exec)
        elif st is PlcSkillState.DONE:
            if fb.state is RobotState.IDLE:
                self._state = PlcSkillState.IDLE
                self.skills_completed += 1
                self._records = []
        elif st is PlcSkillState.ABORTING:
            if fb.state in (RobotState.ABORTING, RobotState.IDLE):
                if self._frame.command is not CommandWord.IDLE:
                    self._go_idle_command()
                if fb.state is RobotState.IDLE:
                    self._state = PlcSkillState.IDLE
        elif st is PlcSkillState.ERROR:
            if fb.state is RobotState.IDLE:
                self._state = PlcSkillState.IDLE


class _SequencedProgram:
    """Runs a list of record-list skills back to back over one connection.

    ``t_start_us`` marks the cycle that first emitted START, ``t_end_us`` the
    cycle that read the final skill's DONE; the trailing IDLE handshake falls
    outside the measured window.
    """

    def __init__(self, skills):
        self._skills = [list(s) for s in skills]
        self.plc = PlcSkillInstance()
        self._next = 0
        self._current_last = False
        self.t_start_us: int | None = None
        self.t_end_us: int | None = None
        self.finished = False
        self._fb_obj: bytes | None = None
        self._fb: FeedbackFrame = FeedbackFrame()

    def _decode(self, fb_bytes: bytes) -> FeedbackFrame:
        if fb_bytes is not self._fb_obj:
            self._fb_obj = fb_bytes
            self._fb = decode_feedback_frame(fb_bytes)
        return self._fb

    def plc_tick(self, t_us: int, fb_bytes: bytes) -> bytes:
        fb = self._decode(fb_bytes)
        plc = self.plc
        if fb.state is RobotState.ERROR:
            raise RobotError(fb.error_code)
        before = plc.state
        plc.cycle(fb)
        if (
            self._current_last
            and before is not PlcSkillState.DONE
            and plc.state is PlcSkillState.DONE
            and self.t_end_us is None
        ):
            self.t_end_us = t_us
        if plc.state is PlcSkillState.IDLE and not self.finished:
            if self._next < len(self._skills):
                if fb.state is RobotState.IDLE:
                    plc.start_records(self._skills[self._next])
                    self._current_last = self._next == len(self._skills) - 1
                    self._next += 1
                    if self.t_start_us is None:
                        self.t_start_us = t_us
            else:
                self.finished = True
        return plc.image

    @property
    def elapsed_ms(self) -> float:
        if self.t_start_us is None or self.t_end_us is None:
            raise RuntimeError("program did not complete a measurement")
        return (self.t_end_us - self.t_start_us) / 1000.0


class ContinuousMotionProgram(_SequencedProgram):
    """One skill per continuous group, full handshake between groups."""

    def __init__(self, plans):
        super().__init__([explode_plan(p.motions) for p in plans])


class SingleMotionProgram(_SequencedProgram):
    """One skill per motion; every motion ends on its exact target."""

    def __init__(self, plans):
        skills = [
            explode_plan([replace(m, approx_distance=0.0)])
            for p in plans
            for m in p.motions
        ]
        super().__init__(skills)


class NativeTriggerProgram(_SequencedProgram):
    """Single START/DONE handshake for a natively stored motion program."""

    def __init__(self):
        super().__init__([[]])
