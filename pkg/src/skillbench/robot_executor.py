"""Robot side of the skill protocol.

Two executors share one motion engine:

* ``RobotExecutor`` consumes the cyclic 256-byte command image, validates
  and ingests records as the PLC streams them through the five slots, and
  reports progress through the feedback image.
* ``NativeExecutor`` holds whole motion plans locally (the classic "program
  stored on the robot controller" setup) and only uses the bus for a
  START/DONE handshake.

The engine quantizes execution to whole robot cycles: a motion's remaining
time only advances once per tick, so a motion of duration d occupies
ceil(d / cycle) ticks; zero-duration motions complete within their
activation tick.  Exit speeds are committed at activation time from the
records visible at that moment and are never revised afterwards: when the
successor record has not arrived yet, the motion plans a full stop (a
starvation fallback), even if the record shows up before the motion ends.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .trajectory import (
    COLLINEAR_EPS,
    SegmentSpec,
    _turn_angle,
    blend_geometry,
    ptp_time,
    segment_time,
)
from .wire import (
    SLOT_COUNT,
    CommandFrame,
    CommandWord,
    DecodeError,
    FeedbackFrame,
    IDLE_FEEDBACK_BYTES,
    MalformedContinuation,
    MotionRecord,
    RobotState,
    WireError,
    decode_command_frame,
    decode_record,
    encode_feedback_frame,
    explode_plan,
    slot_for_record,
)

ERROR_RECORD = 1  # malformed or out-of-sequence record / frame
ERROR_STARVATION = 2  # record supply stalled beyond the starvation limit

_REVERSAL_EPS = 1e-9
_MIN_BLEND_SPEED = 1e-9
_FEAS_SLACK = 1e-9


@dataclass(frozen=True)
class _Phys:
    """One physical motion: a single record, or a continuation pair."""

    joint: bool
    legs: tuple  # cartesian waypoints after the start point (1 or 2)
    target: tuple  # full 6-component target (pose, or joint angles)
    v: float
    a: float
    approx: float
    first_record: int  # 1-based index of the first wire record
    n_records: int


def _phys_from_group(group: list[MotionRecord], first_record: int) -> _Phys:
    rec = group[-1]
    return _Phys(
        joint=rec.joint_target,
        legs=() if rec.joint_target else tuple(r.target[:3] for r in group),
        target=rec.target,
        v=rec.velocity,
        a=rec.acceleration,
        approx=rec.approx_distance,
        first_record=first_record,
        n_records=len(group),
    )


class _MotionEngine:
    """Cycle-quantized execution over a growing list of physical motions.

    The entry speed and entry truncation of the next motion are whatever the
    previous motion committed as its exit; both start at zero for a fresh
    skill.  ``fallback_stops`` counts activations that had to commit an exact
    stop because the successor record was not visible yet (cumulative over
    the engine's lifetime).
    """

    def __init__(self, pose=(0.0,) * 6, joints=(0.0,) * 6):
        self.pose = tuple(float(v) for v in pose)
        self.joints = tuple(float(v) for v in joints)
        self.fallback_stops = 0
        self.captured: list | None = None  # (first_record, n_records, target, dur_us)
        self.begin_skill(0)

    def begin_skill(self, total_records: int):
        self._phys: list[_Phys] = []
        self._next = 0
        self._active = None
        self._elapsed = 0
        self._entry_speed = 0.0
        self._entry_trunc = 0.0
        self.total_records = total_records
        self.completed_records = 0

    def ingest(self, phys: _Phys):
        self._phys.append(phys)

    def discard_motion(self):
        self._active = None
        self._elapsed = 0
        self._entry_speed = 0.0
        self._entry_trunc = 0.0

    @property
    def done(self) -> bool:
        return self.completed_records >= self.total_records

    def _complete(self):
        dur_us, ph, end_pose, end_joints, exit_speed, exit_trunc = self._active
        self.pose = end_pose
        self.joints = end_joints
        self.completed_records += ph.n_records
        self._entry_speed = exit_speed
        self._entry_trunc = exit_trunc
        self._active = None
        self._elapsed = 0
        self._next += 1
        if self.captured is not None:
            self.captured.append((ph.first_record, ph.n_records, ph.target, dur_us))

    def _set_active(self, seconds, ph, end_pose, end_joints, exit_speed, exit_trunc):
        dur_us = max(0, math.ceil(seconds * 1e6 - 1e-12))
        self._active = (dur_us, ph, end_pose, end_joints, exit_speed, exit_trunc)
        self._elapsed = 0

    def _activate(self):
        m = self._phys[self._next]
        if m.joint:
            # corners never blend into or out of a joint motion, so the
            # committed entry speed here is always zero; the TCP pose is held
            deltas = [t - c for t, c in zip(m.target, self.joints)]
            dur = ptp_time(deltas, m.v, m.a)
            self._set_active(dur, m, self.pose, tuple(m.target), 0.0, 0.0)
            return

        # visible window: consecutive cartesian motions from here on
        window = [m]
        j = self._next + 1
        while j < len(self._phys) and not self._phys[j].joint:
            window.append(self._phys[j])
            j += 1
        K = len(window)

        last_known = window[-1].first_record + window[-1].n_records - 1
        if K == 1 and self._next + 1 >= len(self._phys) and last_known < self.total_records:
            # successor exists but has not arrived: commit an exact stop
            self.fallback_stops += 1

        starts = []
        lengths = []
        p = self.pose[:3]
        for ph in window:
            starts.append(p)
            length = 0.0
            for q in ph.legs:
                length += math.dist(p, q)
                p = q
            lengths.append(length)

        # corner j sits between window[j-1] and window[j]; same rules as the
        # group profile planner: collinear corners pass through, zero approx
        # or reversals or blends that do not fit degrade to exact stops
        blends = [None] * (K + 1)
        for j in range(1, K):
            am, bm = window[j - 1], window[j]
            corner = am.legs[-1]
            prev_pt = am.legs[-2] if len(am.legs) > 1 else starts[j - 1]
            next_pt = bm.legs[0]
            if (
                lengths[j - 1] == 0.0
                or lengths[j] == 0.0
                or math.dist(prev_pt, corner) == 0.0
                or math.dist(corner, next_pt) == 0.0
            ):
                continue  # degenerate junction: exact stop
            angle = _turn_angle(prev_pt, corner, next_pt)
            approx = am.approx
            if angle <= COLLINEAR_EPS:
                blends[j] = blend_geometry(0.0, approx, am.v, bm.v, am.a)
                continue
            if approx == 0.0:
                continue
            if angle >= math.pi - _REVERSAL_EPS:
                continue
            if lengths[j - 1] < 2.0 * approx or lengths[j] < 2.0 * approx:
                continue
            blends[j] = blend_geometry(angle, approx, am.v, bm.v, min(am.a, bm.a))

        speeds = [0.0] * (K + 1)
        while True:
            trunc = [b.truncation if b is not None else 0.0 for b in blends]
            trunc[0] = self._entry_trunc
            eff = [lengths[w] - trunc[w] - trunc[w + 1] for w in range(K)]
            speeds[0] = self._entry_speed
            for j in range(1, K):
                speeds[j] = blends[j].v_blend if blends[j] is not None else 0.0
            speeds[K] = 0.0
            for j in range(1, K):  # forward reachability
                if speeds[j] > 0.0:
                    cap = math.sqrt(speeds[j - 1] ** 2 + 2.0 * window[j - 1].a * eff[j - 1])
                    if cap < speeds[j]:
                        speeds[j] = cap
            for j in range(K - 1, 0, -1):  # backward deceleration
                if speeds[j] > 0.0:
                    cap = math.sqrt(speeds[j + 1] ** 2 + 2.0 * window[j].a * eff[j])
                    if cap < speeds[j]:
                        speeds[j] = cap
            stuck = {
                j
                for j in range(1, K)
                if blends[j] is not None
                and blends[j].arc_length > 0.0
                and speeds[j] < _MIN_BLEND_SPEED
            }
            if K > 1 and blends[1] is not None and 1 not in stuck:
                # the committed entry speed cannot be revised; if the first
                # segment cannot shed it before the corner, the corner goes
                need = speeds[0] ** 2 - speeds[1] ** 2
                budget = 2.0 * window[0].a * eff[0]
                if need > budget * (1.0 + 1e-12) + _FEAS_SLACK:
                    stuck.add(1)
            if not stuck:
                break
            for j in stuck:
                blends[j] = None

        c1 = speeds[1] if K > 1 else 0.0
        b1 = blends[1] if K > 1 else None
        dur = segment_time(SegmentSpec(eff[0], m.v, m.a, speeds[0], c1))
        if b1 is not None and b1.arc_length > 0.0:
            dur += b1.arc_length / c1
        exit_trunc = b1.truncation if b1 is not None else 0.0
        self._set_active(dur, m, tuple(m.target), self.joints, c1, exit_trunc)

    def advance(self, cycle_us: int) -> bool:
        """One robot cycle of execution.  False means starved: nothing ran
        and the next record is missing."""
        progressed = False
        if self._active is not None and self._elapsed >= self._active[0]:
            self._complete()
            progressed = True
        while self._active is None and self._next < len(self._phys):
            self._activate()
            if self._active[0] == 0:
                self._complete()
                progressed = True
            else:
                break
        if self._active is not None:
            self._elapsed += cycle_us
            return True
        return progressed or self.done


class RobotExecutor:
    """Streaming skill executor driven by the cyclic command image.

    ``tick`` is the robot task: it ingests command frames (by object
    identity, so an unchanged image costs nothing), advances execution by
    one cycle, and returns the feedback image to publish.  Record errors
    surface as feedback state ERROR with code 1, starvation beyond
    ``starvation_limit`` consecutive hungry cycles as code 2.
    """

    def __init__(
        self,
        initial_pose=(0.0,) * 6,
        initial_joints=(0.0,) * 6,
        cycle_us: int = 4000,
        starvation_limit: int = 250,
        capture: bool = False,
    ):
        self._engine = _MotionEngine(initial_pose, initial_joints)
        if capture:
            self._engine.captured = []
        self._cycle_us = cycle_us
        self._starvation_limit = starvation_limit
        self._state = RobotState.IDLE
        self._error = 0
        self._total = 0
        self._known = 0  # highest record index ingested
        self._pending_cont: MotionRecord | None = None
        self._hungry = 0
        self._acked = 0
        self.skills_done = 0
        self._cmd_obj: bytes | None = None
        self._fb = FeedbackFrame()
        self._fb_bytes = IDLE_FEEDBACK_BYTES

    @property
    def state(self) -> RobotState:
        return self._state

    @property
    def pose(self) -> tuple:
        return self._engine.pose

    @property
    def fallback_stops(self) -> int:
        return self._engine.fallback_stops

    @property
    def executed(self) -> list:
        """Captured (first_record, n_records, target, duration_us) tuples."""
        if self._engine.captured is None:
            raise RuntimeError("executor built without capture=True")
        return self._engine.captured

    def _fail(self, code: int):
        self._state = RobotState.ERROR
        self._error = code
        self._engine.discard_motion()

    def _ingest_through(self, frame: CommandFrame):
        for idx in range(self._known + 1, frame.loaded_through + 1):
            rec = decode_record(frame.slots[slot_for_record(idx)])
            if rec.record_seq != idx % 0x10000:
                raise DecodeError(
                    f"record {idx}: sequence {rec.record_seq}, expected {idx % 0x10000}"
                )
            if self._pending_cont is not None:
                if rec.continuation or rec.motion_type is not self._pending_cont.motion_type:
                    raise MalformedContinuation("continuation without matching target")
                self._engine.ingest(_phys_from_group([self._pending_cont, rec], idx - 1))
                self._pending_cont = None
            elif rec.continuation:
                self._pending_cont = rec
            else:
                self._engine.ingest(_phys_from_group([rec], idx))
        self._known = frame.loaded_through
        if self._known == self._total and self._pending_cont is not None:
            raise MalformedContinuation("skill ends on a continuation record")

    def _apply_frame(self, frame: CommandFrame):
        st = self._state
        if frame.command is CommandWord.ABORT:
            if st in (RobotState.LOADING, RobotState.RUNNING, RobotState.DONE):
                self._engine.discard_motion()
                self._state = RobotState.ABORTING
        elif frame.command is CommandWord.IDLE:
            if st in (RobotState.DONE, RobotState.ERROR, RobotState.ABORTING):
                self._state = RobotState.IDLE
                self._error = 0
                self._total = 0
                self._known = 0
                self._pending_cont = None
            elif st in (RobotState.LOADING, RobotState.RUNNING):
                # command withdrawn mid-skill: stop gracefully
                self._engine.discard_motion()
                self._state = RobotState.ABORTING
        elif frame.command is CommandWord.START:
            if st is RobotState.IDLE:
                if frame.loaded_through > SLOT_COUNT:
                    raise DecodeError(
                        f"initial load of {frame.loaded_through} exceeds the slot window"
                    )
                self._total = frame.total_no
                self._known = 0
                self._pending_cont = None
                self._hungry = 0
                self._engine.begin_skill(frame.total_no)
                self._ingest_through(frame)
                self._state = RobotState.LOADING
            elif st in (RobotState.LOADING, RobotState.RUNNING):
                if frame.total_no != self._total:
                    raise DecodeError(
                        f"totalNo changed mid-skill: {self._total} -> {frame.total_no}"
                    )
                if frame.loaded_through < self._known:
                    raise DecodeError(
                        f"loadedThrough regressed: {self._known} -> {frame.loaded_through}"
                    )
                self._ingest_through(frame)
        self._acked = frame.frame_seq

    def tick(self, t_us: int, cmd_bytes: bytes) -> bytes:
        if cmd_bytes is not self._cmd_obj:
            self._cmd_obj = cmd_bytes
            try:
                self._apply_frame(decode_command_frame(cmd_bytes))
            except WireError:
                self._fail(ERROR_RECORD)

        if self._state is RobotState.LOADING:
            self._state = RobotState.RUNNING
        if self._state is RobotState.RUNNING:
            made_progress = self._engine.advance(self._cycle_us)
            if self._engine.done:
                self._state = RobotState.DONE
                self._hungry = 0
                self.skills_done += 1
            elif made_progress:
                self._hungry = 0
            else:
                self._hungry += 1
                if self._hungry >= self._starvation_limit:
                    self._fail(ERROR_STARVATION)

        if self._state in (RobotState.RUNNING, RobotState.DONE):
            cur = min(self._engine.completed_records + 1, self._total)
        elif self._state is RobotState.ERROR:
            cur = self._fb.cur_exec
        else:
            cur = 0
        fb = FeedbackFrame(
            state=self._state,
            error_code=self._error,
            cur_exec=cur,
            acked_seq=self._acked,
            pose=self._engine.pose,
        )
        if fb != self._fb:
            self._fb = fb
            self._fb_bytes = encode_feedback_frame(fb)
        return self._fb_bytes


class NativeExecutor:
    """Robot-resident motion program with a bus-level START/DONE handshake.

    Takes the same continuous plans the streaming path would receive and
    runs them back to back; the exact stop between groups comes from the
    final motion of each group carrying approx 0.  Plans pass through the
    wire record representation on load, so both executors work from
    identical (f32-quantized) numbers.
    """

    def __init__(
        self,
        plans,
        initial_pose=(0.0,) * 6,
        initial_joints=(0.0,) * 6,
        cycle_us: int = 4000,
        capture: bool = False,
    ):
        self._engine = _MotionEngine(initial_pose, initial_joints)
        if capture:
            self._engine.captured = []
        self._cycle_us = cycle_us
        records = []
        for p in plans:
            records.extend(explode_plan(p.motions))
        # renumber to one consecutive stream
        phys: list[_Phys] = []
        idx = 1
        pending = None
        for rec in records:
            if pending is not None:
                phys.append(_phys_from_group([pending, rec], idx - 1))
                pending = None
            elif rec.continuation:
                pending = rec
                idx += 1
                continue
            else:
                phys.append(_phys_from_group([rec], idx))
            idx += 1
        self._program = phys
        self._total = sum(ph.n_records for ph in phys)
        self._state = RobotState.IDLE
        self._cmd_obj: bytes | None = None
        self._acked = 0
        self._fb = FeedbackFrame()
        self._fb_bytes = IDLE_FEEDBACK_BYTES

    @property
    def state(self) -> RobotState:
        return self._state

    @property
    def pose(self) -> tuple:
        return self._engine.pose

    @property
    def executed(self) -> list:
        """Captured (first_record, n_records, target, duration_us) tuples."""
        if self._engine.captured is None:
            raise RuntimeError("executor built without capture=True")
        return self._engine.captured

    def tick(self, t_us: int, cmd_bytes: bytes) -> bytes:
        if cmd_bytes is not self._cmd_obj:
            self._cmd_obj = cmd_bytes
            try:
                frame = decode_command_frame(cmd_bytes)
            except WireError:
                frame = None
            if frame is not None:
                if frame.command is CommandWord.START and self._state is RobotState.IDLE:
                    self._engine.begin_skill(self._total)
                    for ph in self._program:
                        self._engine.ingest(ph)
                    self._state = RobotState.RUNNING
                elif frame.command is CommandWord.ABORT and self._state in (
                    RobotState.RUNNING,
                    RobotState.DONE,
                ):
                    self._engine.discard_motion()
                    self._state = RobotState.ABORTING
                elif frame.command is CommandWord.IDLE and self._state in (
                    RobotState.DONE,
                    RobotState.ABORTING,
                ):
                    self._state = RobotState.IDLE
                self._acked = frame.frame_seq

        if self._state is RobotState.RUNNING:
            self._engine.advance(self._cycle_us)
            if self._engine.done:
                self._state = RobotState.DONE

        if self._state in (RobotState.RUNNING, RobotState.DONE):
            cur = min(self._engine.completed_records + 1, self._total)
        else:
            cur = 0
        fb = FeedbackFrame(
            state=self._state,
            error_code=0,
            cur_exec=cur,
            acked_seq=self._acked,
            pose=self._engine.pose,
        )
        if fb != self._fb:
            self._fb = fb
            self._fb_bytes = encode_feedback_frame(fb)
        return self._fb_bytes
