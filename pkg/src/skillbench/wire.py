"""Bit-exact wire images for the cyclic PLC<->robot interface.

Everything on the wire is little-endian and fixed size: a motion record is
exactly 44 bytes, and both process images (command and feedback) are exactly
256 bytes.  Floats are IEEE-754 single precision, so any float that should
survive a round trip must be representable in 32 bits; `explode_motion`
quantizes accordingly.

Motion record layout (44 bytes):

    off  size  field
    0    1     motion type code (1..6)
    1    1     flags: bit0 joint-space target, bit1 aux continuation
    2    2     record_seq (u16, global record index mod 65536)
    4    24    six f32 target components (x,y,z,a,b,c or j1..j6)
    28   4     f32 velocity
    32   4     f32 acceleration
    36   4     f32 approx_distance
    40   1     tool frame id
    41   1     base frame id
    42   2     u16 force setpoint (deci-newtons)

Command frame layout (256 bytes): 12-byte header (command word u8,
record_count u8, totalNo u32, loadedThrough u32, frame_seq u16), then five
44-byte record slots at bytes 12..231, then zero padding.  Record m
(1-based) lives in slot (m-1) % 5.

Feedback frame layout (256 bytes, 36 used): state u8, error code u8,
curExec u32, acked frame_seq u16, six f32 TCP pose components, four
reserved zero bytes, then padding.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from enum import IntEnum

from .core import JointTarget, MotionCommand, MotionType, Pose

RECORD_SIZE = 44
FRAME_SIZE = 256
SLOT_COUNT = 5
HEADER_SIZE = 12
FEEDBACK_USED = 36

_RECORD_FMT = struct.Struct("<BBH9fBBH")
_CMD_HEADER_FMT = struct.Struct("<BBIIH")
_FEEDBACK_FMT = struct.Struct("<BBIH6f")
_F32 = struct.Struct("<f")

_FLAG_JOINT = 0x01
_FLAG_CONTINUATION = 0x02

assert _RECORD_FMT.size == RECORD_SIZE
assert _CMD_HEADER_FMT.size == HEADER_SIZE
assert _FEEDBACK_FMT.size == FEEDBACK_USED - 4


class WireError(Exception):
    """Base for encode/decode failures."""


class EncodeError(WireError):
    pass


class UnencodableValue(EncodeError):
    """A field does not fit its wire representation."""


class DecodeError(WireError):
    pass


class UnknownMotionType(DecodeError):
    pass


class NonFiniteScalar(DecodeError):
    pass


class MalformedContinuation(DecodeError):
    """Continuation record with nonzero orientation slots."""


class MalformedRecord(DecodeError):
    """Reserved flag bits set, or joint flag inconsistent with the type."""


class FrameTooShort(DecodeError):
    pass


class FrameTooLong(DecodeError):
    pass


class BadCommandWord(DecodeError):
    pass


class RecordCountOutOfRange(DecodeError):
    pass


class BadStateCode(DecodeError):
    pass


class CommandWord(IntEnum):
    IDLE = 0
    START = 1
    ABORT = 2


class RobotState(IntEnum):
    IDLE = 0
    LOADING = 1
    RUNNING = 2
    DONE = 3
    ERROR = 4
    ABORTING = 5


def f32(x: float) -> float:
    """Round a float through IEEE-754 single precision."""
    return _F32.unpack(_F32.pack(x))[0]


def slot_for_record(m: int) -> int:
    """Slot index for 1-based record index m."""
    if m < 1:
        raise ValueError("record indices are 1-based")
    return (m - 1) % SLOT_COUNT


@dataclass(frozen=True)
class MotionRecord:
    """Decoded content of one 44-byte wire record."""

    motion_type: MotionType
    record_seq: int
    target: tuple[float, float, float, float, float, float]
    velocity: float
    acceleration: float
    approx_distance: float
    tool_frame: int = 0
    base_frame: int = 0
    force_setpoint: int = 0
    joint_target: bool = False
    continuation: bool = False


def encode_record(rec: MotionRecord) -> bytes:
    """Serialize a record to its 44-byte image."""
    if not 0 <= rec.record_seq <= 0xFFFF:
        raise UnencodableValue(f"record_seq {rec.record_seq} does not fit u16")
    if not 0 <= rec.force_setpoint <= 0xFFFF:
        raise UnencodableValue(f"force_setpoint {rec.force_setpoint} does not fit u16")
    for name, v in (("tool_frame", rec.tool_frame), ("base_frame", rec.base_frame)):
        if not 0 <= v <= 0xFF:
            raise UnencodableValue(f"{name} {v} does not fit u8")
    scalars = (*rec.target, rec.velocity, rec.acceleration, rec.approx_distance)
    for v in scalars:
        # f32 overflow would silently become inf on the wire
        if not math.isfinite(v) or abs(v) > 3.4028235e38:
            raise UnencodableValue(f"scalar {v!r} not representable as f32")
    flags = (_FLAG_JOINT if rec.joint_target else 0) | (
        _FLAG_CONTINUATION if rec.continuation else 0
    )
    return _RECORD_FMT.pack(
        int(rec.motion_type),
        flags,
        rec.record_seq,
        *scalars,
        rec.tool_frame,
        rec.base_frame,
        rec.force_setpoint,
    )


def decode_record(data: bytes) -> MotionRecord:
    """Parse a 44-byte image; rejects malformed content."""
    if len(data) < RECORD_SIZE:
        raise FrameTooShort(f"record image is {len(data)} bytes, need {RECORD_SIZE}")
    if len(data) > RECORD_SIZE:
        raise FrameTooLong(f"record image is {len(data)} bytes, need {RECORD_SIZE}")
    (code, flags, seq, *rest) = _RECORD_FMT.unpack(data)
    scalars = rest[:9]
    tool, base, force = rest[9:]
    try:
        mtype = MotionType(code)
    except ValueError:
        raise UnknownMotionType(f"motion type code {code}") from None
    if flags & ~(_FLAG_JOINT | _FLAG_CONTINUATION):
        raise MalformedRecord(f"reserved flag bits set: 0x{flags:02x}")
    joint = bool(flags & _FLAG_JOINT)
    cont = bool(flags & _FLAG_CONTINUATION)
    if joint != (mtype is MotionType.PTP_JOINT):
        raise MalformedRecord(f"joint flag {joint} inconsistent with {mtype.name}")
    for v in scalars:
        if not math.isfinite(v):
            raise NonFiniteScalar(f"non-finite scalar {v!r}")
    target = tuple(scalars[:6])
    if cont and any(target[3:]):
        raise MalformedContinuation("continuation record carries orientation data")
    return MotionRecord(
        motion_type=mtype,
        record_seq=seq,
        target=target,
        velocity=scalars[6],
        acceleration=scalars[7],
        approx_distance=scalars[8],
        tool_frame=tool,
        base_frame=base,
        force_setpoint=force,
        joint_target=joint,
        continuation=cont,
    )


def explode_motion(cmd: MotionCommand, seq_start: int) -> list[MotionRecord]:
    """Expand one logical motion into its wire records.

    CIRCULAR yields two records: the auxiliary continuation first (position
    only), then the target.  ``seq_start`` is the 1-based global index of the
    first produced record; record_seq wraps modulo 65536.  All float fields
    are quantized to f32 so the in-memory records match their wire images
    exactly.
    """
    if isinstance(cmd.target, JointTarget):
        comps = cmd.target.components()
    else:
        comps = cmd.target.components()
    target = tuple(f32(v) for v in comps)
    vel = f32(cmd.velocity)
    acc = f32(cmd.acceleration)
    approx = f32(cmd.approx_distance)
    records = []
    seq = seq_start
    if cmd.motion_type is MotionType.CIRCULAR:
        ax, ay, az = cmd.aux_point
        records.append(
            MotionRecord(
                motion_type=cmd.motion_type,
                record_seq=seq % 0x10000,
                target=(f32(ax), f32(ay), f32(az), 0.0, 0.0, 0.0),
                velocity=vel,
                acceleration=acc,
                approx_distance=approx,
                tool_frame=cmd.tool_frame,
                base_frame=cmd.base_frame,
                force_setpoint=0,
                continuation=True,
            )
        )
        seq += 1
    records.append(
        MotionRecord(
            motion_type=cmd.motion_type,
            record_seq=seq % 0x10000,
            target=target,
            velocity=vel,
            acceleration=acc,
            approx_distance=approx,
            tool_frame=cmd.tool_frame,
            base_frame=cmd.base_frame,
            force_setpoint=cmd.force_setpoint,
            joint_target=cmd.motion_type is MotionType.PTP_JOINT,
        )
    )
    return records


def explode_plan(motions) -> list[MotionRecord]:
    """Explode a motion sequence with consecutive 1-based record indices."""
    out: list[MotionRecord] = []
    for m in motions:
        out.extend(explode_motion(m, len(out) + 1))
    return out


def reassemble_records(records) -> list[list[MotionRecord]]:
    """Group a record stream back into physical motions.

    The inverse of exploding a plan: a continuation record is joined with
    its immediately following target record; everything else stands alone.
    """
    out: list[list[MotionRecord]] = []
    pending: MotionRecord | None = None
    for rec in records:
        if pending is not None:
            if rec.continuation or rec.motion_type is not pending.motion_type:
                raise MalformedContinuation("continuation without matching target")
            out.append([pending, rec])
            pending = None
        elif rec.continuation:
            pending = rec
        else:
            out.append([rec])
    if pending is not None:
        raise MalformedContinuation("dangling continuation record")
    return out


_ZERO_SLOT = bytes(RECORD_SIZE)


@dataclass(frozen=True)
class CommandFrame:
    """PLC -> robot process image (one 256-byte frame).

    ``slots`` always holds five raw 44-byte images; slots that were never
    written are zero.  ``total_no`` is the total record count of the running
    skill and ``loaded_through`` the highest record index materialized so far.
    """

    command: CommandWord = CommandWord.IDLE
    record_count: int = 0
    total_no: int = 0
    loaded_through: int = 0
    frame_seq: int = 0
    slots: tuple[bytes, ...] = (_ZERO_SLOT,) * SLOT_COUNT

    def __post_init__(self):
        if not isinstance(self.command, CommandWord):
            object.__setattr__(self, "command", CommandWord(self.command))
        if not 0 <= self.record_count <= SLOT_COUNT:
            raise ValueError(f"record_count {self.record_count} out of 0..{SLOT_COUNT}")
        if not 0 <= self.total_no <= 0xFFFFFFFF:
            raise ValueError("totalNo does not fit u32")
        if not 0 <= self.loaded_through <= self.total_no:
            raise ValueError("loadedThrough must be within 0..totalNo")
        if not 0 <= self.frame_seq <= 0xFFFF:
            raise ValueError("frame_seq does not fit u16")
        slots = tuple(bytes(s) for s in self.slots)
        if len(slots) != SLOT_COUNT or any(len(s) != RECORD_SIZE for s in slots):
            raise ValueError(f"slots must be {SLOT_COUNT} images of {RECORD_SIZE} bytes")
        object.__setattr__(self, "slots", slots)


def encode_command_frame(frame: CommandFrame) -> bytes:
    buf = bytearray(FRAME_SIZE)
    _CMD_HEADER_FMT.pack_into(
        buf,
        0,
        int(frame.command),
        frame.record_count,
        frame.total_no,
        frame.loaded_through,
        frame.frame_seq,
    )
    off = HEADER_SIZE
    for slot in frame.slots:
        buf[off : off + RECORD_SIZE] = slot
        off += RECORD_SIZE
    return bytes(buf)


def decode_command_frame(data: bytes) -> CommandFrame:
    if len(data) < FRAME_SIZE:
        raise FrameTooShort(f"command frame is {len(data)} bytes, need {FRAME_SIZE}")
    if len(data) > FRAME_SIZE:
        raise FrameTooLong(f"command frame is {len(data)} bytes, need {FRAME_SIZE}")
    cmd, count, total, loaded, seq = _CMD_HEADER_FMT.unpack_from(data, 0)
    try:
        word = CommandWord(cmd)
    except ValueError:
        raise BadCommandWord(f"command word {cmd}") from None
    if count > SLOT_COUNT:
        raise RecordCountOutOfRange(f"record_count {count}")
    if loaded > total:
        raise DecodeError(f"loadedThrough {loaded} exceeds totalNo {total}")
    slots = tuple(
        bytes(data[HEADER_SIZE + i * RECORD_SIZE : HEADER_SIZE + (i + 1) * RECORD_SIZE])
        for i in range(SLOT_COUNT)
    )
    return CommandFrame(
        command=word,
        record_count=count,
        total_no=total,
        loaded_through=loaded,
        frame_seq=seq,
        slots=slots,
    )


@dataclass(frozen=True)
class FeedbackFrame:
    """Robot -> PLC process image (one 256-byte frame, 36 bytes used)."""

    state: RobotState = RobotState.IDLE
    error_code: int = 0
    cur_exec: int = 0
    acked_seq: int = 0
    pose: tuple[float, float, float, float, float, float] = (0.0,) * 6

    def __post_init__(self):
        if not isinstance(self.state, RobotState):
            object.__setattr__(self, "state", RobotState(self.state))
        if not 0 <= self.error_code <= 0xFF:
            raise ValueError("error_code does not fit u8")
        if not 0 <= self.cur_exec <= 0xFFFFFFFF:
            raise ValueError("curExec does not fit u32")
        if not 0 <= self.acked_seq <= 0xFFFF:
            raise ValueError("acked_seq does not fit u16")
        pose = tuple(float(v) for v in self.pose)
        if len(pose) != 6:
            raise ValueError("pose needs six components")
        object.__setattr__(self, "pose", pose)


def encode_feedback_frame(frame: FeedbackFrame) -> bytes:
    for v in frame.pose:
        if not math.isfinite(v) or abs(v) > 3.4028235e38:
            raise UnencodableValue(f"pose component {v!r} not representable as f32")
    buf = bytearray(FRAME_SIZE)
    _FEEDBACK_FMT.pack_into(
        buf,
        0,
        int(frame.state),
        frame.error_code,
        frame.cur_exec,
        frame.acked_seq,
        *frame.pose,
    )
    # bytes 32..35 reserved zero, rest padding
    return bytes(buf)


def decode_feedback_frame(data: bytes) -> FeedbackFrame:
    if len(data) < FRAME_SIZE:
        raise FrameTooShort(f"feedback frame is {len(data)} bytes, need {FRAME_SIZE}")
    if len(data) > FRAME_SIZE:
        raise FrameTooLong(f"feedback frame is {len(data)} bytes, need {FRAME_SIZE}")
    state, err, cur, ack, *pose = _FEEDBACK_FMT.unpack_from(data, 0)
    try:
        st = RobotState(state)
    except ValueError:
        raise BadStateCode(f"state code {state}") from None
    for v in pose:
        if not math.isfinite(v):
            raise NonFiniteScalar(f"non-finite pose component {v!r}")
    return FeedbackFrame(
        state=st, error_code=err, cur_exec=cur, acked_seq=ack, pose=tuple(pose)
    )


IDLE_COMMAND_BYTES = encode_command_frame(CommandFrame())
IDLE_FEEDBACK_BYTES = encode_feedback_frame(FeedbackFrame())
