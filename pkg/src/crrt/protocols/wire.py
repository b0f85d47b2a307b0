"""Message framing, session transcripts and the in-process session driver."""

from __future__ import annotations

import json
from dataclasses import dataclass

from ..codec import DecodeError
from ..group import GroupParams
from .config import PollConfig


class Halt(Exception):
    """Raised by a role that stops the session at ``step``."""

    def __init__(self, step: int, reason: str):
        super().__init__(f"halt at step {step}: {reason}")
        self.step = step
        self.reason = reason


@dataclass(frozen=True)
class ProtocolMessage:
    """Frame: 4-byte big-endian length of the rest, protocol id, step id, payload."""

    protocol_id: int
    step: int
    payload: bytes

    def frame(self) -> bytes:
        body = bytes((self.protocol_id, self.step)) + self.payload
        return len(body).to_bytes(4, "big") + body

    @classmethod
    def parse(cls, data: bytes) -> "ProtocolMessage":
        if len(data) < 6:
            raise DecodeError("frame too short")
        length = int.from_bytes(data[:4], "big")
        if length != len(data) - 4:
            raise DecodeError("frame length mismatch")
        return cls(data[4], data[5], bytes(data[6:]))


def context(session_id: str, protocol_id: int, step: int) -> bytes:
    """Binds an argument to one session, protocol and message index."""
    sid = session_id.encode()
    return b"crrt/ctx|" + len(sid).to_bytes(2, "big") + sid + bytes((protocol_id, step))


def expect(msg: ProtocolMessage, protocol_id: int, step: int) -> None:
    if msg.protocol_id != protocol_id or msg.step != step:
        raise Halt(step, f"unexpected message (protocol {msg.protocol_id}, step {msg.step})")


class SessionTranscript:
    """Append-only record of one interview; the outcome is set exactly once."""

    def __init__(self, session_id: str, config: PollConfig, params: GroupParams):
        self.session_id = session_id
        self.config = config
        self.params = params
        self.messages: list[tuple[str, bytes]] = []
        self.outcome: dict | None = None

    def record(self, direction: str, frame: bytes) -> None:
        if self.outcome is not None:
            raise RuntimeError("transcript is closed")
        self.messages.append((direction, bytes(frame)))

    def _close(self, outcome: dict) -> None:
        if self.outcome is not None:
            raise RuntimeError("outcome already set")
        self.outcome = outcome

    def complete(self, r: int) -> None:
        self._close({"status": "completed", "r": int(r)})

    def halt(self, step: int, by: str, reason: str) -> None:
        self._close({"status": "halted", "step": step, "by": by, "reason": reason})

    @property
    def completed(self) -> bool:
        return self.outcome is not None and self.outcome["status"] == "completed"

    @property
    def result(self) -> int | None:
        return self.outcome["r"] if self.completed else None

    def frames(self, direction: str | None = None) -> list[ProtocolMessage]:
        return [ProtocolMessage.parse(f) for d, f in self.messages if direction in (None, d)]

    def message(self, step: int) -> ProtocolMessage | None:
        for _, f in self.messages:
            msg = ProtocolMessage.parse(f)
            if msg.step == step:
                return msg
        return None

    def size(self) -> int:
        return sum(len(f) for _, f in self.messages)

    def to_jsonl(self) -> str:
        lines = [{"kind": "session", "session": self.session_id, "variant": self.config.variant,
                  "config": self.config.to_json(), "params": self.params.to_json()}]
        lines += [{"kind": "msg", "dir": d, "frame": f.hex()} for d, f in self.messages]
        if self.outcome is not None:
            lines.append({"kind": "outcome", **self.outcome})
        return "".join(json.dumps(x, sort_keys=True, separators=(",", ":")) + "\n" for x in lines)

    @classmethod
    def from_lines(cls, lines: list[str]) -> "SessionTranscript":
        objs = [json.loads(x) for x in lines if x.strip()]
        if not objs or objs[0].get("kind") != "session":
            raise DecodeError("transcript must start with a session line")
        head = objs[0]
        tr = cls(head["session"], PollConfig.from_json(head["config"]), GroupParams.from_json(head["params"]))
        for obj in objs[1:]:
            if obj["kind"] == "msg":
                tr.record(obj["dir"], bytes.fromhex(obj["frame"]))
            elif obj["kind"] == "outcome":
                tr._close({k: v for k, v in obj.items() if k != "kind"})
            else:
                raise DecodeError(f"unknown transcript line kind {obj['kind']!r}")
        return tr

    @classmethod
    def from_jsonl(cls, text: str) -> "SessionTranscript":
        return cls.from_lines(text.splitlines())


def read_transcripts(text: str) -> list[SessionTranscript]:
    """Split a multi-session JSONL stream at its session header lines."""
    groups: list[list[str]] = []
    for line in text.splitlines():
        if not line.strip():
            continue
        if json.loads(line).get("kind") == "session":
            groups.append([])
        if not groups:
            raise DecodeError("stream does not start with a session line")
        groups[-1].append(line)
    return [SessionTranscript.from_lines(g) for g in groups]


def run_session(transcript: SessionTranscript, interviewer, respondent, first: str = "I") -> SessionTranscript:
    """Pass byte frames between two roles until one halts or the interviewer finishes.

    Roles expose ``start() -> ProtocolMessage | None`` and
    ``receive(ProtocolMessage) -> ProtocolMessage | None`` and may raise ``Halt``.
    """
    parties = {"I": interviewer, "R": respondent}
    sender = first
    try:
        msg = parties[sender].start()
    except Halt as h:
        transcript.halt(h.step, sender, h.reason)
        return transcript
    while msg is not None:
        receiver = "R" if sender == "I" else "I"
        frame = msg.frame()
        transcript.record(f"{sender}->{receiver}", frame)
        try:
            try:
                parsed = ProtocolMessage.parse(frame)
            except DecodeError as exc:
                raise Halt(msg.step, f"malformed frame: {exc}") from exc
            reply = parties[receiver].receive(parsed)
        except Halt as h:
            transcript.halt(h.step, receiver, h.reason)
            return transcript
        msg, sender = reply, receiver
    if getattr(interviewer, "result", None) is None:
        transcript.halt(0, "I", "session ended without an interviewer output")
    else:
        transcript.complete(interviewer.result)
    return transcript
