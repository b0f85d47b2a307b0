"""OT-based CRRT: Protocol 1 (strong and weak), CRRT-IQ and PRRT-BD.

Strong flow, one round trip:
  step 1  I -> R  chooser message (A, B, C) for a uniform sigma
  step 2  R -> I  OT pairs (w_i, y_i), extra commitments, argument bundle
The y_i are Pedersen commitments, so the arguments speak about exactly the
values the interviewer can open at sigma.

Weak flow (W-OT-weak):
  step 1  R -> I  commitments y_1..y_{n+1} and arguments
  step 2  I -> R  sigma in the clear
  step 3  R -> I  opening (mu_sigma, rho_sigma)
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .. import sigma as ak
from ..codec import DecodeError, Reader, Writer
from ..group import GroupParams
from ..ot import OtChooserMessage, OtError, OtSenderMessage, chooser_init, chooser_recover, sender_respond
from ..pedersen import Commitment, Opening, combine, combine_openings, commit_random, verify_opening
from .config import ConfigError, PollConfig
from .wire import Halt, ProtocolMessage, context, expect


def fixed_weight_bits(n: int, weight: int, rng) -> list[int]:
    """n bits with exactly ``weight`` ones, uniformly placed (Fisher-Yates)."""
    bits = [1] * weight + [0] * (n - weight)
    rng.shuffle(bits)
    return bits


def lin_coefficients(config: PollConfig) -> tuple[int, int]:
    """(a, b) for AK-Lin(y_1..y_{N+1}; a; b)."""
    if config.variant == "IQ":
        return 2 * config.l, config.n + config.l
    return 2 * config.l - config.n, config.l


@dataclass(frozen=True)
class Prepared:
    bits: tuple[int, ...]
    openings: tuple[Opening, ...]
    commitments: tuple[Commitment, ...]


def _prepare_bits(params: GroupParams, bits: Sequence[int], rng) -> Prepared:
    pairs = [commit_random(params, b, rng) for b in bits]
    return Prepared(tuple(bits), tuple(o for _, o in pairs), tuple(c for c, _ in pairs))


def p1_respondent_prepare(params: GroupParams, config: PollConfig, t: int, rng) -> Prepared:
    """mu_1..mu_n with weight l (t=1) or n-l (t=0), then mu_{n+1} = 1 - t."""
    if config.variant not in ("W-OT", "W-OT-weak"):
        raise ConfigError("Protocol 1 needs variant W-OT or W-OT-weak")
    weight = config.l if t == 1 else config.n - config.l
    return _prepare_bits(params, fixed_weight_bits(config.n, weight, rng) + [1 - t], rng)


def iq_respondent_prepare(params: GroupParams, config: PollConfig, t: int, rng) -> Prepared:
    """2n bits of weight n+l (t=1) or n-l (t=0), then the checksum bit 1 - t."""
    if config.variant != "IQ":
        raise ConfigError("CRRT-IQ needs variant IQ")
    weight = config.n + config.l if t == 1 else config.n - config.l
    return _prepare_bits(params, fixed_weight_bits(2 * config.n, weight, rng) + [1 - t], rng)


def bd_types(config: PollConfig, t: int, rng) -> list[int]:
    """n types in [1, m]: t appears l_t + l times, every other j appears l_j times."""
    if not 1 <= t <= config.m:
        raise ConfigError(f"type {t} outside [1, {config.m}]")
    types = []
    for j, lj in enumerate(config.ls, start=1):
        types += [j] * (lj + (config.l if j == t else 0))
    rng.shuffle(types)
    return types


def bd_sum_set(params: GroupParams, config: PollConfig) -> tuple[int, ...]:
    """Allowed values of sum_i D^{mu_i}: sum_j l_j D^j + l D^j' for j' in [1, m]."""
    vals = config.bd_values(params)
    base = sum(lj * v for lj, v in zip(config.ls, vals))
    out = tuple((base + config.l * v) % params.q for v in vals)
    if len(set(out)) != len(out):
        raise ConfigError("BD sum values collide modulo q for this group")
    return out


# Argument bundles -----------------------------------------------------------

def w_arguments(params, config, commitments, openings, ctx, rng) -> list[ak.ArgumentTranscript]:
    a, b = lin_coefficients(config)
    return [ak.prove_boolean(params, commitments, openings, ctx, rng),
            ak.prove_lin(params, commitments, openings, a, b, ctx, rng)]


def verify_w_arguments(params, config, commitments, args, ctx) -> bool:
    if len(args) != 2 or len(commitments) != config.positions + 1:
        return False
    a, b = lin_coefficients(config)
    return (ak.verify_boolean(params, commitments, args[0], ctx)
            and ak.verify_lin(params, commitments, a, b, args[1], ctx))


def bd_arguments(params, config, commitments, openings, ctx, rng) -> list[ak.ArgumentTranscript]:
    vals = config.bd_values(params)
    args = [ak.prove_value_in_set(params, c, o, vals, ctx, rng) for c, o in zip(commitments, openings)]
    ones = [1] * len(commitments)
    total = combine(params, commitments, ones)
    args.append(ak.prove_value_in_set(params, total, combine_openings(params, openings, ones),
                                      bd_sum_set(params, config), ctx, rng))
    return args


def verify_bd_arguments(params, config, commitments, args, ctx) -> bool:
    if len(commitments) != config.n or len(args) != config.n + 1:
        return False
    vals = config.bd_values(params)
    if not all(ak.verify_value_in_set(params, c, vals, a, ctx) for c, a in zip(commitments, args)):
        return False
    total = combine(params, commitments, [1] * len(commitments))
    return ak.verify_value_in_set(params, total, bd_sum_set(params, config), args[-1], ctx)


def message_space(params: GroupParams, config: PollConfig) -> tuple[int, ...]:
    return config.bd_values(params) if config.variant == "BD" else (0, 1)


# Strong (OT) flow -------------------------------------------------------------

def encode_ot_reply(params, sender: OtSenderMessage, extras: Sequence[Commitment], args) -> bytes:
    w = Writer(params)
    out = sender.to_bytes(params) + w.elements(c.element for c in extras).u16(len(args)).getvalue()
    return out + b"".join(a.to_bytes(params) for a in args)


def decode_ot_reply(params, payload: bytes):
    r = Reader(payload, params)
    sender = OtSenderMessage.read(r)
    extras = [Commitment(e) for e in r.elements()]
    args = [ak.ArgumentTranscript.read(r) for _ in range(r.u16())]
    r.done()
    return sender, extras, args


def verify_ot_reply(params, config: PollConfig, session_id: str, sender: OtSenderMessage,
                    extras: Sequence[Commitment], args) -> bool:
    """The interviewer's public checks on step 2 (also used for offline replay)."""
    if len(sender.pairs) != config.positions:
        return False
    ctx = context(session_id, config.protocol_id, 2)
    ys = sender.commitments
    if config.variant == "BD":
        return not extras and verify_bd_arguments(params, config, ys, args, ctx)
    return len(extras) == 1 and verify_w_arguments(params, config, ys + list(extras), args, ctx)


class OtRespondent:
    """Honest respondent for W-OT, IQ and BD."""

    def __init__(self, params: GroupParams, config: PollConfig, t: int, rng, session_id: str):
        if config.variant not in ("W-OT", "IQ", "BD"):
            raise ConfigError(f"{config.variant} is not an OT-based strong variant")
        self.params, self.config, self.t, self.rng, self.session_id = params, config, t, rng, session_id
        self.prepare()

    def prepare(self) -> None:
        if self.config.variant == "BD":
            self.types = bd_types(self.config, self.t, self.rng)
            vals = self.config.bd_values(self.params)
            self.values = [vals[j - 1] for j in self.types]
            self.extra = []
        else:
            prep = (iq_respondent_prepare if self.config.variant == "IQ" else p1_respondent_prepare)(
                self.params, self.config, self.t, self.rng)
            self.values = list(prep.bits[:-1])
            self.extra = [(prep.commitments[-1], prep.openings[-1])]

    def arguments(self, commitments, openings, ctx):
        if self.config.variant == "BD":
            return bd_arguments(self.params, self.config, commitments, openings, ctx, self.rng)
        return w_arguments(self.params, self.config, commitments, openings, ctx, self.rng)

    def on_chooser_message(self, chooser: OtChooserMessage) -> None:
        """Decision point before answering; the honest respondent always continues."""

    def start(self):
        return None

    def receive(self, msg: ProtocolMessage) -> ProtocolMessage:
        pid = self.config.protocol_id
        expect(msg, pid, 1)
        try:
            r = Reader(msg.payload, self.params)
            chooser, n = OtChooserMessage.read(r)
            r.done()
        except DecodeError as exc:
            raise Halt(1, f"malformed chooser message: {exc}") from exc
        if n != self.config.positions:
            raise Halt(1, f"chooser asked for {n} positions")
        self.on_chooser_message(chooser)
        try:
            sender, wit = sender_respond(self.params, chooser, self.values, self.rng)
        except OtError as exc:
            raise Halt(1, str(exc)) from exc
        ctx = context(self.session_id, pid, 2)
        commitments = sender.commitments + [c for c, _ in self.extra]
        openings = list(wit.openings) + [o for _, o in self.extra]
        args = self.arguments(commitments, openings, ctx)
        payload = encode_ot_reply(self.params, sender, [c for c, _ in self.extra], args)
        return ProtocolMessage(pid, 2, payload)


class OtInterviewer:
    def __init__(self, params: GroupParams, config: PollConfig, rng, session_id: str):
        self.params, self.config, self.rng, self.session_id = params, config, rng, session_id
        self.sigma = 1 + rng.randrange(config.positions)
        self.result: int | None = None

    def start(self) -> ProtocolMessage:
        self.state, chooser = chooser_init(self.params, self.config.positions, self.sigma, self.rng)
        return ProtocolMessage(self.config.protocol_id, 1, chooser.to_bytes(self.params, self.config.positions))

    def receive(self, msg: ProtocolMessage):
        expect(msg, self.config.protocol_id, 2)
        try:
            sender, extras, args = decode_ot_reply(self.params, msg.payload)
        except DecodeError as exc:
            raise Halt(2, f"malformed reply: {exc}") from exc
        if not verify_ot_reply(self.params, self.config, self.session_id, sender, extras, args):
            raise Halt(2, "argument verification failed")
        space = message_space(self.params, self.config)
        try:
            value = chooser_recover(self.params, self.state, sender, space)
        except OtError as exc:
            raise Halt(2, f"recovery failed: {exc}") from exc
        self.result = space.index(value) + 1 if self.config.variant == "BD" else value
        return None


# Weak (commit-first) flow ---------------------------------------------------------

def encode_commit_message(params, commitments, args) -> bytes:
    w = Writer(params).elements(c.element for c in commitments).u16(len(args))
    return w.getvalue() + b"".join(a.to_bytes(params) for a in args)


def decode_commit_message(params, payload: bytes):
    r = Reader(payload, params)
    commitments = [Commitment(e) for e in r.elements()]
    args = [ak.ArgumentTranscript.read(r) for _ in range(r.u16())]
    r.done()
    return commitments, args


def decode_opening(params, payload: bytes) -> Opening:
    r = Reader(payload, params)
    out = Opening(r.scalar(), r.scalar())
    r.done()
    return out


def decode_sigma(payload: bytes) -> int:
    r = Reader(payload)
    sigma = r.u16()
    r.done()
    return sigma


class WeakRespondent:
    def __init__(self, params: GroupParams, config: PollConfig, t: int, rng, session_id: str):
        if config.variant != "W-OT-weak":
            raise ConfigError("WeakRespondent needs variant W-OT-weak")
        self.params, self.config, self.t, self.rng, self.session_id = params, config, t, rng, session_id
        self.prep = p1_respondent_prepare(params, config, t, rng)

    def arguments(self, ctx):
        return w_arguments(self.params, self.config, self.prep.commitments, self.prep.openings, ctx, self.rng)

    def on_sigma(self, sigma: int) -> None:
        """Decision point after sigma is revealed; the honest respondent always continues."""

    def start(self) -> ProtocolMessage:
        pid = self.config.protocol_id
        args = self.arguments(context(self.session_id, pid, 1))
        return ProtocolMessage(pid, 1, encode_commit_message(self.params, self.prep.commitments, args))

    def receive(self, msg: ProtocolMessage) -> ProtocolMessage:
        pid = self.config.protocol_id
        expect(msg, pid, 2)
        try:
            sigma = decode_sigma(msg.payload)
        except DecodeError as exc:
            raise Halt(2, f"malformed choice: {exc}") from exc
        if not 1 <= sigma <= self.config.n:
            raise Halt(2, f"choice {sigma} out of range")
        self.on_sigma(sigma)
        o = self.prep.openings[sigma - 1]
        return ProtocolMessage(pid, 3, Writer(self.params).scalar(o.value).scalar(o.randomness).getvalue())


def verify_commit_message(params, config, session_id, commitments, args) -> bool:
    ctx = context(session_id, config.protocol_id, 1)
    return verify_w_arguments(params, config, commitments, args, ctx)


class WeakInterviewer:
    def __init__(self, params: GroupParams, config: PollConfig, rng, session_id: str):
        self.params, self.config, self.rng, self.session_id = params, config, rng, session_id
        self.sigma = 1 + rng.randrange(config.n)
        self.result: int | None = None

    def start(self):
        return None

    def receive(self, msg: ProtocolMessage):
        pid = self.config.protocol_id
        if msg.step == 1:
            expect(msg, pid, 1)
            try:
                self.commitments, args = decode_commit_message(self.params, msg.payload)
            except DecodeError as exc:
                raise Halt(1, f"malformed commitments: {exc}") from exc
            if not verify_commit_message(self.params, self.config, self.session_id, self.commitments, args):
                raise Halt(1, "argument verification failed")
            return ProtocolMessage(pid, 2, Writer().u16(self.sigma).getvalue())
        expect(msg, pid, 3)
        try:
            opening = decode_opening(self.params, msg.payload)
        except DecodeError as exc:
            raise Halt(3, f"malformed opening: {exc}") from exc
        if opening.value not in (0, 1) or not verify_opening(self.params, self.commitments[self.sigma - 1], opening):
            raise Halt(3, "opening does not match commitment")
        self.result = opening.value
        return None
