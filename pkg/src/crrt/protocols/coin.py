"""Coin-flipping CRRT-W (Protocol 2), strong and weak.

  step 1  R -> I  [verify key], Com(t), Com(mu), Boolean(t), range(mu, n)
  step 2  I -> R  nu, and in the strong variant y = Com(sigma) with sigma in [0, d-1]
  step 3  R -> I  [signature on y], mu'_0..mu'_{d-1}, one equivalence bundle per i

With z_i = (mu + nu + i*l) mod n, the respondent must answer mu'_i = t exactly
when z_i < l. Each bundle shows this without revealing t, mu or z_i:

  mu + nu + i*l = z_i + n*e_i           relation on Com(mu), Com(z_i), Com(e_i)
  e_i in {f, f+1}, f = (nu + i*l) // n  two-way OR
  z_i in [0, n-1]                       range
  b_i Boolean
  z_i + n*b_i - l in [0, n-1]           range; forces b_i = [z_i < l]
  t + b_i + mu'_i in {1, 3}             odd parity; forces mu'_i = t iff b_i = 1
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .. import sigma as ak
from ..codec import DecodeError, Reader, Writer
from ..group import GroupParams
from ..pedersen import Commitment, Opening, combine, commit_random, shift, verify_opening
from .config import ConfigError, PollConfig
from .wire import Halt, ProtocolMessage, SessionTranscript, context, expect

BUNDLE_ARGS = 6


def z_value(config: PollConfig, mu: int, nu: int, i: int) -> int:
    return (mu + nu + i * config.l) % config.n


def answer_bits(config: PollConfig, t: int, mu: int, nu: int) -> list[int]:
    """mu'_i = t if z_i < l else 1 - t, for i in [0, d-1]."""
    return [t if z_value(config, mu, nu, i) < config.l else 1 - t for i in range(config.d)]


def quotient_candidates(config: PollConfig, nu: int, i: int) -> tuple[int, int]:
    f = (nu + i * config.l) // config.n
    return f, f + 1


def bundle_context(ctx: bytes, i: int) -> bytes:
    return ctx + b"|i" + i.to_bytes(2, "big")


def sign_message(session_id: str, config: PollConfig, params: GroupParams, y: Commitment) -> bytes:
    return context(session_id, config.protocol_id, 3) + b"|y" + params.encode_element(y.element)


# Per-index equivalence bundle ------------------------------------------------------

@dataclass(frozen=True)
class Bundle:
    cz: Commitment
    ce: Commitment
    cb: Commitment
    args: tuple[ak.ArgumentTranscript, ...]

    def write(self, w: Writer) -> None:
        w.element(self.cz.element).element(self.ce.element).element(self.cb.element)

    @classmethod
    def read(cls, r: Reader) -> "Bundle":
        cz, ce, cb = (Commitment(r.element()) for _ in range(3))
        return cls(cz, ce, cb, tuple(ak.ArgumentTranscript.read(r) for _ in range(BUNDLE_ARGS)))

    def to_bytes(self, params: GroupParams) -> bytes:
        w = Writer(params)
        self.write(w)
        return w.getvalue() + b"".join(a.to_bytes(params) for a in self.args)


def affine_commitment(params, config: PollConfig, cz: Commitment, cb: Commitment) -> Commitment:
    """Com(z + n*b - l)."""
    return shift(params, combine(params, [cz, cb], [1, config.n]), -config.l)


def parity_commitment(params, ct: Commitment, cb: Commitment, mu_prime: int) -> Commitment:
    """Com(t + b + mu')."""
    return shift(params, combine(params, [ct, cb], [1, 1]), mu_prime)


def relation_coeffs(config: PollConfig, nu: int, i: int) -> tuple[list[int], int]:
    """Coefficients on (Com(mu), Com(z), Com(e)) and the constant."""
    return [1, -1, -config.n], -(nu + i * config.l)


def bundle_statements(params, config: PollConfig, ct, cmu, nu: int, i: int, mu_prime: int,
                      cz, ce, cb) -> list[ak.Statement]:
    """Public statements for all but the z range argument (range statements need the bit commitments)."""
    coeffs, const = relation_coeffs(config, nu, i)
    return [ak.relation_statement(params, [cmu, cz, ce], coeffs, const),
            ak.set_statement(params, ce, quotient_candidates(config, nu, i)),
            ak.boolean_statement(params, [cb]),
            ak.set_statement(params, parity_commitment(params, ct, cb, mu_prime), (1, 3))]


def prove_bundle(params, config: PollConfig, ct: Commitment, ot: Opening, cmu: Commitment, omu: Opening,
                 nu: int, i: int, mu_prime: int, ctx: bytes, rng) -> Bundle:
    """Honest equivalence bundle; raises ProofError if mu_prime is not the correct answer."""
    n, q = config.n, params.q
    total = omu.value + nu + i * config.l
    z, e = total % n, total // n
    b = 1 if z < config.l else 0
    cz, oz = commit_random(params, z, rng)
    ce, oe = commit_random(params, e, rng)
    cb, ob = commit_random(params, b, rng)
    c = bundle_context(ctx, i)
    coeffs, const = relation_coeffs(config, nu, i)
    aff_open = Opening(z + n * b - config.l, (oz.randomness + n * ob.randomness) % q)
    par_open = Opening(ot.value + b + mu_prime, (ot.randomness + ob.randomness) % q)
    args = (
        ak.prove_relation(params, [cmu, cz, ce], [omu, oz, oe], coeffs, const, c, rng),
        ak.prove_value_in_set(params, ce, oe, quotient_candidates(config, nu, i), c, rng),
        ak.prove_range(params, cz, oz, n, c, rng),
        ak.prove_boolean(params, [cb], [ob], c, rng),
        ak.prove_range(params, affine_commitment(params, config, cz, cb), aff_open, n, c, rng),
        ak.prove_value_in_set(params, parity_commitment(params, ct, cb, mu_prime), par_open, (1, 3), c, rng),
    )
    return Bundle(cz, ce, cb, args)


def p2_respondent_equivalence_args(params, config, ct, ot, cmu, omu, nu, i, mu_prime, ctx, rng) -> Bundle:
    return prove_bundle(params, config, ct, ot, cmu, omu, nu, i, mu_prime, ctx, rng)


def verify_bundle(params, config: PollConfig, ct: Commitment, cmu: Commitment, nu: int, i: int,
                  mu_prime: int, bundle: Bundle, ctx: bytes) -> bool:
    if len(bundle.args) != BUNDLE_ARGS:
        return False
    c = bundle_context(ctx, i)
    rel, eset, zrange, boolean, aff, par = bundle.args
    coeffs, const = relation_coeffs(config, nu, i)
    return (ak.verify_relation(params, [cmu, bundle.cz, bundle.ce], coeffs, const, rel, c)
            and ak.verify_value_in_set(params, bundle.ce, quotient_candidates(config, nu, i), eset, c)
            and ak.verify_range(params, bundle.cz, config.n, zrange, c)
            and ak.verify_boolean(params, [bundle.cb], boolean, c)
            and ak.verify_range(params, affine_commitment(params, config, bundle.cz, bundle.cb), config.n, aff, c)
            and ak.verify_value_in_set(params, parity_commitment(params, ct, bundle.cb, mu_prime), (1, 3), par, c))


# Message codecs -------------------------------------------------------------------

@dataclass(frozen=True)
class CommitStep:
    key: ak.VerifyKey | None
    ct: Commitment
    cmu: Commitment
    boolean: ak.ArgumentTranscript
    mu_range: ak.ArgumentTranscript

    def to_bytes(self, params) -> bytes:
        w = Writer(params)
        if self.key is not None:
            w.element(self.key.element)
        w.element(self.ct.element).element(self.cmu.element)
        return w.getvalue() + self.boolean.to_bytes(params) + self.mu_range.to_bytes(params)

    @classmethod
    def from_bytes(cls, params, config: PollConfig, data: bytes) -> "CommitStep":
        r = Reader(data, params)
        key = None if config.weak else ak.VerifyKey(r.element())
        out = cls(key, Commitment(r.element()), Commitment(r.element()),
                  ak.ArgumentTranscript.read(r), ak.ArgumentTranscript.read(r))
        r.done()
        return out


@dataclass(frozen=True)
class CoinStep:
    nu: int
    y: Commitment | None
    y_arg: ak.ArgumentTranscript | None

    def to_bytes(self, params) -> bytes:
        w = Writer(params).u16(self.nu)
        if self.y is None:
            return w.getvalue()
        return w.element(self.y.element).getvalue() + self.y_arg.to_bytes(params)

    @classmethod
    def from_bytes(cls, params, config: PollConfig, data: bytes) -> "CoinStep":
        r = Reader(data, params)
        nu = r.u16()
        if config.weak:
            out = cls(nu, None, None)
        else:
            out = cls(nu, Commitment(r.element()), ak.ArgumentTranscript.read(r))
        r.done()
        return out


@dataclass(frozen=True)
class AnswerStep:
    signature: ak.Signature | None
    mu_prime: tuple[int, ...]
    bundles: tuple[Bundle, ...]

    def to_bytes(self, params) -> bytes:
        w = Writer(params)
        if self.signature is not None:
            w.scalar(self.signature.challenge).scalar(self.signature.response)
        w.u16(len(self.mu_prime))
        for bit in self.mu_prime:
            w.u8(bit)
        return w.getvalue() + b"".join(b.to_bytes(params) for b in self.bundles)

    @classmethod
    def from_bytes(cls, params, config: PollConfig, data: bytes) -> "AnswerStep":
        r = Reader(data, params)
        sig = None if config.weak else ak.Signature(r.scalar(), r.scalar())
        k = r.u16()
        if k != config.d:
            raise DecodeError(f"expected {config.d} answers, got {k}")
        bits = tuple(r.u8() for _ in range(k))
        bundles = tuple(Bundle.read(r) for _ in range(k))
        r.done()
        return cls(sig, bits, bundles)


def _decode(fn, step: int, what: str):
    try:
        return fn()
    except (DecodeError, ValueError) as exc:
        raise Halt(step, f"malformed {what}: {exc}") from exc


# Public checks, shared by the interviewer and offline replay -----------------------------

def verify_commit_step(params, config: PollConfig, session_id: str, msg: CommitStep) -> bool:
    ctx = context(session_id, config.protocol_id, 1)
    if (msg.key is None) != config.weak:
        return False
    if msg.key is not None and not params.is_element(msg.key.element):
        return False
    return (ak.verify_boolean(params, [msg.ct], msg.boolean, ctx)
            and ak.verify_range(params, msg.cmu, config.n, msg.mu_range, ctx))


def verify_coin_step(params, config: PollConfig, session_id: str, msg: CoinStep) -> bool:
    if not 0 <= msg.nu < config.n:
        return False
    if config.weak:
        return msg.y is None
    ctx = context(session_id, config.protocol_id, 2)
    return ak.verify_value_in_set(params, msg.y, range(config.d), msg.y_arg, ctx)


def verify_answer_step(params, config: PollConfig, session_id: str, first: CommitStep,
                       coin: CoinStep, msg: AnswerStep) -> bool:
    if len(msg.mu_prime) != config.d or any(b not in (0, 1) for b in msg.mu_prime):
        return False
    if not config.weak:
        if msg.signature is None:
            return False
        if not ak.verify_sig(params, first.key, sign_message(session_id, config, params, coin.y), msg.signature):
            return False
    ctx = context(session_id, config.protocol_id, 3)
    return all(verify_bundle(params, config, first.ct, first.cmu, coin.nu, i, bit, bundle, ctx)
               for i, (bit, bundle) in enumerate(zip(msg.mu_prime, msg.bundles)))


# Roles -------------------------------------------------------------------------------

class CoinRespondent:
    def __init__(self, params: GroupParams, config: PollConfig, t: int, rng, session_id: str,
                 key: ak.SigningKey | None = None):
        if not config.variant.startswith("W-coin"):
            raise ConfigError("CoinRespondent needs variant W-coin or W-coin-weak")
        config.check_group(params)
        self.params, self.config, self.t, self.rng, self.session_id = params, config, t, rng, session_id
        self.key = None if config.weak else (key or ak.keygen(params, rng))
        self.mu = rng.randrange(config.n)

    def start(self) -> ProtocolMessage:
        params, config = self.params, self.config
        ctx = context(self.session_id, config.protocol_id, 1)
        self.ct, self.ot = commit_random(params, self.t, self.rng)
        self.cmu, self.omu = commit_random(params, self.mu, self.rng)
        msg = CommitStep(None if self.key is None else self.key.public, self.ct, self.cmu,
                         ak.prove_boolean(params, [self.ct], [self.ot], ctx, self.rng),
                         ak.prove_range(params, self.cmu, self.omu, config.n, ctx, self.rng))
        return ProtocolMessage(config.protocol_id, 1, msg.to_bytes(params))

    def answers(self, nu: int) -> list[int]:
        return answer_bits(self.config, self.t, self.mu, nu)

    def bundles(self, nu: int, answers: Sequence[int], ctx: bytes) -> list[Bundle]:
        return [prove_bundle(self.params, self.config, self.ct, self.ot, self.cmu, self.omu,
                             nu, i, bit, ctx, self.rng) for i, bit in enumerate(answers)]

    def on_coin(self, coin: CoinStep, answers: Sequence[int]) -> None:
        """Decision point once the answers are fixed; the honest respondent always continues."""

    def receive(self, msg: ProtocolMessage) -> ProtocolMessage:
        params, config = self.params, self.config
        expect(msg, config.protocol_id, 2)
        coin = _decode(lambda: CoinStep.from_bytes(params, config, msg.payload), 2, "coin message")
        if not verify_coin_step(params, config, self.session_id, coin):
            raise Halt(2, "interviewer argument verification failed")
        answers = self.answers(coin.nu)
        self.on_coin(coin, answers)
        sig = None
        if self.key is not None:
            sig = ak.sign(params, self.key, sign_message(self.session_id, config, params, coin.y))
        ctx = context(self.session_id, config.protocol_id, 3)
        out = AnswerStep(sig, tuple(answers), tuple(self.bundles(coin.nu, answers, ctx)))
        return ProtocolMessage(config.protocol_id, 3, out.to_bytes(params))


@dataclass(frozen=True)
class AuditRecord:
    session_id: str
    key: ak.VerifyKey
    y: Commitment
    sigma: int
    rho: int
    signature: ak.Signature
    mu_prime: tuple[int, ...]
    r: int

    def to_json(self) -> dict:
        return {"session": self.session_id, "key": hex(self.key.element), "y": hex(self.y.element),
                "sigma": self.sigma, "rho": hex(self.rho),
                "signature": [hex(self.signature.challenge), hex(self.signature.response)],
                "mu_prime": list(self.mu_prime), "r": self.r}

    @classmethod
    def from_json(cls, obj: dict) -> "AuditRecord":
        c, s = (int(x, 16) for x in obj["signature"])
        return cls(obj["session"], ak.VerifyKey(int(obj["key"], 16)), Commitment(int(obj["y"], 16)),
                   int(obj["sigma"]), int(obj["rho"], 16), ak.Signature(c, s),
                   tuple(obj["mu_prime"]), int(obj["r"]))


class CoinInterviewer:
    def __init__(self, params: GroupParams, config: PollConfig, rng, session_id: str):
        if not config.variant.startswith("W-coin"):
            raise ConfigError("CoinInterviewer needs variant W-coin or W-coin-weak")
        config.check_group(params)
        self.params, self.config, self.rng, self.session_id = params, config, rng, session_id
        self.sigma = rng.randrange(config.d)
        self.result: int | None = None
        self.record: AuditRecord | None = None

    def start(self):
        return None

    def receive(self, msg: ProtocolMessage):
        params, config, pid = self.params, self.config, self.config.protocol_id
        if msg.step == 1:
            expect(msg, pid, 1)
            self.first = _decode(lambda: CommitStep.from_bytes(params, config, msg.payload), 1, "commitments")
            if not verify_commit_step(params, config, self.session_id, self.first):
                raise Halt(1, "argument verification failed")
            nu = self.rng.randrange(config.n)
            if config.weak:
                self.coin = CoinStep(nu, None, None)
            else:
                y, oy = commit_random(params, self.sigma, self.rng)
                self.rho = oy.randomness
                arg = ak.prove_value_in_set(params, y, oy, range(config.d), context(self.session_id, pid, 2), self.rng)
                self.coin = CoinStep(nu, y, arg)
            return ProtocolMessage(pid, 2, self.coin.to_bytes(params))
        expect(msg, pid, 3)
        ans = _decode(lambda: AnswerStep.from_bytes(params, config, msg.payload), 3, "answers")
        if not verify_answer_step(params, config, self.session_id, self.first, self.coin, ans):
            raise Halt(3, "argument verification failed")
        self.result = ans.mu_prime[self.sigma]
        if not config.weak:
            self.record = AuditRecord(self.session_id, self.first.key, self.coin.y, self.sigma, self.rho,
                                      ans.signature, ans.mu_prime, self.result)
        return None


def p2_audit(record: AuditRecord, transcript: SessionTranscript) -> bool:
    """Third-party check that r is the answer at the committed, signed sigma."""
    params, config = transcript.params, transcript.config
    if config.variant != "W-coin" or record.session_id != transcript.session_id:
        return False
    try:
        first = CommitStep.from_bytes(params, config, transcript.message(1).payload)
        coin = CoinStep.from_bytes(params, config, transcript.message(2).payload)
        ans = AnswerStep.from_bytes(params, config, transcript.message(3).payload)
    except (AttributeError, DecodeError, ValueError):
        return False
    if first.key != record.key or coin.y != record.y:
        return False
    if ans.signature != record.signature or ans.mu_prime != tuple(record.mu_prime):
        return False
    if not ak.verify_sig(params, record.key, sign_message(record.session_id, config, params, record.y),
                         record.signature):
        return False
    if not 0 <= record.sigma < config.d:
        return False
    if not verify_opening(params, record.y, Opening(record.sigma, record.rho)):
        return False
    return record.r == ans.mu_prime[record.sigma]
