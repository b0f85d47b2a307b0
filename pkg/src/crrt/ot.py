"""Naor-Pinkas 1-out-of-n OT whose ciphertexts are Pedersen commitments.

The sender commits to mu_i with randomness v_i mod q, where v_i is the usual
Naor-Pinkas key. The chooser can recompute v_sigma only, strips the h-part,
and finds mu_sigma by exhaustive search over a small message space. Because
the y_i are ordinary commitments, the sender can attach ZK arguments about
the transferred values.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .codec import DecodeError, Reader, Writer
from .group import GroupParams
from .pedersen import Commitment, Opening

MSG_CHOOSER = 0x01
MSG_SENDER = 0x02
MAX_SEARCH = 1 << 16


class OtError(ValueError):
    """Malformed OT message or failed recovery."""


@dataclass(frozen=True)
class OtChooserState:
    a: int
    b: int
    sigma: int
    n: int


@dataclass(frozen=True)
class OtChooserMessage:
    A: int
    B: int
    C: int

    def to_bytes(self, params: GroupParams, n: int) -> bytes:
        return Writer(params).u8(MSG_CHOOSER).u16(n).element(self.A).element(self.B).element(self.C).getvalue()

    @classmethod
    def read(cls, r: Reader) -> tuple["OtChooserMessage", int]:
        if r.u8() != MSG_CHOOSER:
            raise DecodeError("not an OT chooser message")
        n = r.u16()
        return cls(r.element(), r.element(), r.element()), n


@dataclass(frozen=True)
class OtSenderMessage:
    pairs: tuple[tuple[int, int], ...]

    @property
    def commitments(self) -> list[Commitment]:
        return [Commitment(y) for _, y in self.pairs]

    def to_bytes(self, params: GroupParams) -> bytes:
        w = Writer(params).u8(MSG_SENDER).u16(len(self.pairs))
        for wi, yi in self.pairs:
            w.element(wi).element(yi)
        return w.getvalue()

    @classmethod
    def read(cls, r: Reader) -> "OtSenderMessage":
        if r.u8() != MSG_SENDER:
            raise DecodeError("not an OT sender message")
        n = r.u16()
        return cls(tuple((r.element(), r.element()) for _ in range(n)))


@dataclass(frozen=True)
class SenderWitness:
    """Openings (mu_i, v_i mod q) of the y_i, plus the exponents for audits."""

    openings: tuple[Opening, ...]
    r: tuple[int, ...]
    s: tuple[int, ...]
    v: tuple[int, ...]  # v_i as group elements, before reduction


def chooser_init(params: GroupParams, n: int, sigma: int, rng) -> tuple[OtChooserState, OtChooserMessage]:
    if not 1 <= sigma <= n:
        raise OtError(f"choice {sigma} outside [1, {n}]")
    a, b = params.random_scalar(rng), params.random_scalar(rng)
    msg = OtChooserMessage(params.gexp(a), params.gexp(b), params.gexp(a * b - sigma + 1))
    return OtChooserState(a, b, sigma, n), msg


def _validate_chooser(params: GroupParams, msg: OtChooserMessage) -> None:
    for name in ("A", "B", "C"):
        if not params.is_element(getattr(msg, name)):
            raise OtError(f"chooser element {name} is not in the subgroup")


def sender_respond(params: GroupParams, msg: OtChooserMessage, values: Sequence[int],
                   rng) -> tuple[OtSenderMessage, SenderWitness]:
    _validate_chooser(params, msg)
    q = params.q
    pairs, openings, rs, ss, vs = [], [], [], [], []
    for i, mu in enumerate(values, start=1):
        r, s = rng.randrange(q), rng.randrange(q)
        w = params.mul(params.gexp(r), params.exp(msg.A, s))
        v = params.mul(params.exp(msg.B, r), params.exp(params.mul(msg.C, params.gexp(i - 1)), s))
        y = params.mul(params.gexp(mu), params.hexp(v))
        pairs.append((w, y))
        openings.append(Opening(mu % q, v % q))
        rs.append(r)
        ss.append(s)
        vs.append(v)
    return OtSenderMessage(tuple(pairs)), SenderWitness(tuple(openings), tuple(rs), tuple(ss), tuple(vs))


def chooser_recover(params: GroupParams, state: OtChooserState, msg: OtSenderMessage,
                    message_space: Sequence[int]) -> int:
    """Return mu_sigma, searching ``message_space`` for g^x = y_sigma / h^(v_sigma mod q)."""
    if len(message_space) > MAX_SEARCH:
        raise OtError("message space too large for exhaustive search")
    if len(msg.pairs) != state.n:
        raise OtError(f"expected {state.n} pairs, got {len(msg.pairs)}")
    w, y = msg.pairs[state.sigma - 1]
    v = pow(w, state.b, params.p)
    target = params.mul(y, params.hexp(-v))
    for x in message_space:
        if params.gexp(x) == target:
            return x
    raise OtError("no value in the message space matches; sender misbehaved")


# Left-or-right masking analysis ------------------------------------------------

@dataclass(frozen=True)
class LorProbe:
    m: int
    q: int
    exact: tuple[float, ...]        # Pr[x mod m = j] for uniform x in Z_q
    group_exact: tuple[float, ...]  # Pr[(v mod q) mod m = j] for uniform v in the subgroup G
    counts: tuple[int, ...]         # empirical histogram of masked residues
    trials: int
    bias_bound: float               # (m - d) / q

    @property
    def empirical(self) -> tuple[float, ...]:
        return tuple(c / self.trials for c in self.counts) if self.trials else ()

    @property
    def max_bias(self) -> float:
        """Best single-guess advantage over 1/m in the exact distribution."""
        return max(self.exact) - 1 / self.m

    @property
    def gap(self) -> float:
        """Most likely minus least likely residue in the exact distribution."""
        return max(self.exact) - min(self.exact)


def residue_distribution(q: int, m: int) -> tuple[float, ...]:
    counts = Counter(x % m for x in range(q))
    return tuple(counts[j] / q for j in range(m))


def group_residue_distribution(params: GroupParams, m: int) -> tuple[float, ...]:
    """Distribution of (v mod q) mod m for v uniform in G, the law the OT keys actually follow.

    v is a group element in [1, p-1], so reducing it mod q is not uniform on Z_q.
    Enumerates G, so only use it on small groups.
    """
    if params.q > 1 << 20:
        raise ValueError("group too large to enumerate")
    counts = Counter((params.gexp(k) % params.q) % m for k in range(params.q))
    return tuple(counts[j] / params.q for j in range(m))


def lor_bias_probe(params: GroupParams, n: int, m: int, trials: int, rng) -> LorProbe:
    """Histogram of (v_i mod q) mod m at unchosen positions of honest OT runs."""
    if m < 1 or n < 2:
        raise ValueError("need m >= 1 and n >= 2")
    counts = [0] * m
    done = 0
    while done < trials:
        sigma = 1 + rng.randrange(n)
        _, cmsg = chooser_init(params, n, sigma, rng)
        _, wit = sender_respond(params, cmsg, [0] * n, rng)
        for i, v in enumerate(wit.v, start=1):
            if i == sigma or done >= trials:
                continue
            counts[(v % params.q) % m] += 1
            done += 1
    d = params.q % m
    return LorProbe(m, params.q, residue_distribution(params.q, m), group_residue_distribution(params, m),
                    tuple(counts), trials, (m - d) / params.q)
