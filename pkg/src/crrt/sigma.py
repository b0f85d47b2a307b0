"""Fiat-Shamir zero-knowledge arguments over Pedersen commitments.

Every argument here is an AND of clauses, each clause an OR of branches, and
each branch a claim of knowledge of exponents x with ``target = prod base_j^x_j``.
One CDS-style engine handles all of them: simulated branches get a random
challenge share, the real branch gets the remainder of the hashed challenge.

Verifiers never trust targets carried in a transcript; they rebuild every
clause from the public statement and only read first moves and responses.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Sequence

from .codec import DecodeError, Reader, Writer
from .group import GroupParams
from .pedersen import Commitment, Opening, verify_opening


class ProofError(ValueError):
    """The prover was asked to prove a false statement."""


KIND_OPENING = 1
KIND_BOOLEAN = 2
KIND_LIN = 3
KIND_SET = 4
KIND_RANGE = 5
KIND_RELATION = 6

_DOMAIN = {
    KIND_OPENING: b"crrt/ak/opening/v1",
    KIND_BOOLEAN: b"crrt/ak/boolean/v1",
    KIND_LIN: b"crrt/ak/lin/v1",
    KIND_SET: b"crrt/ak/set/v1",
    KIND_RANGE: b"crrt/ak/range/v1",
    KIND_RELATION: b"crrt/ak/relation/v1",
}

MAX_SET_SIZE = 64


@dataclass(frozen=True)
class Branch:
    target: int
    bases: tuple[int, ...]


@dataclass(frozen=True)
class ArgumentTranscript:
    kind: int
    tag: bytes
    commitments: tuple[int, ...]
    first_moves: tuple[int, ...]
    challenge: int
    responses: tuple[int, ...]

    def to_bytes(self, params: GroupParams) -> bytes:
        w = Writer(params)
        w.u8(self.kind).blob(self.tag)
        w.elements(self.commitments).elements(self.first_moves)
        w.scalar(self.challenge).scalars(self.responses)
        return w.getvalue()

    @classmethod
    def read(cls, r: Reader) -> "ArgumentTranscript":
        kind = r.u8()
        if kind not in _DOMAIN:
            raise DecodeError(f"unknown argument kind {kind}")
        tag = r.blob()
        commitments = tuple(r.elements())
        moves = tuple(r.elements())
        challenge = r.scalar()
        responses = tuple(r.scalars())
        return cls(kind, tag, commitments, moves, challenge, responses)

    @classmethod
    def from_bytes(cls, params: GroupParams, data: bytes) -> "ArgumentTranscript":
        r = Reader(data, params)
        out = cls.read(r)
        r.done()
        return out


# Fiat-Shamir -------------------------------------------------------------

def _lp(data: bytes) -> bytes:
    return len(data).to_bytes(4, "big") + data


def fiat_shamir(params: GroupParams, kind: int, tag: bytes, context: bytes,
                commitments: Sequence[int], moves: Sequence[int]) -> int:
    h = hashlib.sha256()
    h.update(_lp(_DOMAIN[kind]))
    h.update(_lp(params.to_bytes()))
    h.update(_lp(bytes(context)))
    h.update(_lp(tag))
    h.update(_lp(b"".join(params.encode_element(c) for c in commitments)))
    h.update(_lp(b"".join(params.encode_element(t) for t in moves)))
    return int.from_bytes(h.digest(), "big") % params.q


# Engine -------------------------------------------------------------------

def _multi_exp(params: GroupParams, bases: Sequence[int], exps: Sequence[int]) -> int:
    out = 1
    for b, e in zip(bases, exps):
        out = out * pow(b, e % params.q, params.p) % params.p
    return out


def commit_phase(params: GroupParams, clauses, witnesses, rng):
    """First move of the composed protocol.

    ``witnesses[i]`` is ``(real_branch_index, exponents)`` for clause i.
    Returns opaque prover state and the list of first-move elements.
    """
    q, p = params.q, params.p
    state, moves = [], []
    for clause, (real, xs) in zip(clauses, witnesses, strict=True):
        entries = []
        for j, br in enumerate(clause):
            if j == real:
                ks = [rng.randrange(q) for _ in br.bases]
                moves.append(_multi_exp(params, br.bases, ks))
                entries.append((None, ks))
            else:
                cj = rng.randrange(q)
                zs = [rng.randrange(q) for _ in br.bases]
                t = _multi_exp(params, br.bases, zs) * pow(br.target, (-cj) % q, p) % p
                moves.append(t)
                entries.append((cj, zs))
        state.append((real, tuple(xs), entries))
    return state, moves


def respond_phase(params: GroupParams, state, challenge: int) -> list[int]:
    q = params.q
    out: list[int] = []
    for real, xs, entries in state:
        c_real = (challenge - sum(cj for cj, _ in entries if cj is not None)) % q
        for cj, zs in entries:
            if cj is None:
                out.append(c_real)
                out.extend((k + c_real * x) % q for k, x in zip(zs, xs))
            else:
                out.append(cj)
                out.extend(zs)
    return out


def check_responses(params: GroupParams, clauses, moves: Sequence[int], challenge: int,
                    responses: Sequence[int]) -> bool:
    """The verifier's algebraic check for an explicitly given challenge."""
    q, p = params.q, params.p
    n_branches = sum(len(c) for c in clauses)
    if len(moves) != n_branches:
        return False
    if len(responses) != sum(1 + len(br.bases) for c in clauses for br in c):
        return False
    pos = mv = 0
    for clause in clauses:
        total = 0
        for br in clause:
            cj = responses[pos]
            zs = responses[pos + 1:pos + 1 + len(br.bases)]
            pos += 1 + len(br.bases)
            total += cj
            lhs = _multi_exp(params, br.bases, zs)
            rhs = moves[mv] * pow(br.target, cj % q, p) % p
            mv += 1
            if lhs != rhs:
                return False
        if total % q != challenge % q:
            return False
    return True


def simulate_responses(params: GroupParams, clauses, challenge: int, rng):
    """Honest-verifier simulation: pick the challenge first, fake every branch."""
    q, p = params.q, params.p
    moves, responses = [], []
    for clause in clauses:
        shares = [rng.randrange(q) for _ in clause[:-1]]
        shares.append((challenge - sum(shares)) % q)
        for br, cj in zip(clause, shares):
            zs = [rng.randrange(q) for _ in br.bases]
            moves.append(_multi_exp(params, br.bases, zs) * pow(br.target, (-cj) % q, p) % p)
            responses.append(cj)
            responses.extend(zs)
    return moves, responses


def prove_clauses(params: GroupParams, kind: int, tag: bytes, commitments: Sequence[int],
                  clauses, witnesses, context: bytes, rng) -> ArgumentTranscript:
    state, moves = commit_phase(params, clauses, witnesses, rng)
    c = fiat_shamir(params, kind, tag, context, commitments, moves)
    return ArgumentTranscript(kind, tag, tuple(commitments), tuple(moves), c,
                              tuple(respond_phase(params, state, c)))


def _verify_clauses(params: GroupParams, kind: int, tag: bytes, commitments: Sequence[int],
                    clauses, transcript: ArgumentTranscript, context: bytes) -> bool:
    if transcript.kind != kind or transcript.tag != tag:
        return False
    if tuple(transcript.commitments) != tuple(commitments):
        return False
    c = fiat_shamir(params, kind, tag, context, commitments, transcript.first_moves)
    if c != transcript.challenge:
        return False
    return check_responses(params, clauses, transcript.first_moves, c, transcript.responses)


def _safe(fn):
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ValueError, TypeError, ArithmeticError, IndexError):
            return False
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@dataclass(frozen=True)
class Statement:
    """Public side of an argument: what the verifier rebuilds on its own."""

    kind: int
    tag: bytes
    commitments: tuple[int, ...]
    clauses: tuple[tuple[Branch, ...], ...]


def prove_statement(params, st: Statement, witnesses, context: bytes, rng) -> ArgumentTranscript:
    return prove_clauses(params, st.kind, st.tag, st.commitments, st.clauses, witnesses, context, rng)


@_safe
def verify_statement(params, st: Statement, transcript: ArgumentTranscript, context: bytes) -> bool:
    return _verify_clauses(params, st.kind, st.tag, st.commitments, st.clauses, transcript, context)


def _ints_tag(*values: int) -> bytes:
    return b"".join(len(raw).to_bytes(2, "big") + raw
                    for raw in (v.to_bytes((v.bit_length() + 8) // 8, "big", signed=True)
                                for v in values))


def _elems(commitments) -> tuple[int, ...]:
    return tuple(c.element if isinstance(c, Commitment) else int(c) for c in commitments)


def _value_branch(params: GroupParams, c: int, value: int) -> Branch:
    """Knowledge of rho with c * g^-value = h^rho, i.e. c commits to value."""
    return Branch(params.mul(c, params.gexp(-value)), (params.h,))


def _set_clause(params: GroupParams, c: int, allowed: Sequence[int]) -> tuple[Branch, ...]:
    return tuple(_value_branch(params, c, v) for v in allowed)


def _member_witness(params: GroupParams, opening: Opening, allowed: Sequence[int]):
    v = opening.value % params.q
    for j, a in enumerate(allowed):
        if a % params.q == v:
            return (j, (opening.randomness,))
    raise ProofError(f"committed value {opening.value} not in the allowed set")


def _check_openings(params: GroupParams, commitments, openings) -> None:
    if len(commitments) != len(openings):
        raise ValueError("commitments and openings differ in length")
    for c, o in zip(commitments, openings):
        if not verify_opening(params, c, o):
            raise ProofError("opening does not match commitment")


# Knowledge of opening -------------------------------------------------------

def opening_statement(params, commitment) -> Statement:
    (e,) = _elems([commitment])
    return Statement(KIND_OPENING, b"", (e,), ((Branch(e, (params.g, params.h)),),))


def prove_opening(params, commitment: Commitment, opening: Opening, context: bytes, rng) -> ArgumentTranscript:
    _check_openings(params, [commitment], [opening])
    st = opening_statement(params, commitment)
    return prove_statement(params, st, [(0, (opening.value, opening.randomness))], context, rng)


@_safe
def verify_opening_arg(params, commitment: Commitment, transcript: ArgumentTranscript, context: bytes) -> bool:
    return verify_statement(params, opening_statement(params, commitment), transcript, context)


# Boolean ----------------------------------------------------------------------

def boolean_statement(params, commitments) -> Statement:
    elems = _elems(commitments)
    if not elems:
        raise ValueError("need at least one commitment")
    clauses = tuple(_set_clause(params, e, (0, 1)) for e in elems)
    return Statement(KIND_BOOLEAN, _ints_tag(len(elems)), elems, clauses)


def prove_boolean(params, commitments: Sequence[Commitment], openings: Sequence[Opening],
                  context: bytes, rng) -> ArgumentTranscript:
    """Batched OR-proofs that every commitment holds 0 or 1, under one challenge."""
    _check_openings(params, commitments, openings)
    for o in openings:
        if o.value % params.q not in (0, 1):
            raise ProofError(f"value {o.value} is not Boolean")
    st = boolean_statement(params, commitments)
    wit = [_member_witness(params, o, (0, 1)) for o in openings]
    return prove_statement(params, st, wit, context, rng)


@_safe
def verify_boolean(params, commitments: Sequence[Commitment], transcript: ArgumentTranscript,
                   context: bytes) -> bool:
    return verify_statement(params, boolean_statement(params, commitments), transcript, context)


# Linear relations ---------------------------------------------------------------

def relation_statement(params, commitments, coeffs: Sequence[int], constant: int,
                       kind: int = KIND_RELATION, tag: bytes | None = None) -> Statement:
    elems = _elems(commitments)
    if not elems or len(elems) != len(coeffs):
        raise ValueError("commitments and coefficients must align")
    if tag is None:
        tag = _ints_tag(*(c % params.q for c in coeffs), constant % params.q)
    combined = _multi_exp(params, elems, coeffs)
    return Statement(kind, tag, elems, ((_value_branch(params, combined, constant),),))


def relation_witness(params, openings: Sequence[Opening], coeffs: Sequence[int]) -> int:
    return sum(o.randomness * a for o, a in zip(openings, coeffs)) % params.q


def _relation_proof(params, st: Statement, openings, coeffs, constant, context, rng):
    q = params.q
    if sum(o.value * a for o, a in zip(openings, coeffs)) % q != constant % q:
        raise ProofError("openings do not satisfy the linear relation")
    return prove_statement(params, st, [(0, (relation_witness(params, openings, coeffs),))], context, rng)


def _lin_coeffs(k: int, a: int) -> list[int]:
    return [1] * (k - 1) + [a]


def lin_statement(params, commitments, a: int, b: int) -> Statement:
    if len(commitments) < 2:
        raise ValueError("AK-Lin needs at least two commitments")
    tag = _ints_tag(len(commitments), a % params.q, b % params.q)
    return relation_statement(params, commitments, _lin_coeffs(len(commitments), a), b, KIND_LIN, tag)


def prove_lin(params, commitments: Sequence[Commitment], openings: Sequence[Opening], a: int, b: int,
              context: bytes, rng) -> ArgumentTranscript:
    """AK-Lin: sum_{i<=n} mu_i + a * mu_{n+1} = b for commitments y_1..y_{n+1}."""
    _check_openings(params, commitments, openings)
    st = lin_statement(params, commitments, a, b)
    return _relation_proof(params, st, openings, _lin_coeffs(len(commitments), a), b, context, rng)


@_safe
def verify_lin(params, commitments: Sequence[Commitment], a: int, b: int,
               transcript: ArgumentTranscript, context: bytes) -> bool:
    return verify_statement(params, lin_statement(params, commitments, a, b), transcript, context)


def prove_relation(params, commitments: Sequence[Commitment], openings: Sequence[Opening],
                   coeffs: Sequence[int], constant: int, context: bytes, rng) -> ArgumentTranscript:
    """Knowledge of openings with sum_i coeffs_i * mu_i = constant (mod q)."""
    _check_openings(params, commitments, openings)
    st = relation_statement(params, commitments, coeffs, constant)
    return _relation_proof(params, st, openings, coeffs, constant, context, rng)


@_safe
def verify_relation(params, commitments: Sequence[Commitment], coeffs: Sequence[int], constant: int,
                    transcript: ArgumentTranscript, context: bytes) -> bool:
    st = relation_statement(params, commitments, coeffs, constant)
    return verify_statement(params, st, transcript, context)


# Small value sets ----------------------------------------------------------------

def _normalize_set(params, allowed: Sequence[int]) -> tuple[int, ...]:
    vals = tuple(v % params.q for v in allowed)
    if not vals or len(vals) > MAX_SET_SIZE:
        raise ValueError(f"allowed set must have 1..{MAX_SET_SIZE} values")
    if len(set(vals)) != len(vals):
        raise ValueError("allowed values collide mod q")
    return vals


def set_statement(params, commitment, allowed: Sequence[int]) -> Statement:
    vals = _normalize_set(params, allowed)
    (e,) = _elems([commitment])
    return Statement(KIND_SET, _ints_tag(*vals), (e,), (_set_clause(params, e, vals),))


def prove_value_in_set(params, commitment: Commitment, opening: Opening, allowed: Sequence[int],
                       context: bytes, rng) -> ArgumentTranscript:
    st = set_statement(params, commitment, allowed)
    _check_openings(params, [commitment], [opening])
    wit = [_member_witness(params, opening, _normalize_set(params, allowed))]
    return prove_statement(params, st, wit, context, rng)


@_safe
def verify_value_in_set(params, commitment: Commitment, allowed: Sequence[int],
                        transcript: ArgumentTranscript, context: bytes) -> bool:
    return verify_statement(params, set_statement(params, commitment, allowed), transcript, context)


# Ranges by double bit decomposition ----------------------------------------------

def range_bits(bound: int) -> int:
    return max(1, (bound - 1).bit_length())


def _check_bound(params, bound: int) -> None:
    if bound < 1 or 4 * bound > params.q:
        raise ValueError("range bound must satisfy 1 <= L <= q/4")


def range_statement(params, commitment, bound: int, bit_commitments: Sequence[int]) -> Statement:
    """Statement over c and the 2k bit commitments (k for value, k for L-1-value)."""
    _check_bound(params, bound)
    k = range_bits(bound)
    (c,) = _elems([commitment])
    bits = _elems(bit_commitments)
    if len(bits) != 2 * k:
        raise ValueError(f"expected {2 * k} bit commitments")
    lo, hi = bits[:k], bits[k:]
    weights = [1 << j for j in range(k)]
    clauses = [_set_clause(params, e, (0, 1)) for e in bits]
    # c / prod lo_j^{2^j} and g^{L-1} / c / prod hi_j^{2^j} both commit to 0
    t1 = params.mul(c, params.inv(_multi_exp(params, lo, weights)))
    t2 = params.mul(params.gexp(bound - 1), params.inv(c), params.inv(_multi_exp(params, hi, weights)))
    clauses.append((Branch(t1, (params.h,)),))
    clauses.append((Branch(t2, (params.h,)),))
    return Statement(KIND_RANGE, _ints_tag(bound), (c, *bits), tuple(clauses))


def prove_range(params, commitment: Commitment, opening: Opening, bound: int,
                context: bytes, rng) -> ArgumentTranscript:
    """Prove the committed value lies in [0, bound-1]."""
    _check_bound(params, bound)
    _check_openings(params, [commitment], [opening])
    v = opening.value % params.q
    if v >= bound:
        raise ProofError(f"value {v} outside [0, {bound - 1}]")
    q = params.q
    k = range_bits(bound)
    bits, wit, rhos = [], [], []
    for number in (v, bound - 1 - v):
        rs = []
        for j in range(k):
            bit = (number >> j) & 1
            rho = rng.randrange(q)
            bits.append(params.mul(params.gexp(bit), params.hexp(rho)))
            wit.append((bit, (rho,)))
            rs.append(rho)
        rhos.append(rs)
    w1 = (opening.randomness - sum(r << j for j, r in enumerate(rhos[0]))) % q
    w2 = (-opening.randomness - sum(r << j for j, r in enumerate(rhos[1]))) % q
    st = range_statement(params, commitment, bound, bits)
    return prove_statement(params, st, wit + [(0, (w1,)), (0, (w2,))], context, rng)


@_safe
def verify_range(params, commitment: Commitment, bound: int, transcript: ArgumentTranscript,
                 context: bytes) -> bool:
    stmt = tuple(transcript.commitments)
    if not stmt or stmt[0] != commitment.element:
        return False
    st = range_statement(params, commitment, bound, stmt[1:])
    return verify_statement(params, st, transcript, context)


# Schnorr signatures -----------------------------------------------------------------

@dataclass(frozen=True)
class VerifyKey:
    element: int


@dataclass(frozen=True)
class SigningKey:
    secret: int
    public: VerifyKey


@dataclass(frozen=True)
class Signature:
    challenge: int
    response: int

    def to_bytes(self, params: GroupParams) -> bytes:
        return params.encode_scalar(self.challenge) + params.encode_scalar(self.response)

    @classmethod
    def from_bytes(cls, params: GroupParams, data: bytes) -> "Signature":
        r = Reader(data, params)
        sig = cls(r.scalar(), r.scalar())
        r.done()
        return sig


def keygen(params: GroupParams, rng) -> SigningKey:
    x = 1 + rng.randrange(params.q - 1)
    return SigningKey(x, VerifyKey(params.gexp(x)))


def _sig_hash(params: GroupParams, pub: int, commit_elem: int, message: bytes) -> int:
    h = hashlib.sha256()
    h.update(_lp(b"crrt/schnorr-sig/v1"))
    h.update(_lp(params.to_bytes()))
    h.update(_lp(params.encode_element(pub)))
    h.update(_lp(params.encode_element(commit_elem)))
    h.update(_lp(bytes(message)))
    return int.from_bytes(h.digest(), "big") % params.q


def sign(params: GroupParams, key: SigningKey, message: bytes) -> Signature:
    ctr = 0
    while True:
        seed = hashlib.sha256(b"crrt/schnorr-nonce/v1" + ctr.to_bytes(4, "big")
                              + params.encode_scalar(key.secret) + bytes(message)).digest()
        k = int.from_bytes(seed, "big") % params.q
        if k:
            break
        ctr += 1
    e = _sig_hash(params, key.public.element, params.gexp(k), message)
    return Signature(e, (k + e * key.secret) % params.q)


@_safe
def verify_sig(params: GroupParams, key: VerifyKey, message: bytes, sig: Signature) -> bool:
    if not params.is_element(key.element):
        return False
    r = params.mul(params.gexp(sig.response), params.exp(key.element, -sig.challenge))
    return _sig_hash(params, key.element, r, message) == sig.challenge
