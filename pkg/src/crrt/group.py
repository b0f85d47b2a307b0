"""Schnorr groups: the order-q subgroup G of Z_p^* with two generators g, h.

Elements and exponents are plain Python ints. ``GroupParams`` carries the
arithmetic and the canonical fixed-width encodings; ``decode_element`` is the
only way untrusted bytes become elements and it always checks membership.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from functools import lru_cache

import gmpy2

PRIMALITY_ROUNDS = 64
MAX_HASH_RETRIES = 256
_PRIME_SEARCH_BUDGET = 1_000_000
_SMALL_RANGE = 4096


class GroupError(ValueError):
    """Invalid group parameters or an invalid encoded element."""


def is_probable_prime(n: int) -> bool:
    # 64 Miller-Rabin rounds: error below 2^-128.
    return n >= 2 and bool(gmpy2.is_prime(n, PRIMALITY_ROUNDS))


@dataclass(frozen=True)
class GroupParams:
    """Public key K = (p, q, g, h)."""

    p: int
    q: int
    g: int
    h: int
    p_bits: int = field(init=False)
    q_bits: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "p_bits", self.p.bit_length())
        object.__setattr__(self, "q_bits", self.q.bit_length())

    @property
    def element_len(self) -> int:
        return (self.p_bits + 7) // 8

    @property
    def scalar_len(self) -> int:
        return (self.q_bits + 7) // 8

    # arithmetic -----------------------------------------------------------

    def exp(self, base: int, e: int) -> int:
        return pow(base, e % self.q, self.p)

    def mul(self, *xs: int) -> int:
        out = 1
        for x in xs:
            out = out * x % self.p
        return out

    def inv(self, x: int) -> int:
        return pow(x, -1, self.p)

    def gexp(self, e: int) -> int:
        return pow(self.g, e % self.q, self.p)

    def hexp(self, e: int) -> int:
        return pow(self.h, e % self.q, self.p)

    def is_element(self, x: int) -> bool:
        return 1 <= x < self.p and pow(x, self.q, self.p) == 1

    def random_scalar(self, rng) -> int:
        return rng.randrange(self.q)

    # encoding -------------------------------------------------------------

    def encode_element(self, x: int) -> bytes:
        return x.to_bytes(self.element_len, "big")

    def decode_element(self, data: bytes) -> int:
        if len(data) != self.element_len:
            raise GroupError(f"element must be {self.element_len} bytes, got {len(data)}")
        x = int.from_bytes(data, "big")
        if not 1 <= x < self.p:
            raise GroupError("element out of range [1, p-1]")
        if pow(x, self.q, self.p) != 1:
            raise GroupError("element is not in the order-q subgroup")
        return x

    def encode_scalar(self, x: int) -> bytes:
        return (x % self.q).to_bytes(self.scalar_len, "big")

    def decode_scalar(self, data: bytes) -> int:
        if len(data) != self.scalar_len:
            raise GroupError(f"scalar must be {self.scalar_len} bytes, got {len(data)}")
        x = int.from_bytes(data, "big")
        if x >= self.q:
            raise GroupError("scalar not reduced mod q")
        return x

    def to_bytes(self) -> bytes:
        """Canonical encoding used for hashing the parameters into challenges."""
        parts = [self.p, self.q, self.g, self.h]
        out = b""
        for v in parts:
            raw = v.to_bytes((v.bit_length() + 7) // 8 or 1, "big")
            out += len(raw).to_bytes(2, "big") + raw
        return out

    def to_json(self) -> dict:
        return {k: format(getattr(self, k), "x") for k in ("p", "q", "g", "h")}

    @classmethod
    def from_json(cls, obj: dict) -> "GroupParams":
        params = cls(*(int(obj[k], 16) for k in ("p", "q", "g", "h")))
        validate_params(params)
        return params

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def validate_params(params: GroupParams) -> None:
    p, q, g, h = params.p, params.q, params.g, params.h
    if not is_probable_prime(q):
        raise GroupError("q is not prime")
    if not is_probable_prime(p):
        raise GroupError("p is not prime")
    if (p - 1) % q:
        raise GroupError("q does not divide p-1")
    for name, x in (("g", g), ("h", h)):
        if x == 1 or not params.is_element(x):
            raise GroupError(f"{name} does not generate the order-q subgroup")


def _expand(label: bytes, counter: int, nbytes: int) -> int:
    xof = hashlib.shake_256(b"crrt/hash-to-group\x00" + counter.to_bytes(2, "big") + label)
    return int.from_bytes(xof.digest(nbytes), "big")


def hash_to_group(p: int, q: int, label: bytes) -> int:
    """Map ``label`` to a non-identity element of the order-q subgroup of Z_p^*.

    Nobody learns a discrete log of the result relative to any other generator.
    """
    if not label:
        raise ValueError("label must be nonempty")
    cofactor = (p - 1) // q
    nbytes = (p.bit_length() + 7) // 8 + 16
    for counter in range(MAX_HASH_RETRIES):
        x = _expand(label, counter, nbytes) % p
        if x == 0:
            continue
        e = pow(x, cofactor, p)
        if e != 1:
            return e
    raise GroupError("hash_to_group: retry budget exhausted")


def _h_label(p: int, q: int, g: int) -> bytes:
    width = (p.bit_length() + 7) // 8
    return b"crrt/h|" + p.to_bytes(width, "big") + q.to_bytes(width, "big") + g.to_bytes(width, "big")


def params_from_primes(p: int, q: int, g: int | None = None) -> GroupParams:
    """Build parameters over known primes; g defaults to a hashed generator."""
    if g is None:
        g = hash_to_group(p, q, b"crrt/g")
    h = hash_to_group(p, q, _h_label(p, q, g))
    params = GroupParams(p, q, g, h)
    validate_params(params)
    return params


def _find_p(q: int, p_bits: int, rng) -> int | None:
    """A prime p = kq + 1 with p_bits bits, or None if none turns up for this q."""
    lo = ((1 << (p_bits - 1)) - 1) // q + 1
    hi = ((1 << p_bits) - 2) // q
    if lo > hi:
        return None
    if hi - lo < _SMALL_RANGE:
        # few multipliers: try each even k once
        ks = [k for k in range(lo, hi + 1) if k % 2 == 0]
        rng.shuffle(ks)
        return next((k * q + 1 for k in ks if is_probable_prime(k * q + 1)), None)
    for _ in range(_PRIME_SEARCH_BUDGET):
        k = rng.randint(lo, hi)
        k += k & 1  # p = kq + 1 must be odd
        if k <= hi and is_probable_prime(k * q + 1):
            return k * q + 1
    return None


def generate_params(q_bits: int, p_bits: int, seed) -> GroupParams:
    """Deterministically generate a Schnorr group from ``seed``."""
    if q_bits < 7 or p_bits <= q_bits:
        raise ValueError("need q_bits >= 7 and p_bits > q_bits")
    rng = random.Random(f"crrt-params:{q_bits}:{p_bits}:{seed}")
    for _ in range(_PRIME_SEARCH_BUDGET):
        q = rng.getrandbits(q_bits) | (1 << (q_bits - 1)) | 1
        if not is_probable_prime(q):
            continue
        p = _find_p(q, p_bits, rng)
        if p is not None:
            break
    else:
        raise GroupError("no (p, q) pair found within budget")
    cofactor = (p - 1) // q
    while True:
        g = pow(rng.randrange(2, p - 1), cofactor, p)
        if g != 1:
            break
    return params_from_primes(p, q, g)


# Profiles ---------------------------------------------------------------

TEST_P = 607  # 606 = 2 * 3 * 101
TEST_Q = 101
SECURE_Q_BITS = 256
SECURE_P_BITS = 2048
SECURE_SEED = "crrt-secure-v1"


@lru_cache(maxsize=None)
def test_params() -> GroupParams:
    """The 7-bit TEST profile (q = 101, p = 607) for exhaustive checks."""
    return params_from_primes(TEST_P, TEST_Q)


@lru_cache(maxsize=None)
def secure_params() -> GroupParams:
    return generate_params(SECURE_Q_BITS, SECURE_P_BITS, SECURE_SEED)


def profile_params(profile: str) -> GroupParams:
    profile = profile.lower()
    if profile == "test":
        return test_params()
    if profile == "secure":
        return secure_params()
    raise ValueError(f"unknown group profile {profile!r}")
