"""Pedersen commitments C_K(mu; rho) = g^mu h^rho over a Schnorr group."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .group import GroupParams


@dataclass(frozen=True)
class Commitment:
    element: int


@dataclass(frozen=True)
class Opening:
    value: int
    randomness: int

    def reduced(self, q: int) -> "Opening":
        return Opening(self.value % q, self.randomness % q)


def commit(params: GroupParams, value: int, randomness: int) -> Commitment:
    return Commitment(params.mul(params.gexp(value), params.hexp(randomness)))


def commit_random(params: GroupParams, value: int, rng) -> tuple[Commitment, Opening]:
    rho = params.random_scalar(rng)
    return commit(params, value, rho), Opening(value % params.q, rho)


def verify_opening(params: GroupParams, commitment: Commitment, opening: Opening) -> bool:
    return commitment.element == commit(params, opening.value, opening.randomness).element


def multiply(params: GroupParams, a: Commitment, b: Commitment) -> Commitment:
    return Commitment(params.mul(a.element, b.element))


def combine(params: GroupParams, commitments: Sequence[Commitment], exponents: Sequence[int]) -> Commitment:
    """Return prod c_i^{e_i}; the opening is the same linear combination of openings."""
    if not commitments:
        raise ValueError("combine needs at least one commitment")
    if len(commitments) != len(exponents):
        raise ValueError("commitments and exponents differ in length")
    out = 1
    for c, e in zip(commitments, exponents):
        out = out * params.exp(c.element, e) % params.p
    return Commitment(out)


def combine_openings(params: GroupParams, openings: Sequence[Opening], exponents: Sequence[int]) -> Opening:
    q = params.q
    value = sum(o.value * e for o, e in zip(openings, exponents)) % q
    rand = sum(o.randomness * e for o, e in zip(openings, exponents)) % q
    return Opening(value, rand)


def shift(params: GroupParams, c: Commitment, delta: int) -> Commitment:
    """Commitment to value + delta with unchanged randomness: c * g^delta."""
    return Commitment(params.mul(c.element, params.gexp(delta)))
