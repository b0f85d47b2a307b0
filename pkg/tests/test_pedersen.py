from collections import Counter

from hypothesis import given, strategies as st

from crrt.group import test_params as small_group
from crrt.pedersen import (Commitment, Opening, combine, combine_openings, commit, commit_random, multiply,
                           shift, verify_opening)

P = small_group()
scalars = st.integers(min_value=0, max_value=10**6)


def schoolbook_pow(base, e, m):
    out = 1
    for _ in range(e):
        out = out * base % m
    return out


def test_fixed_value_against_repeated_multiplication():
    assert commit(P, 3, 5).element == schoolbook_pow(P.g, 3, P.p) * schoolbook_pow(P.h, 5, P.p) % P.p


@given(scalars, scalars, scalars, scalars)
def test_homomorphism(a, r, b, s):
    prod = multiply(P, commit(P, a, r), commit(P, b, s))
    assert prod == commit(P, a + b, r + s)
    assert verify_opening(P, prod, Opening(a + b, r + s))


def test_combine_example():
    r1, r2 = 17, 40
    c = combine(P, [commit(P, 1, r1), commit(P, 2, r2)], [2, 3])
    o = combine_openings(P, [Opening(1, r1), Opening(2, r2)], [2, 3])
    assert o == Opening(8, (2 * r1 + 3 * r2) % P.q)
    assert verify_opening(P, c, o)


def test_shift_keeps_randomness():
    c = commit(P, 4, 9)
    assert verify_opening(P, shift(P, c, -3), Opening(1, 9))


def test_wrong_opening_rejected():
    c, o = commit_random(P, 1, __import__("random").Random(1))
    assert verify_opening(P, c, o)
    assert not verify_opening(P, c, Opening(0, o.randomness))
    assert not verify_opening(P, c, Opening(1, o.randomness + 1))


def test_perfect_hiding_exhaustive():
    # over all q randomness values, commitments to 0 and to 1 hit every subgroup element exactly once
    zero = Counter(commit(P, 0, r).element for r in range(P.q))
    one = Counter(commit(P, 1, r).element for r in range(P.q))
    assert zero == one
    assert set(zero.values()) == {1} and len(zero) == P.q


def test_commitment_is_subgroup_element():
    assert all(P.is_element(commit(P, v, r).element) for v in range(3) for r in range(0, P.q, 7))
    assert isinstance(commit(P, 0, 0), Commitment) and commit(P, 0, 0).element == 1
