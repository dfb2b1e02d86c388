import math
from collections import Counter

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from sqposw import posw
from sqposw.errors import UnknownTag
from sqposw.oracle import Oracle, queries, read_trace, traced
from sqposw.params import BASE_TAG, DEFAULT_TAGS, FS_TAG, NODE_TAG

import reference

# frozen from tests/reference.py (hashlib + sympy), lambda = 16
GOLDEN_H2P = (b"golden", b"message", 42139, 6)


def test_hash_to_prime_golden_vector():
    x, msg, prime, counter = GOLDEN_H2P
    o = Oracle(x, 16)
    assert o.hash_to_prime_with_counter(NODE_TAG, msg) == (prime, counter)
    # the frozen value itself, checked by trial division
    assert prime.bit_length() == 16
    assert all(prime % d for d in range(2, math.isqrt(prime) + 1))


@given(x=st.binary(min_size=1, max_size=24), msg=st.binary(max_size=40), lam=st.sampled_from([16, 17, 31, 64, 65]))
def test_hash_to_prime_matches_reference(x, msg, lam):
    got = Oracle(x, lam).hash_to_prime_with_counter(NODE_TAG, msg)
    assert got == reference.hash_to_prime(reference.NODE, x, msg, lam)


@given(x=st.binary(min_size=1, max_size=16), msg=st.binary(max_size=32), lam=st.integers(16, 200))
def test_output_is_exactly_lambda_bit_prime(x, msg, lam):
    p = Oracle(x, lam).hash_to_prime(NODE_TAG, msg)
    assert p.bit_length() == lam
    assert sympy.isprime(p)


@given(msg=st.binary(max_size=32))
def test_deterministic(msg):
    assert Oracle(b"x", 64).hash_to_prime(NODE_TAG, msg) == Oracle(b"x", 64).hash_to_prime(NODE_TAG, msg)


def test_domain_separation():
    o = Oracle(b"stmt", 64)
    outs = {tag: o.hash_to_prime(tag, b"same") for tag in (BASE_TAG, NODE_TAG, FS_TAG)}
    assert len(set(outs.values())) == 3
    assert Oracle(b"stmt2", 64).hash_to_prime(NODE_TAG, b"same") != outs[NODE_TAG]


def test_statement_boundary_is_unambiguous():
    # length prefixes keep (x, msg) splits apart
    a = Oracle(b"ab", 64).digest(NODE_TAG, b"c")
    b = Oracle(b"a", 64).digest(NODE_TAG, b"bc")
    assert a != b


def test_unknown_tag():
    with pytest.raises(UnknownTag):
        Oracle(b"x", 64).digest("nope", b"")


def test_base_label_matches_reference():
    for n in (1, 7, 8, 9, 16):
        assert Oracle(b"base", 64).base_label(n) == reference.base_label(b"base", n, 64)


def test_base_label_differs_from_leaf_zero_label():
    # the base is not the label of the all-zero leaf
    o = Oracle(b"x", 64)
    assert o.base_label(4) != o.node_label(1, ())


def test_sample_leaf_width_and_reference():
    o = Oracle(b"fs", 64)
    for n in (1, 5, 8, 9, 13):
        leaf = o.sample_leaf(12345, 1, n, 64)
        assert len(leaf) == n and set(leaf) <= {"0", "1"}
        # reference rejection sampler
        width = 8 * ((n + 7) // 8)
        prefix = (12345).to_bytes(64, "big") + (1).to_bytes(8, "big")
        c = 0
        while True:
            v = reference.digest(reference.FS, b"fs", prefix + c.to_bytes(8, "big"), max(width, 64)) % (1 << width)
            if v < 1 << n:
                break
            c += 1
        assert int(leaf, 2) == v


def test_sample_leaf_is_uniform():
    n, samples = 4, 100_000
    o = Oracle(b"uniform", 64)
    counts = Counter(o.sample_leaf(7, i, n, 8) for i in range(1, samples + 1))
    expected = samples / (1 << n)
    chi2 = sum((counts[format(v, "04b")] - expected) ** 2 / expected for v in range(1 << n))
    # 15 degrees of freedom; 0.999 quantile is about 37.7
    assert chi2 < 37.7


def test_trace_counts_logical_queries():
    o = traced(Oracle(b"t", 32))
    o.hash_to_prime(NODE_TAG, b"a")
    with o.attribute("challenge:0"):
        o.hash_to_prime(NODE_TAG, b"b")
        o.digest(NODE_TAG, b"c")
    o.sample_leaf(5, 1, 4, 8)
    tr = read_trace(o)
    tr.check()
    assert tr.total == 3
    assert tr.per_label["challenge:0"] == 2 and tr.unattributed == 1
    assert tr.fiat_shamir == 1
    assert queries(tr, raw=True) >= 4 and queries(tr) == 3


def test_tracing_does_not_change_outputs():
    plain = Oracle(b"t", 64)
    assert traced(plain).hash_to_prime(NODE_TAG, b"m") == plain.hash_to_prime(NODE_TAG, b"m")
    assert plain.trace is None


def test_raw_digests_include_retries():
    o = traced(Oracle(GOLDEN_H2P[0], 16))
    o.hash_to_prime(NODE_TAG, GOLDEN_H2P[1])
    assert read_trace(o).raw_digests == GOLDEN_H2P[3] + 1
    assert read_trace(o).total == 1


@pytest.mark.parametrize("n", [3, 5])
def test_solve_and_verify_query_counts(n, make_pp, rng):
    pp = make_pp(n, t=5)
    so = traced(Oracle.for_params(pp, b"q"))
    c, state = posw.solve(pp, b"q", oracle=so)
    assert read_trace(so).total == pp.N + 1
    gamma = posw.sample_challenges(pp, rng)
    proofs = posw.open(pp, b"q", state, gamma)
    vo = traced(Oracle.for_params(pp, b"q"))
    assert posw.verify(pp, b"q", c.N, c.phi, gamma, proofs, oracle=vo)
    tr = read_trace(vo)
    assert tr.total == pp.t + 1
    assert all(tr.per_label[f"challenge:{i}"] == 1 for i in range(pp.t))


def test_default_tags_are_distinct():
    assert len(set(DEFAULT_TAGS.values())) == len(DEFAULT_TAGS)
