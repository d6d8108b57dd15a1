import random

import pytest
from hypothesis import given, settings, strategies as st

from chaindkg.group_math import G1, IDENTITY, Q, point_mul
from chaindkg.vss import (
    SharePolynomial,
    commit_polynomial,
    eval_commitments,
    eval_polynomial,
    generate_polynomial,
    lagrange_reconstruct,
    verify_share,
)
from oracles import affine_mul


def naive_eval(coeffs, x):
    return sum(c * pow(x, k, Q) for k, c in enumerate(coeffs)) % Q


def poly(*coeffs):
    return SharePolynomial(tuple(coeffs))


def test_generate_polynomial_shape_and_determinism():
    a = generate_polynomial(2, random.Random(42))
    assert len(a.coefficients) == 3
    assert a == generate_polynomial(2, random.Random(42))
    assert len(generate_polynomial(1, random.Random(3)).coefficients) == 2
    with pytest.raises(ValueError):
        generate_polynomial(0, random.Random(0))


def test_generate_polynomial_secrets_distinct():
    secrets = {generate_polynomial(2, random.Random(s)).secret for s in range(1000)}
    assert len(secrets) == 1000


def test_eval_polynomial_examples():
    assert eval_polynomial(poly(17), 9) == 17
    assert eval_polynomial(poly(3, 1, 2), 2) == 13
    f = generate_polynomial(3, random.Random(5))
    assert eval_polynomial(f, 5) == naive_eval(f.coefficients, 5)
    assert eval_polynomial(f, 0) == f.secret


def test_commit_polynomial():
    com = commit_polynomial(poly(0, 1))
    assert com == (IDENTITY, G1)
    a, b = random.Random(9).randrange(Q), random.Random(10).randrange(Q)
    com = commit_polynomial(poly(a, b))
    assert [(c.x, c.y) for c in com] == [affine_mul(1, 2, a), affine_mul(1, 2, b)]


def test_eval_commitments_examples():
    s = 123456789
    assert eval_commitments((point_mul(G1, s),), 4) == point_mul(G1, s)
    assert eval_commitments(commit_polynomial(poly(1, 1, 1)), 2) == point_mul(G1, 7)
    with pytest.raises(ValueError):
        eval_commitments((G1,), 0)


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 4), st.integers(1, 20), st.integers(0, 2**32))
def test_homomorphism_and_completeness(t, j, seed):
    f = generate_polynomial(t, random.Random(seed))
    com = commit_polynomial(f)
    assert eval_commitments(com, j) == point_mul(G1, eval_polynomial(f, j))
    assert verify_share(eval_polynomial(f, j), com, j)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, Q - 1))
def test_soundness_any_delta(seed, delta):
    f = generate_polynomial(2, random.Random(seed))
    com = commit_polynomial(f)
    assert not verify_share((eval_polynomial(f, 3) + delta) % Q, com, 3)


def test_verify_share_examples():
    f = generate_polynomial(2, random.Random(1))
    com = commit_polynomial(f)
    assert verify_share(eval_polynomial(f, 2), com, 2)
    assert not verify_share((eval_polynomial(f, 2) + 1) % Q, com, 2)
    s = 77
    assert verify_share(s, (point_mul(G1, s),), 5)
    # out-of-field integers never verify, even if they reduce to a valid share
    assert not verify_share(eval_polynomial(f, 2) + Q, com, 2)


def test_lagrange_examples():
    assert lagrange_reconstruct([(1, 9), (2, 9)]) == 9
    assert lagrange_reconstruct([(1, 5), (2, 7)]) == 3
    with pytest.raises(ValueError):
        lagrange_reconstruct([(1, 5), (1, 7)])
    with pytest.raises(ValueError):
        lagrange_reconstruct([(1, 5), (2, 7)], threshold=2)
    with pytest.raises(ValueError):
        lagrange_reconstruct([(0, 5), (2, 7)])


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_reconstruction_any_subset(data):
    t = data.draw(st.integers(1, 6))
    n = data.draw(st.integers(t + 1, 10))
    f = generate_polynomial(t, random.Random(data.draw(st.integers(0, 2**32))))
    xs = data.draw(st.lists(st.integers(1, n), min_size=t + 1, max_size=t + 1, unique=True))
    assert lagrange_reconstruct([(x, eval_polynomial(f, x)) for x in xs], threshold=t) == f.secret
